//! Ogata thinning with a global candidate rate. Intended for small windows:
//! each candidate costs one application of the spatial operator.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use super::{stream_rng, Engine, EventLog, EventRecorder, EventSink, HawkesConfig};
use crate::error::{Error, Result};
use crate::kernel::KernelFamily;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ThinningOptions {
    /// Per-site intensity bound, required when φ is not nonincreasing.
    pub intensity_cap: Option<f64>,
}

/// Excitation e_j(t) = Σ_{s ∈ events at j, s < t} φ(t − s) for every site j.
enum Excitation {
    /// φ = a e^{-bt}: exact decay recursion.
    Exponential {
        a: f64,
        b: f64,
        level: Vec<f64>,
        at: f64,
    },
    /// Direct sums over past events.
    Direct { past: Vec<Vec<f64>> },
}

impl Excitation {
    fn new(cfg: &HawkesConfig) -> Self {
        match cfg.kernel().family() {
            KernelFamily::Exponential { a, b } => Excitation::Exponential {
                a: *a,
                b: *b,
                level: vec![0.0; cfg.sites()],
                at: 0.0,
            },
            _ => Excitation::Direct {
                past: vec![Vec::new(); cfg.sites()],
            },
        }
    }

    fn at(&mut self, cfg: &HawkesConfig, t: f64) -> Vec<f64> {
        match self {
            Excitation::Exponential { b, level, at, .. } => {
                let f = (-*b * (t - *at)).exp();
                level.iter_mut().for_each(|v| *v *= f);
                *at = t;
                level.clone()
            }
            Excitation::Direct { past } => {
                let k = cfg.kernel();
                past.iter()
                    .map(|ev| ev.iter().map(|&s| k.phi(t - s)).sum())
                    .collect()
            }
        }
    }

    fn add(&mut self, site: usize, t: f64) {
        match self {
            Excitation::Exponential { a, level, .. } => level[site] += *a,
            Excitation::Direct { past } => past[site].push(t),
        }
    }
}

pub fn simulate_thinning(
    cfg: &HawkesConfig,
    replica: u64,
    opts: &ThinningOptions,
) -> Result<EventLog> {
    simulate_thinning_from(cfg, &[], replica, opts)
}

/// Thinning with optional forced initial events (site, time), which are
/// recorded and excite the system like ordinary events.
pub fn simulate_thinning_from(
    cfg: &HawkesConfig,
    forced: &[(usize, f64)],
    replica: u64,
    opts: &ThinningOptions,
) -> Result<EventLog> {
    let monotone = cfg.kernel().is_nonincreasing();
    if !monotone && opts.intensity_cap.is_none() {
        return Err(Error::domain(
            "thinning needs a nonincreasing kernel or an explicit intensity cap",
        ));
    }
    let mut forced = forced.to_vec();
    forced.sort_by(|x, y| x.1.total_cmp(&y.1));
    for &(site, time) in &forced {
        if site >= cfg.sites() || !(time >= 0.0 && time <= cfg.horizon()) {
            return Err(Error::domain(format!(
                "forced event ({site}, {time}) outside the window or horizon"
            )));
        }
    }
    let mut rng = stream_rng(cfg.seed(), replica, Engine::Thinning, 0);
    let lattice = cfg.lattice();
    let mu = cfg.mu();
    let horizon = cfg.horizon();
    let guard = cfg.explosion_guard();
    let mut rec = EventRecorder::new(cfg.sites());
    let mut excitation = Excitation::new(cfg);
    let mut next_forced = forced.into_iter().peekable();
    let mut events = 0u64;

    let intensity = |e: &[f64]| -> Result<Vec<f64>> {
        let spread = lattice.apply(e)?;
        Ok(mu.iter().zip(&spread).map(|(m, s)| m + s).collect())
    };

    let mut t = 0.0;
    let mut bound = match opts.intensity_cap {
        Some(cap) if !monotone => cap * cfg.sites() as f64,
        _ => intensity(&excitation.at(cfg, 0.0))?.iter().sum(),
    };
    loop {
        let step = if bound > 0.0 {
            <Exp1 as Distribution<f64>>::sample(&Exp1, &mut rng) / bound
        } else {
            f64::INFINITY
        };
        let candidate = t + step;
        // forced events preempt candidates that would come after them
        if let Some(&(site, ft)) = next_forced.peek() {
            if ft <= candidate.min(horizon) {
                next_forced.next();
                excitation.at(cfg, ft);
                excitation.add(site, ft);
                rec.record(site, ft);
                events += 1;
                t = ft;
                if monotone {
                    bound = intensity(&excitation.at(cfg, ft))?.iter().sum();
                }
                continue;
            }
        }
        if candidate > horizon {
            break;
        }
        t = candidate;
        let lambda = intensity(&excitation.at(cfg, t))?;
        let total: f64 = lambda.iter().sum();
        if total > bound * (1.0 + 1e-9) {
            return Err(Error::Consistency(format!(
                "intensity {total} exceeds thinning bound {bound} at t = {t}"
            )));
        }
        if let Some(cap) = opts.intensity_cap {
            if let Some(v) = lambda.iter().find(|&&v| v > cap) {
                return Err(Error::Consistency(format!(
                    "site intensity {v} exceeds cap {cap} at t = {t}"
                )));
            }
        }
        let u = rng.random::<f64>() * bound;
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, &l) in lambda.iter().enumerate() {
            acc += l;
            if u < acc {
                chosen = Some(i);
                break;
            }
        }
        if let Some(site) = chosen {
            excitation.add(site, t);
            rec.record(site, t);
            events += 1;
            if events > guard {
                return Err(Error::Explosion { events, guard });
            }
            if monotone {
                bound = intensity(&excitation.at(cfg, t))?.iter().sum();
            }
        } else if monotone {
            // intensities only decay between events; tighten the bound
            bound = total;
        }
    }
    rec.into_log(horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::TemporalKernel;
    use crate::lattice::{LatticeKernel, Window};

    fn config(kernel: TemporalKernel, mu: f64) -> HawkesConfig {
        let lat = LatticeKernel::new(1.5, 3, Window::Circulant).unwrap();
        HawkesConfig::new(lat, kernel, vec![mu; 7], 10.0, 11).unwrap()
    }

    #[test]
    fn reproducible_and_sorted() {
        let cfg = config(TemporalKernel::exponential(0.5, 1.0).unwrap(), 1.0);
        let a = simulate_thinning(&cfg, 0, &ThinningOptions::default()).unwrap();
        let b = simulate_thinning(&cfg, 0, &ThinningOptions::default()).unwrap();
        assert_eq!(a, b);
        for i in 0..7 {
            assert!(a.site_events(i).windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn zero_kernel_is_poisson() {
        let cfg = config(TemporalKernel::zero(), 0.8);
        let runs = 3000;
        let mean = (0..runs)
            .map(|r| {
                simulate_thinning(&cfg, r, &ThinningOptions::default())
                    .unwrap()
                    .total_events() as f64
            })
            .sum::<f64>()
            / runs as f64;
        let expected = 0.8 * 10.0 * 7.0;
        assert!((mean - expected).abs() < 3.0 * (expected / runs as f64).sqrt());
    }

    #[test]
    fn non_monotone_kernel_needs_cap() {
        let k = TemporalKernel::tabulated(vec![0.0, 1.0, 2.0], vec![0.1, 0.4, 0.0]).unwrap();
        let cfg = config(k, 1.0);
        assert!(simulate_thinning(&cfg, 0, &ThinningOptions::default()).is_err());
        let capped = ThinningOptions {
            intensity_cap: Some(50.0),
        };
        assert!(simulate_thinning(&cfg, 0, &capped).is_ok());
        let tight = ThinningOptions {
            intensity_cap: Some(1.01),
        };
        assert!(matches!(
            simulate_thinning(&cfg, 0, &tight),
            Err(Error::Consistency(_))
        ));
    }

    #[test]
    fn forced_event_is_recorded() {
        let cfg = config(TemporalKernel::exponential(0.5, 1.0).unwrap(), 0.0);
        let log =
            simulate_thinning_from(&cfg, &[(3, 0.0)], 0, &ThinningOptions::default()).unwrap();
        assert_eq!(log.site_events(3).first(), Some(&0.0));
    }
}
