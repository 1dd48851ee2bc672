//! Immigration–birth construction. Immigrants at site i arrive as a Poisson
//! process of rate μ_i; every event at (i, s) has children forming a Poisson
//! process in time with intensity A(i, ·) φ(· − s) on (s, T].

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::{Distribution, Exp1, Poisson};

use super::{stream_rng, Engine, EventLog, EventRecorder, EventSink, HawkesConfig};
use crate::error::{Error, Result};
use crate::lattice::Window;

/// Immigrant times come from stream 0; the cluster of immigrant k from stream k + 1.
const IMMIGRATION_STREAM: u64 = 0;

/// Displacement sampler for children.
struct Offspring {
    alias: Option<WeightedAliasIndex<f64>>,
    /// Total row mass Σ_d A(0, d).
    mass: f64,
    half_width: i64,
    sites: i64,
    wrap: bool,
}

impl Offspring {
    fn new(cfg: &HawkesConfig) -> Result<Self> {
        let pmf = cfg.lattice().pmf();
        let mass: f64 = pmf.iter().sum();
        let alias = if mass > 0.0 && !cfg.kernel().is_zero() {
            Some(
                WeightedAliasIndex::new(pmf.to_vec())
                    .map_err(|e| Error::Consistency(format!("alias table: {e}")))?,
            )
        } else {
            None
        };
        Ok(Offspring {
            alias,
            mass,
            half_width: cfg.lattice().half_width() as i64,
            sites: cfg.sites() as i64,
            wrap: cfg.lattice().window() == Window::Circulant,
        })
    }

    /// Site of a child of an event at `site`, or `None` when it leaves the window.
    #[inline]
    fn child_site(
        &self,
        alias: &WeightedAliasIndex<f64>,
        site: usize,
        rng: &mut ChaCha8Rng,
    ) -> Option<usize> {
        let d = alias.sample(rng) as i64 - self.half_width;
        let j = site as i64 + d;
        if self.wrap {
            Some(j.rem_euclid(self.sites) as usize)
        } else if (0..self.sites).contains(&j) {
            Some(j as usize)
        } else {
            None
        }
    }
}

/// Simulates one replica and returns the full event log.
pub fn simulate_cluster(cfg: &HawkesConfig, replica: u64) -> Result<EventLog> {
    let mut rec = EventRecorder::new(cfg.sites());
    simulate_cluster_into(cfg, replica, &mut rec)?;
    rec.into_log(cfg.horizon())
}

/// Simulates one replica, streaming events into `sink`. Returns the event count.
pub fn simulate_cluster_into<S: EventSink>(
    cfg: &HawkesConfig,
    replica: u64,
    sink: &mut S,
) -> Result<u64> {
    let ancestors = immigrants(cfg, replica)?;
    run_clusters(cfg, replica, &ancestors, sink)
}

/// Debug entry point: no immigration, only the given (site, time) ancestors
/// and their descendants.
pub fn simulate_from_ancestors<S: EventSink>(
    cfg: &HawkesConfig,
    ancestors: &[(usize, f64)],
    replica: u64,
    sink: &mut S,
) -> Result<u64> {
    for &(site, time) in ancestors {
        if site >= cfg.sites() || !(time >= 0.0 && time <= cfg.horizon()) {
            return Err(Error::domain(format!(
                "ancestor ({site}, {time}) outside the window or horizon"
            )));
        }
    }
    run_clusters(cfg, replica, ancestors, sink)
}

fn immigrants(cfg: &HawkesConfig, replica: u64) -> Result<Vec<(usize, f64)>> {
    let mut rng = stream_rng(cfg.seed(), replica, Engine::Cluster, IMMIGRATION_STREAM);
    let horizon = cfg.horizon();
    let mut out = Vec::new();
    for (site, &rate) in cfg.mu().iter().enumerate() {
        let mean = rate * horizon;
        if mean <= 0.0 {
            continue;
        }
        let count: f64 = Poisson::new(mean)
            .map_err(|e| Error::domain(format!("immigration mean {mean}: {e}")))?
            .sample(&mut rng);
        for _ in 0..count as u64 {
            out.push((site, rng.random::<f64>() * horizon));
        }
    }
    Ok(out)
}

fn run_clusters<S: EventSink>(
    cfg: &HawkesConfig,
    replica: u64,
    ancestors: &[(usize, f64)],
    sink: &mut S,
) -> Result<u64> {
    let offspring = Offspring::new(cfg)?;
    let kernel = cfg.kernel();
    let horizon = cfg.horizon();
    let guard = cfg.explosion_guard();
    let mut events = 0u64;
    let mut stack: Vec<(usize, f64)> = Vec::new();
    for (k, &root) in ancestors.iter().enumerate() {
        let mut rng = stream_rng(cfg.seed(), replica, Engine::Cluster, k as u64 + 1);
        stack.push(root);
        while let Some((site, time)) = stack.pop() {
            sink.record(site, time);
            events += 1;
            if events > guard {
                return Err(Error::Explosion { events, guard });
            }
            let Some(alias) = &offspring.alias else {
                continue;
            };
            // children as a Poisson process in the cumulative-mass scale
            let cap = kernel.cumulative(horizon - time) * offspring.mass;
            let mut level: f64 = Exp1.sample(&mut rng);
            while level < cap {
                let delay = kernel.inverse_cumulative(level / offspring.mass);
                let child_time = (time + delay).min(horizon);
                if let Some(child_site) = offspring.child_site(alias, site, &mut rng) {
                    stack.push((child_site, child_time));
                }
                level += <Exp1 as Distribution<f64>>::sample(&Exp1, &mut rng);
            }
        }
    }
    Ok(events)
}
