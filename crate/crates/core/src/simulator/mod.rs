//! Pathwise simulation of the lattice Hawkes system on [0, T].
//!
//! [`cluster`] is the production engine (immigration–birth construction);
//! [`thinning`] is an independent intensity-based oracle for small windows.

pub mod cluster;
pub mod intensity;
pub mod thinning;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::kernel::TemporalKernel;
use crate::lattice::LatticeKernel;

pub use cluster::{simulate_cluster, simulate_cluster_into, simulate_from_ancestors};
pub use intensity::intensity_trace;
pub use thinning::{simulate_thinning, simulate_thinning_from, ThinningOptions};

pub const DEFAULT_EXPLOSION_GUARD: u64 = 100_000_000;

/// Everything that determines the law of one realization.
#[derive(Debug, Clone)]
pub struct HawkesConfig {
    lattice: LatticeKernel,
    kernel: TemporalKernel,
    mu: Vec<f64>,
    horizon: f64,
    seed: u64,
    explosion_guard: u64,
}

impl HawkesConfig {
    pub fn new(
        lattice: LatticeKernel,
        kernel: TemporalKernel,
        mu: Vec<f64>,
        horizon: f64,
        seed: u64,
    ) -> Result<Self> {
        if mu.len() != lattice.sites() {
            return Err(Error::domain(format!(
                "mu has {} entries, window has {} sites",
                mu.len(),
                lattice.sites()
            )));
        }
        if mu.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain(
                "baseline rates must be finite and non-negative",
            ));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::domain(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        Ok(HawkesConfig {
            lattice,
            kernel,
            mu,
            horizon,
            seed,
            explosion_guard: DEFAULT_EXPLOSION_GUARD,
        })
    }

    pub fn with_explosion_guard(mut self, guard: u64) -> Self {
        self.explosion_guard = guard;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mu(mut self, mu: Vec<f64>) -> Result<Self> {
        if mu.len() != self.lattice.sites() {
            return Err(Error::domain("mu length does not match the window"));
        }
        self.mu = mu;
        Ok(self)
    }

    pub fn lattice(&self) -> &LatticeKernel {
        &self.lattice
    }

    pub fn kernel(&self) -> &TemporalKernel {
        &self.kernel
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn explosion_guard(&self) -> u64 {
        self.explosion_guard
    }

    pub fn sites(&self) -> usize {
        self.lattice.sites()
    }
}

/// Domain tags keep the engines' random streams disjoint.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Engine {
    Cluster = 1,
    Thinning = 2,
}

/// Independent generator for (seed, replica, stream) under `engine`.
pub(crate) fn stream_rng(seed: u64, replica: u64, engine: Engine, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&replica.to_le_bytes());
    key[16..24].copy_from_slice(&(engine as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Receives events as an engine produces them (in no particular order).
pub trait EventSink {
    fn record(&mut self, site: usize, time: f64);
}

/// Per-site event times of one realization, sorted within each site.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    horizon: f64,
    events: Vec<Vec<f64>>,
}

impl EventLog {
    /// Builds a log from unsorted per-site times, validating the time range.
    pub fn new(horizon: f64, mut events: Vec<Vec<f64>>) -> Result<Self> {
        for (site, times) in events.iter_mut().enumerate() {
            times.sort_by(f64::total_cmp);
            if let Some(&t) = times.iter().find(|t| !(**t >= 0.0 && **t <= horizon)) {
                return Err(Error::domain(format!(
                    "event at site {site}, time {t} lies outside [0, {horizon}]"
                )));
            }
        }
        Ok(EventLog { horizon, events })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn sites(&self) -> usize {
        self.events.len()
    }

    pub fn site_events(&self, site: usize) -> &[f64] {
        &self.events[site]
    }

    pub fn total_events(&self) -> u64 {
        self.events.iter().map(|e| e.len() as u64).sum()
    }

    /// Z_t at every site: events at times ≤ t.
    pub fn counts_at(&self, t: f64) -> Vec<u64> {
        self.events
            .iter()
            .map(|e| e.partition_point(|&s| s <= t) as u64)
            .collect()
    }

    /// (site index, time) ordered by site then time.
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.events
            .iter()
            .enumerate()
            .flat_map(|(i, e)| e.iter().map(move |&t| (i, t)))
    }
}

/// Collects events for an [`EventLog`].
#[derive(Debug, Clone)]
pub struct EventRecorder {
    events: Vec<Vec<f64>>,
}

impl EventRecorder {
    pub fn new(sites: usize) -> Self {
        EventRecorder {
            events: vec![Vec::new(); sites],
        }
    }

    pub fn into_log(self, horizon: f64) -> Result<EventLog> {
        EventLog::new(horizon, self.events)
    }
}

impl EventSink for EventRecorder {
    #[inline]
    fn record(&mut self, site: usize, time: f64) {
        self.events[site].push(time);
    }
}

/// Counts events at selected sites up to each observation time, without
/// storing the events.
#[derive(Debug, Clone)]
pub struct CountSink {
    slot: Vec<Option<usize>>,
    times: Vec<f64>,
    /// [observed site][bin]; bin k holds events in (t_{k-1}, t_k].
    bins: Vec<Vec<u64>>,
}

impl CountSink {
    /// `times` must be sorted; `sites` are window indices.
    pub fn new(total_sites: usize, sites: &[usize], times: &[f64]) -> Self {
        let mut slot = vec![None; total_sites];
        for (k, &s) in sites.iter().enumerate() {
            slot[s] = Some(k);
        }
        CountSink {
            slot,
            times: times.to_vec(),
            bins: vec![vec![0; times.len()]; sites.len()],
        }
    }

    /// Cumulative counts: [observed site][observation time].
    pub fn counts(&self) -> Vec<Vec<u64>> {
        self.bins
            .iter()
            .map(|b| {
                b.iter()
                    .scan(0u64, |acc, &v| {
                        *acc += v;
                        Some(*acc)
                    })
                    .collect()
            })
            .collect()
    }
}

impl EventSink for CountSink {
    #[inline]
    fn record(&mut self, site: usize, time: f64) {
        if let Some(k) = self.slot[site] {
            let bin = self.times.partition_point(|&t| t < time);
            if bin < self.times.len() {
                self.bins[k][bin] += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Window;

    #[test]
    fn counts_and_rows() {
        let log = EventLog::new(2.0, vec![vec![1.5, 0.5], vec![], vec![2.0]]).unwrap();
        assert_eq!(log.site_events(0), &[0.5, 1.5]);
        assert_eq!(log.counts_at(1.0), vec![1, 0, 0]);
        assert_eq!(log.counts_at(2.0), vec![2, 0, 1]);
        let rows: Vec<_> = log.rows().collect();
        assert_eq!(rows, vec![(0, 0.5), (0, 1.5), (2, 2.0)]);
        assert!(EventLog::new(1.0, vec![vec![1.5]]).is_err());
    }

    #[test]
    fn count_sink_bins() {
        let mut sink = CountSink::new(3, &[2, 0], &[1.0, 2.0]);
        for &(s, t) in &[(0, 0.5), (0, 1.0), (0, 1.7), (2, 1.9), (1, 0.1), (0, 2.5)] {
            sink.record(s, t);
        }
        assert_eq!(sink.counts(), vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn streams_differ() {
        use rand::RngCore;
        let a = stream_rng(1, 0, Engine::Cluster, 0).next_u64();
        let b = stream_rng(1, 0, Engine::Cluster, 1).next_u64();
        let c = stream_rng(1, 1, Engine::Cluster, 0).next_u64();
        let d = stream_rng(1, 0, Engine::Thinning, 0).next_u64();
        assert!(a != b && a != c && a != d);
        assert_eq!(a, stream_rng(1, 0, Engine::Cluster, 0).next_u64());
    }

    #[test]
    fn config_validation() {
        let lat = LatticeKernel::new(1.5, 2, Window::Circulant).unwrap();
        let k = TemporalKernel::zero();
        assert!(HawkesConfig::new(lat.clone(), k.clone(), vec![1.0; 4], 1.0, 0).is_err());
        assert!(HawkesConfig::new(lat.clone(), k.clone(), vec![-1.0; 5], 1.0, 0).is_err());
        assert!(HawkesConfig::new(lat, k, vec![1.0; 5], 0.0, 0).is_err());
    }
}
