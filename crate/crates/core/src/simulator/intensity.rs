//! Reconstruction of λ^i(t) = μ_i + Σ_j A(i, j) Σ_{s < t} φ(t − s) from a log.

use super::{EventLog, HawkesConfig};
use crate::error::{Error, Result};
use crate::kernel::KernelFamily;

/// λ on `t_grid` (sorted), as [time][site].
pub fn intensity_trace(
    cfg: &HawkesConfig,
    log: &EventLog,
    t_grid: &[f64],
) -> Result<Vec<Vec<f64>>> {
    if log.sites() != cfg.sites() {
        return Err(Error::domain(
            "event log and configuration have different windows",
        ));
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("time grid must be sorted"));
    }
    let horizon = cfg.horizon();
    for site in 0..log.sites() {
        if let Some(&t) = log
            .site_events(site)
            .iter()
            .find(|t| !(**t >= 0.0 && **t <= horizon))
        {
            return Err(Error::domain(format!(
                "event at site {site}, time {t} outside [0, {horizon}]"
            )));
        }
    }
    let kernel = cfg.kernel();
    let n = cfg.sites();
    // excitation[k][j] = Σ_{s < t_k} φ(t_k − s) over events at j
    let mut excitation = vec![vec![0.0; n]; t_grid.len()];
    for j in 0..n {
        let events = log.site_events(j);
        match kernel.family() {
            KernelFamily::Exponential { a, b } => {
                let mut level = 0.0;
                let mut at = 0.0;
                let mut next = 0;
                for (k, &t) in t_grid.iter().enumerate() {
                    while next < events.len() && events[next] < t {
                        level = level * (-b * (events[next] - at)).exp() + a;
                        at = events[next];
                        next += 1;
                    }
                    excitation[k][j] = level * (-b * (t - at)).exp();
                }
            }
            _ => {
                for (k, &t) in t_grid.iter().enumerate() {
                    excitation[k][j] = events
                        .iter()
                        .take_while(|&&s| s < t)
                        .map(|&s| kernel.phi(t - s))
                        .sum();
                }
            }
        }
    }
    excitation
        .iter()
        .map(|e| {
            let spread = cfg.lattice().apply(e)?;
            Ok(cfg.mu().iter().zip(&spread).map(|(m, s)| m + s).collect())
        })
        .collect()
}
