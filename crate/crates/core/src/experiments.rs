//! Monte Carlo harness: replicated simulations reduced into convergence tables
//! for the sub-critical and super-critical growth laws.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Regime;
use crate::meanfield::{subcritical_limit, MeanFieldSolution};
use crate::simulator::{
    simulate_cluster_into, simulate_thinning, CountSink, HawkesConfig, ThinningOptions,
};
use crate::special::ks_two_sample;

/// Replicas allowed to hit the explosion guard before a run is rejected.
const EXPLOSION_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    SubCriticalLaw,
    SuperCriticalLaw,
    MeanFieldOnly,
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub cfg: HawkesConfig,
    pub replicas: u64,
    /// Sorted, within [0, T].
    pub observation_times: Vec<f64>,
    /// Window indices (site label + L).
    pub observed_sites: Vec<usize>,
    pub target: Target,
}

impl ExperimentPlan {
    pub fn new(
        cfg: HawkesConfig,
        replicas: u64,
        observation_times: Vec<f64>,
        observed_sites: Option<Vec<usize>>,
        target: Target,
    ) -> Result<Self> {
        if replicas == 0 {
            return Err(Error::domain("at least one replica is required"));
        }
        if observation_times.is_empty()
            || observation_times.windows(2).any(|w| !(w[1] > w[0]))
            || observation_times
                .iter()
                .any(|&t| !(t > 0.0 && t <= cfg.horizon()))
        {
            return Err(Error::domain(format!(
                "observation times must be increasing and lie in (0, {}]",
                cfg.horizon()
            )));
        }
        let sites = observed_sites.unwrap_or_else(|| default_sites(&cfg));
        if sites.is_empty() || sites.iter().any(|&s| s >= cfg.sites()) {
            return Err(Error::domain(
                "observed sites must be non-empty window indices",
            ));
        }
        Ok(ExperimentPlan {
            cfg,
            replicas,
            observation_times,
            observed_sites: sites,
            target,
        })
    }

    fn site_label(&self, index: usize) -> i64 {
        index as i64 - self.cfg.lattice().half_width() as i64
    }
}

/// The centre of the window and its right edge.
pub fn default_sites(cfg: &HawkesConfig) -> Vec<usize> {
    let l = cfg.lattice().half_width();
    vec![l, 2 * l]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub t: f64,
    /// Site label in {−L, …, L}.
    pub site: i64,
    /// Monte Carlo mean of the normalized count (Z/t, Z e^{-θt} or Z).
    pub mean: f64,
    /// Reported statistic: the L¹ discrepancy for the growth laws, the mean count otherwise.
    pub estimate: f64,
    pub theory: f64,
    pub abs_err: f64,
    pub mc_stderr: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceTable {
    pub rows: Vec<TableRow>,
    /// Key/value facts about the run, echoed into output metadata.
    pub notes: Vec<(String, String)>,
}

impl ConvergenceTable {
    pub fn row(&self, t: f64, site: i64) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.t == t && r.site == site)
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_owned(), value.to_string()));
    }
}

/// Counts [replica][observed site][time], or the replicas that exploded.
struct Replicated {
    counts: Vec<Vec<Vec<u64>>>,
    completed: Vec<usize>,
    failed: usize,
}

fn replicate(plan: &ExperimentPlan) -> Result<Replicated> {
    let cfg = &plan.cfg;
    let results: Vec<Result<Vec<Vec<u64>>>> = (0..plan.replicas)
        .into_par_iter()
        .map(|r| {
            let mut sink =
                CountSink::new(cfg.sites(), &plan.observed_sites, &plan.observation_times);
            simulate_cluster_into(cfg, r, &mut sink)?;
            Ok(sink.counts())
        })
        .collect();
    let mut out = Replicated {
        counts: Vec::with_capacity(results.len()),
        completed: Vec::new(),
        failed: 0,
    };
    for (r, res) in results.into_iter().enumerate() {
        match res {
            Ok(c) => {
                out.counts.push(c);
                out.completed.push(r);
            }
            Err(Error::Explosion { .. }) => out.failed += 1,
            Err(e) => return Err(e),
        }
    }
    if out.counts.is_empty() {
        return Err(Error::PartialResult {
            failed: out.failed,
            total: plan.replicas as usize,
            completed: Vec::new(),
        });
    }
    Ok(out)
}

/// Mean and standard error in replica order.
fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Builds rows of E|normalize(Z) − theory| for every (t, site).
fn l1_rows<F: Fn(f64) -> f64>(
    plan: &ExperimentPlan,
    data: &Replicated,
    theory: &dyn Fn(usize) -> f64,
    normalize: F,
) -> Vec<TableRow> {
    let mut rows = Vec::new();
    for (ti, &t) in plan.observation_times.iter().enumerate() {
        let scale = normalize(t);
        for (si, &site) in plan.observed_sites.iter().enumerate() {
            let target = theory(site);
            let normalized: Vec<f64> = data
                .counts
                .iter()
                .map(|c| c[si][ti] as f64 * scale)
                .collect();
            let deviations: Vec<f64> = normalized.iter().map(|v| (v - target).abs()).collect();
            let (mean, _) = mean_stderr(&normalized);
            let (estimate, stderr) = mean_stderr(&deviations);
            rows.push(TableRow {
                t,
                site: plan.site_label(site),
                mean,
                estimate,
                theory: target,
                abs_err: (mean - target).abs(),
                mc_stderr: stderr,
                flagged: false,
            });
        }
    }
    rows
}

/// E|Z_t^i / t − (Σ_n I^n A^n μ)_i| against t.
pub fn run_subcritical(plan: &ExperimentPlan) -> Result<ConvergenceTable> {
    let kernel = plan.cfg.kernel();
    let integral = kernel.integral();
    if kernel.regime() != Regime::SubCritical {
        return Err(Error::Regime(format!(
            "sub-critical law needs I < 1; I = {integral}"
        )));
    }
    let limit = subcritical_limit(integral, plan.cfg.lattice(), plan.cfg.mu(), 1e-12)?;
    let data = replicate(plan)?;
    let mut table = ConvergenceTable {
        rows: l1_rows(plan, &data, &|site| limit.limit[site], |t| 1.0 / t),
        notes: Vec::new(),
    };
    table.note("integral", integral);
    table.note("neumann_terms", limit.n_terms);
    finish(plan, &data, table)
}

/// E|Z_t^i e^{-θt} − μ̄ / (θ² m̄)| against t.
pub fn run_supercritical(plan: &ExperimentPlan) -> Result<ConvergenceTable> {
    let kernel = plan.cfg.kernel();
    if kernel.regime() != Regime::SuperCritical {
        return Err(Error::Regime(format!(
            "super-critical law needs I > 1; I = {}",
            kernel.integral()
        )));
    }
    let theta = kernel.solve_theta()?;
    let m_bar = kernel.m_bar(theta)?;
    let mu = plan.cfg.mu();
    let mean_mu = mu.iter().sum::<f64>() / mu.len() as f64;
    let constant = mean_mu / (theta * theta * m_bar);
    let data = replicate(plan)?;
    let mut table = ConvergenceTable {
        rows: l1_rows(plan, &data, &|_| constant, |t| (-theta * t).exp()),
        notes: Vec::new(),
    };
    table.note("theta", theta);
    table.note("m_bar", m_bar);
    table.note("mean_mu", mean_mu);
    table.note("kappa", kernel.bound().kappa);
    table.note(
        "suggested_max_horizon",
        suggested_horizon(&plan.cfg, theta, mean_mu),
    );
    finish(plan, &data, table)
}

/// Horizon keeping the expected event count below the explosion guard:
/// (ln guard − ln(μ̄ N)) / θ.
pub fn suggested_horizon(cfg: &HawkesConfig, theta: f64, mean_mu: f64) -> f64 {
    let total_rate = (mean_mu * cfg.sites() as f64).max(f64::MIN_POSITIVE);
    ((cfg.explosion_guard() as f64).ln() - total_rate.ln()) / theta
}

fn finish(
    plan: &ExperimentPlan,
    data: &Replicated,
    mut table: ConvergenceTable,
) -> Result<ConvergenceTable> {
    let total = plan.replicas as usize;
    if data.failed as f64 > EXPLOSION_TOLERANCE * total as f64 {
        return Err(Error::PartialResult {
            failed: data.failed,
            total,
            completed: data.completed.clone(),
        });
    }
    table.note("replicas", total);
    table.note("completed_replicas", data.completed.len());
    Ok(table)
}

/// Monte Carlo mean of Z_t^i against the mean-field m_t^i, flagging rows where
/// they differ by more than three standard errors.
pub fn compare_to_meanfield(
    plan: &ExperimentPlan,
    sol: &MeanFieldSolution,
) -> Result<ConvergenceTable> {
    if sol.sites() != plan.cfg.sites() || sol.mu() != plan.cfg.mu() {
        return Err(Error::domain(
            "mean-field solution was computed for a different configuration",
        ));
    }
    if sol.grid().horizon() + 1e-12 < *plan.observation_times.last().expect("non-empty") {
        return Err(Error::domain(
            "mean-field horizon is shorter than the observation times",
        ));
    }
    let data = replicate(plan)?;
    let mut rows = Vec::new();
    for (ti, &t) in plan.observation_times.iter().enumerate() {
        let k = sol.index_of(t)?;
        if (sol.grid().time(k) - t).abs() > 1e-9 * t.max(1.0) {
            return Err(Error::domain(format!(
                "observation time {t} is not on the mean-field grid"
            )));
        }
        for (si, &site) in plan.observed_sites.iter().enumerate() {
            let values: Vec<f64> = data.counts.iter().map(|c| c[si][ti] as f64).collect();
            let (mean, stderr) = mean_stderr(&values);
            let theory = sol.m_at(k, site);
            let diff = (mean - theory).abs();
            rows.push(TableRow {
                t,
                site: plan.site_label(site),
                mean,
                estimate: mean,
                theory,
                abs_err: diff,
                mc_stderr: stderr,
                flagged: diff > 3.0 * stderr,
            });
        }
    }
    let table = ConvergenceTable {
        rows,
        notes: Vec::new(),
    };
    finish(plan, &data, table)
}

/// Two-sample comparison of total event counts from the two engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EngineComparison {
    pub ks_statistic: f64,
    pub p_value: f64,
    pub cluster_mean: f64,
    pub thinning_mean: f64,
}

/// Runs both engines `runs` times on `cfg` and compares total counts.
pub fn compare_engines(cfg: &HawkesConfig, runs: u64) -> Result<EngineComparison> {
    let cluster: Vec<f64> = (0..runs)
        .into_par_iter()
        .map(|r| {
            let mut sink = CountSink::new(
                cfg.sites(),
                &(0..cfg.sites()).collect::<Vec<_>>(),
                &[cfg.horizon()],
            );
            simulate_cluster_into(cfg, r, &mut sink)?;
            Ok(sink.counts().iter().map(|c| c[0]).sum::<u64>() as f64)
        })
        .collect::<Result<_>>()?;
    let opts = ThinningOptions::default();
    let thinning: Vec<f64> = (0..runs)
        .into_par_iter()
        .map(|r| Ok(simulate_thinning(cfg, r, &opts)?.total_events() as f64))
        .collect::<Result<_>>()?;
    let (d, p) = ks_two_sample(&cluster, &thinning);
    Ok(EngineComparison {
        ks_statistic: d,
        p_value: p,
        cluster_mean: mean_stderr(&cluster).0,
        thinning_mean: mean_stderr(&thinning).0,
    })
}

/// Dispatches on the plan's target. `MeanFieldOnly` tabulates m_t^i with no simulation.
pub fn run(plan: &ExperimentPlan, h: f64) -> Result<ConvergenceTable> {
    match plan.target {
        Target::SubCriticalLaw => run_subcritical(plan),
        Target::SuperCriticalLaw => run_supercritical(plan),
        Target::MeanFieldOnly => {
            let cfg = &plan.cfg;
            let sol = crate::meanfield::solve_volterra(
                cfg.kernel(),
                cfg.lattice(),
                cfg.mu(),
                cfg.horizon(),
                h,
            )?;
            let mut rows = Vec::new();
            for &t in &plan.observation_times {
                let k = sol.index_of(t)?;
                for &site in &plan.observed_sites {
                    let m = sol.m_at(k, site);
                    rows.push(TableRow {
                        t,
                        site: plan.site_label(site),
                        mean: m,
                        estimate: m,
                        theory: m,
                        abs_err: 0.0,
                        mc_stderr: 0.0,
                        flagged: false,
                    });
                }
            }
            Ok(ConvergenceTable {
                rows,
                notes: vec![("step".into(), h.to_string())],
            })
        }
    }
}
