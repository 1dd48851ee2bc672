//! Canned verification suite: fixed configurations for both growth laws, the
//! mean-field solver, the lattice operator, the stable local limit theorems and
//! the two simulators. Every table it writes depends only on the profile and seed.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::{
    compare_engines, run_subcritical, run_supercritical, ConvergenceTable, ExperimentPlan, Target,
};
use crate::io::config::short_hash;
use crate::io::table::{real, write_convergence, write_csv, Metadata};
use crate::kernel::TemporalKernel;
use crate::lattice::{LatticeKernel, Window};
use crate::meanfield::{
    exponential_mean_field, neumann_tail_check, solve_volterra, supercritical_profile,
};
use crate::simulator::HawkesConfig;
use crate::stable::{llt_errors, StableDensity, WalkOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Reduced sizes; finishes in about a minute on one core.
    Quick,
    /// Full sizes. Long-running.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub requirement: String,
    pub passed: bool,
}

impl Check {
    fn new(name: &'static str, value: f64, requirement: impl Into<String>, passed: bool) -> Self {
        Check {
            name,
            value,
            requirement: requirement.into(),
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
    pub files: Vec<PathBuf>,
    pub config_hash: String,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// `Err(Tolerance)` naming the failed checks, if any.
    pub fn into_result(self) -> Result<Self> {
        let failed: Vec<&str> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.name)
            .collect();
        if failed.is_empty() {
            Ok(self)
        } else {
            Err(Error::Tolerance(format!(
                "failed checks: {}",
                failed.join(", ")
            )))
        }
    }
}

struct Sizes {
    sub_half_width: usize,
    sub_replicas: u64,
    super_half_width: usize,
    super_replicas: u64,
    super_times: Vec<f64>,
    eps_half_width: usize,
    llt_steps: Vec<u64>,
    engine_runs: u64,
}

impl Sizes {
    fn of(profile: Profile) -> Self {
        match profile {
            Profile::Quick => Sizes {
                sub_half_width: 16,
                sub_replicas: 200,
                super_half_width: 16,
                super_replicas: 40,
                super_times: vec![4.0, 6.0, 8.0],
                eps_half_width: 256,
                llt_steps: vec![16, 64],
                engine_runs: 500,
            },
            Profile::Full => Sizes {
                sub_half_width: 64,
                sub_replicas: 500,
                super_half_width: 64,
                super_replicas: 300,
                super_times: vec![4.0, 6.0, 8.0, 12.0],
                eps_half_width: 2048,
                llt_steps: vec![16, 64, 256],
                engine_runs: 5000,
            },
        }
    }
}

/// Hash identifying a suite run.
pub fn suite_hash(profile: Profile, seed: u64) -> String {
    let canonical = serde_json::json!({ "suite": "verify", "profile": profile, "seed": seed });
    short_hash(canonical.to_string().as_bytes())
}

fn decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Runs the suite, writing one CSV per section plus `summary.csv` into `out`.
pub fn run_suite(profile: Profile, seed: u64, out: &Path) -> Result<VerifyReport> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let sizes = Sizes::of(profile);
    let hash = suite_hash(profile, seed);
    let meta = Metadata::new(seed, hash.clone()).with_echo(vec![format!(
        "profile = {}",
        match profile {
            Profile::Quick => "quick",
            Profile::Full => "full",
        }
    )]);
    let mut checks = Vec::new();
    let mut files = Vec::new();
    let emit = |name: &str, header: &[&str], rows: Vec<Vec<String>>| -> Result<PathBuf> {
        let path = out.join(name);
        write_csv(&path, &meta, header, rows)?;
        Ok(path)
    };

    // temporal kernel
    let growth = TemporalKernel::exponential(2.0, 1.0)?;
    let theta = growth.solve_theta()?;
    let m_bar = growth.m_bar(theta)?;
    checks.push(Check::new(
        "theta",
        theta,
        "|θ − 1| ≤ 1e-10",
        (theta - 1.0).abs() <= 1e-10,
    ));
    checks.push(Check::new(
        "m_bar",
        m_bar,
        "|m̄ − 0.5| ≤ 1e-8",
        (m_bar - 0.5).abs() <= 1e-8,
    ));

    // mean field
    let small = LatticeKernel::new(1.5, 4, Window::Circulant)?;
    let sol = solve_volterra(&growth, &small, &[1.0; 9], 15.0, 0.0075)?;
    let profile_15 = supercritical_profile(&sol, theta)?;
    let rescaled = profile_15.rescaled[4];
    checks.push(Check::new(
        "meanfield_growth_constant",
        rescaled,
        "|e^{-θT} m_T / 2 − 1| ≤ 0.02 at T = 15",
        (rescaled / 2.0 - 1.0).abs() <= 0.02,
    ));
    let mild = TemporalKernel::exponential(0.5, 1.0)?;
    let tiny = LatticeKernel::new(1.5, 2, Window::Circulant)?;
    let sup_err = |h: f64| -> Result<f64> {
        let sol = solve_volterra(&mild, &tiny, &[1.0; 5], 8.0, h)?;
        Ok((0..sol.grid().len)
            .map(|k| {
                (sol.x_at(k, 2) - exponential_mean_field(0.5, 1.0, 1.0, sol.grid().time(k)).1).abs()
            })
            .fold(0.0, f64::max))
    };
    let steps = [0.08, 0.04, 0.02];
    let errors: Vec<f64> = steps.iter().map(|&h| sup_err(h)).collect::<Result<_>>()?;
    let ratio = errors[1] / errors[2];
    checks.push(Check::new(
        "meanfield_richardson",
        ratio,
        "ratio ∈ [3.5, 4.5]",
        (3.5..=4.5).contains(&ratio),
    ));
    files.push(emit(
        "meanfield.csv",
        &["h", "sup_error"],
        steps
            .iter()
            .zip(&errors)
            .map(|(h, e)| vec![real(*h), real(*e)])
            .collect(),
    )?);

    // lattice operator
    let wide = LatticeKernel::new(1.5, sizes.eps_half_width, Window::Circulant)?;
    let eps: Vec<f64> = wide.row_sq_sup(64)?;
    let scaled: Vec<f64> = eps
        .iter()
        .enumerate()
        .map(|(i, e)| ((i + 1) as f64).powf(1.0 / 1.5) * e)
        .collect();
    let bound = StableDensity::calibrated(1.5)?.density_at_zero();
    let scaled_max = scaled[7..].iter().copied().fold(0.0, f64::max);
    checks.push(Check::new(
        "eps_decreasing",
        eps[63],
        "ε_n strictly decreasing, n = 1..64",
        decreasing(&eps),
    ));
    checks.push(Check::new(
        "eps_scaled_bounded",
        scaled_max,
        format!("n^(1/α) ε_n ≤ {bound:.6} for n ∈ 8..64"),
        scaled_max <= bound,
    ));
    files.push(emit(
        "lattice.csv",
        &["n", "row_sq_sup", "scaled"],
        eps.iter()
            .zip(&scaled)
            .enumerate()
            .map(|(i, (e, s))| vec![(i + 1).to_string(), real(*e), real(*s)])
            .collect(),
    )?);
    let flat = LatticeKernel::new(1.5, 512, Window::Circulant)?;
    let indicator: Vec<f64> = (0..flat.sites())
        .map(|i| if (i as i64 - 512) % 2 == 0 { 1.0 } else { 0.0 })
        .collect();
    let flow = flat.mu_average_flow(&indicator, 64)?;
    let spread = flow.iterates[63]
        .iter()
        .map(|v| (v - flow.mean).abs())
        .fold(0.0, f64::max);
    checks.push(Check::new(
        "lattice_averaging",
        spread,
        "max |A^64 μ − μ̄| < 0.05",
        spread < 0.05,
    ));

    // stable local limit theorems
    let mut llt_rows = Vec::new();
    for alpha in [0.5, 1.5] {
        let opts = WalkOptions {
            max_deficit: if alpha < 1.0 { 0.25 } else { 0.01 },
            ..WalkOptions::default()
        };
        let mut rescaled_errs = Vec::new();
        let mut tv = Vec::new();
        for &n in &sizes.llt_steps {
            let m = (16.0 * (n as f64).powf(1.0 / alpha)).ceil() as usize;
            let e = llt_errors(alpha, n, m, &opts)?;
            rescaled_errs.push(e.rescaled_sup_error);
            tv.push(e.tv_error);
            llt_rows.push(vec![
                real(alpha),
                n.to_string(),
                real(e.sup_error),
                real(e.rescaled_sup_error),
                real(e.tv_error),
                real(e.deficit),
            ]);
        }
        let (name_sup, name_tv, name_p0) = if alpha < 1.0 {
            (
                "llt_sup_alpha_0.5",
                "llt_tv_alpha_0.5",
                "stable_p0_alpha_0.5",
            )
        } else {
            (
                "llt_sup_alpha_1.5",
                "llt_tv_alpha_1.5",
                "stable_p0_alpha_1.5",
            )
        };
        checks.push(Check::new(
            name_sup,
            *rescaled_errs.last().expect("steps"),
            "n^(1/α) sup error decreasing in n",
            decreasing(&rescaled_errs),
        ));
        checks.push(Check::new(
            name_tv,
            *tv.last().expect("steps"),
            "TV error decreasing in n",
            decreasing(&tv),
        ));
        let d = StableDensity::new(alpha, 1.0)?;
        let closed = crate::special::gamma(1.0 / alpha) / (std::f64::consts::PI * alpha);
        let rel = (d.pdf(0.0) / closed - 1.0).abs();
        checks.push(Check::new(
            name_p0,
            rel,
            "relative error ≤ 1e-8",
            rel <= 1e-8,
        ));
    }
    files.push(emit(
        "stable.csv",
        &[
            "alpha",
            "n",
            "sup_error",
            "rescaled_sup_error",
            "tv_error",
            "deficit",
        ],
        llt_rows,
    )?);

    // simulators
    let lat8 = LatticeKernel::new(1.5, 8, Window::Circulant)?;
    let sub8 = HawkesConfig::new(lat8.clone(), mild.clone(), vec![1.0; 17], 10.0, seed)?;
    let cmp = compare_engines(&sub8, sizes.engine_runs)?;
    checks.push(Check::new(
        "engines_ks",
        cmp.p_value,
        "KS p-value > 0.01",
        cmp.p_value > 0.01,
    ));
    let poisson = HawkesConfig::new(lat8, TemporalKernel::zero(), vec![0.5; 17], 10.0, seed)?;
    let pcmp = compare_engines(&poisson, sizes.engine_runs)?;
    let expected = 0.5 * 10.0 * 17.0;
    let stderr = (expected / sizes.engine_runs as f64).sqrt();
    let z = (pcmp.cluster_mean - expected)
        .abs()
        .max((pcmp.thinning_mean - expected).abs())
        / stderr;
    checks.push(Check::new(
        "poisson_sanity",
        z,
        "both engine means within 3 stderr",
        z <= 3.0,
    ));
    files.push(emit(
        "engines.csv",
        &[
            "config",
            "ks_statistic",
            "p_value",
            "cluster_mean",
            "thinning_mean",
        ],
        [("subcritical", cmp), ("poisson", pcmp)]
            .iter()
            .map(|(name, c)| {
                vec![
                    name.to_string(),
                    real(c.ks_statistic),
                    real(c.p_value),
                    real(c.cluster_mean),
                    real(c.thinning_mean),
                ]
            })
            .collect(),
    )?);

    // sub-critical law
    let lat = LatticeKernel::new(1.5, sizes.sub_half_width, Window::Circulant)?;
    let n = lat.sites();
    let cfg = HawkesConfig::new(lat, mild.clone(), vec![1.0; n], 200.0, seed)?;
    let plan = ExperimentPlan::new(
        cfg,
        sizes.sub_replicas,
        vec![50.0, 100.0, 200.0],
        None,
        Target::SubCriticalLaw,
    )?;
    let table = run_subcritical(&plan)?;
    let centre = |table: &ConvergenceTable, t: f64| table.row(t, 0).cloned().expect("observed row");
    let (r50, r200) = (centre(&table, 50.0), centre(&table, 200.0));
    checks.push(Check::new(
        "subcritical_mean",
        r200.mean,
        "Z_T^0 / T ∈ [1.9, 2.1] at T = 200",
        (1.9..=2.1).contains(&r200.mean),
    ));
    checks.push(Check::new(
        "subcritical_l1_decay",
        r200.estimate / r50.estimate,
        "L¹ error at t = 200 below t = 50",
        r200.estimate < r50.estimate,
    ));
    let path = out.join("subcritical.csv");
    write_convergence(&table, &path, &meta)?;
    files.push(path);

    // super-critical law
    let lat = LatticeKernel::new(1.5, sizes.super_half_width, Window::Circulant)?;
    let n = lat.sites();
    let t_last = *sizes.super_times.last().expect("times");
    let cfg = HawkesConfig::new(lat, growth.clone(), vec![1.0; n], t_last, seed)?;
    let plan = ExperimentPlan::new(
        cfg,
        sizes.super_replicas,
        sizes.super_times.clone(),
        None,
        Target::SuperCriticalLaw,
    )?;
    let table = run_supercritical(&plan)?;
    let (early, late) = (centre(&table, 6.0), centre(&table, t_last));
    checks.push(Check::new(
        "supercritical_l1_decay",
        late.estimate / early.estimate,
        format!("L¹ error at t = {t_last} below t = 6"),
        late.estimate < early.estimate,
    ));
    let path = out.join("supercritical.csv");
    write_convergence(&table, &path, &meta)?;
    files.push(path);

    // Neumann tail
    let (eps_table, horizons, name, requirement): (Vec<f64>, [f64; 2], &str, &str) = match profile {
        Profile::Quick => (
            (1..=128).map(|n| 1.0 / n as f64).collect(),
            [10.0, 20.0],
            "neumann_tail_decay",
            "value at T = 20 below T = 10 for ε_n = 1/n",
        ),
        Profile::Full => (
            wide.row_sq_sup(128)?.iter().map(|v| v.sqrt()).collect(),
            [5.0, 20.0],
            "neumann_tail_ratio",
            "value at T = 20 < 1e-2 × value at T = 5",
        ),
    };
    let values: Vec<f64> = horizons
        .iter()
        .map(|&t| neumann_tail_check(&growth, theta, &eps_table, t, 0.01).map(|r| r.value))
        .collect::<Result<_>>()?;
    let ratio = values[1] / values[0];
    let passed = match profile {
        Profile::Quick => values[1] < values[0],
        Profile::Full => ratio < 1e-2,
    };
    checks.push(Check::new(name, ratio, requirement, passed));
    files.push(emit(
        "neumann.csv",
        &["T", "value"],
        horizons
            .iter()
            .zip(&values)
            .map(|(t, v)| vec![real(*t), real(*v)])
            .collect(),
    )?);

    let summary: Vec<Vec<String>> = checks
        .iter()
        .map(|c| {
            vec![
                c.name.to_owned(),
                real(c.value),
                c.requirement.clone(),
                c.passed.to_string(),
            ]
        })
        .collect();
    files.push(emit(
        "summary.csv",
        &["check", "value", "requirement", "passed"],
        summary,
    )?);

    Ok(VerifyReport {
        checks,
        files,
        config_hash: hash,
    })
}

/// Compares every table of a finished run against the same files in `other`.
/// Differing config hashes are refused; otherwise the files must be identical.
pub fn compare_runs(report: &VerifyReport, other: &Path) -> Result<Vec<String>> {
    let mut differing = Vec::new();
    for path in &report.files {
        let name = path.file_name().expect("file name");
        let theirs = other.join(name);
        let mine_text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let their_text = std::fs::read_to_string(&theirs).map_err(|e| Error::io(&theirs, e))?;
        let hash_of = |text: &str| -> Option<String> {
            text.lines()
                .next()?
                .split_whitespace()
                .find_map(|w| w.strip_prefix("config-hash="))
                .map(str::to_owned)
        };
        let (left, right) = (hash_of(&mine_text), hash_of(&their_text));
        if left != right {
            return Err(Error::HashMismatch {
                left: left.unwrap_or_default(),
                right: right.unwrap_or_default(),
            });
        }
        if mine_text != their_text {
            differing.push(name.to_string_lossy().into_owned());
        }
    }
    Ok(differing)
}
