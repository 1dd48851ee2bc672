//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use hawkes_longrange::experiments::{
    compare_engines, run_subcritical, run_supercritical, ExperimentPlan, Target,
};
use hawkes_longrange::kernel::TemporalKernel;
use hawkes_longrange::lattice::{LatticeKernel, Window};
use hawkes_longrange::meanfield::{
    exponential_mean_field, neumann_tail_check, solve_volterra, supercritical_profile,
};
use hawkes_longrange::simulator::HawkesConfig;
use hawkes_longrange::special::gamma;
use hawkes_longrange::stable::{llt_errors, StableDensity, WalkOptions};
use hawkes_longrange::Result;

// 1. sub-critical law
const SUB_MEAN_RANGE: (f64, f64) = (1.9, 2.1);
const SUB_REPLICAS: u64 = 500;
// 2. super-critical law
const THETA_TOL: f64 = 1e-10;
const GROWTH_CONSTANT_REL_TOL: f64 = 0.02;
const SUPER_REPLICAS: u64 = 300;
// 3. mean-field order
const RICHARDSON_RANGE: (f64, f64) = (3.5, 4.5);
// 4. engine equivalence
const ENGINE_RUNS: u64 = 5000;
const KS_MIN_P: f64 = 0.01;
const POISSON_STDERRS: f64 = 3.0;
// 5-6. lattice
const EPS_HALF_WIDTH: usize = 2048;
const AVERAGING_TOL: f64 = 0.05;
// 7. stable local limit theorems
const P0_REL_TOL: f64 = 1e-8;
// 8. Neumann tail
const NEUMANN_RATIO: f64 = 1e-2;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn circulant(l: usize) -> Result<LatticeKernel> {
    LatticeKernel::new(1.5, l, Window::Circulant)
}

fn subcritical_law() -> Result<Outcome> {
    let lat = circulant(64)?;
    let n = lat.sites();
    let cfg = HawkesConfig::new(
        lat,
        TemporalKernel::exponential(0.5, 1.0)?,
        vec![1.0; n],
        200.0,
        1,
    )?;
    let plan = ExperimentPlan::new(
        cfg,
        SUB_REPLICAS,
        vec![50.0, 100.0, 200.0],
        None,
        Target::SubCriticalLaw,
    )?;
    let table = run_subcritical(&plan)?;
    let theory_ok = table.rows.iter().all(|r| (r.theory - 2.0).abs() < 1e-10);
    let r50 = table.row(50.0, 0).expect("row");
    let r200 = table.row(200.0, 0).expect("row");
    let mean_ok = (SUB_MEAN_RANGE.0..=SUB_MEAN_RANGE.1).contains(&r200.mean);
    outcome(
        theory_ok && mean_ok && r200.estimate < r50.estimate,
        format!(
            "Z_200/200 = {:.4}, L1 error t=50 {:.4} > t=200 {:.4}, limit column 2",
            r200.mean, r50.estimate, r200.estimate
        ),
    )
}

fn supercritical_law() -> Result<Outcome> {
    let kernel = TemporalKernel::exponential(2.0, 1.0)?;
    let theta = kernel.solve_theta()?;
    let theta_ok = (theta - 1.0).abs() <= THETA_TOL;
    let lat = circulant(64)?;
    let n = lat.sites();
    let sol = solve_volterra(&kernel, &lat, &vec![1.0; n], 15.0, 15.0 / 2000.0)?;
    let profile = supercritical_profile(&sol, theta)?;
    let worst = profile
        .rescaled
        .iter()
        .map(|v| (v / 2.0 - 1.0).abs())
        .fold(0.0, f64::max);
    let volterra_ok = (profile.theory - 2.0).abs() < 1e-12 && worst <= GROWTH_CONSTANT_REL_TOL;

    let cfg = HawkesConfig::new(lat, kernel, vec![1.0; n], 12.0, 2)?;
    let plan = ExperimentPlan::new(
        cfg,
        SUPER_REPLICAS,
        vec![4.0, 6.0, 8.0, 12.0],
        None,
        Target::SuperCriticalLaw,
    )?;
    let table = run_supercritical(&plan)?;
    let (r6, r12) = (
        table.row(6.0, 0).expect("row"),
        table.row(12.0, 0).expect("row"),
    );
    outcome(
        theta_ok && volterra_ok && r12.estimate < r6.estimate,
        format!(
            "theta - 1 = {:.1e}, max |e^-15 m_15 / 2 - 1| = {worst:.2e}, L1 error t=6 {:.4} vs t=12 {:.4}",
            theta - 1.0,
            r6.estimate,
            r12.estimate
        ),
    )
}

fn meanfield_order() -> Result<Outcome> {
    let kernel = TemporalKernel::exponential(0.5, 1.0)?;
    let lat = circulant(2)?;
    let err = |h: f64| -> Result<f64> {
        let sol = solve_volterra(&kernel, &lat, &[1.0; 5], 8.0, h)?;
        Ok((0..sol.grid().len)
            .map(|k| {
                (sol.x_at(k, 2) - exponential_mean_field(0.5, 1.0, 1.0, sol.grid().time(k)).1).abs()
            })
            .fold(0.0, f64::max))
    };
    let ratio = err(0.04)? / err(0.02)?;
    outcome(
        (RICHARDSON_RANGE.0..=RICHARDSON_RANGE.1).contains(&ratio),
        format!("sup-error ratio under h -> h/2 = {ratio:.4}"),
    )
}

fn engine_equivalence() -> Result<Outcome> {
    let lat = circulant(8)?;
    let cfg = HawkesConfig::new(
        lat.clone(),
        TemporalKernel::exponential(0.5, 1.0)?,
        vec![1.0; 17],
        10.0,
        4,
    )?;
    let c = compare_engines(&cfg, ENGINE_RUNS)?;
    let poisson = HawkesConfig::new(lat, TemporalKernel::zero(), vec![0.5; 17], 10.0, 4)?;
    let p = compare_engines(&poisson, ENGINE_RUNS)?;
    let expected = 0.5 * 10.0 * 17.0;
    let stderr = (expected / ENGINE_RUNS as f64).sqrt();
    let z = [p.cluster_mean, p.thinning_mean]
        .iter()
        .map(|m| (m - expected).abs() / stderr)
        .fold(0.0, f64::max);
    outcome(
        c.p_value > KS_MIN_P && z <= POISSON_STDERRS,
        format!(
            "KS p = {:.4} (D = {:.4}), Poisson means within {z:.2} stderr",
            c.p_value, c.ks_statistic
        ),
    )
}

fn eps_decay() -> Result<Outcome> {
    let eps = circulant(EPS_HALF_WIDTH)?.row_sq_sup(64)?;
    let bound = StableDensity::calibrated(1.5)?.density_at_zero();
    let scaled: Vec<f64> = (8..=64)
        .map(|n| (n as f64).powf(1.0 / 1.5) * eps[n - 1])
        .collect();
    let max = scaled.iter().copied().fold(0.0, f64::max);
    outcome(
        strictly_decreasing(&eps) && max <= bound,
        format!(
            "eps_64 = {:.4e}, max n^(2/3) eps_n over 8..64 = {max:.4} <= p1(0) = {bound:.4}",
            eps[63]
        ),
    )
}

fn lattice_averaging() -> Result<Outcome> {
    let lat = circulant(512)?;
    let mu: Vec<f64> = (0..lat.sites())
        .map(|i| if (i as i64 - 512) % 2 == 0 { 1.0 } else { 0.0 })
        .collect();
    let flow = lat.mu_average_flow(&mu, 64)?;
    let dev = flow.iterates[63]
        .iter()
        .map(|v| (v - flow.mean).abs())
        .fold(0.0, f64::max);
    outcome(
        dev < AVERAGING_TOL,
        format!("max |A^64 mu - mean| = {dev:.4e}"),
    )
}

fn local_limit() -> Result<Outcome> {
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [0.5, 1.5] {
        let opts = WalkOptions {
            max_deficit: if alpha < 1.0 { 0.25 } else { 0.01 },
            ..WalkOptions::default()
        };
        let mut sup = Vec::new();
        let mut tv = Vec::new();
        for n in [16u64, 64, 256] {
            let m = (16.0 * (n as f64).powf(1.0 / alpha)).ceil() as usize;
            let e = llt_errors(alpha, n, m, &opts)?;
            sup.push(e.rescaled_sup_error);
            tv.push(e.tv_error);
        }
        let d = StableDensity::new(alpha, 1.0)?;
        let closed = gamma(1.0 / alpha) / (std::f64::consts::PI * alpha);
        let rel = (d.pdf(0.0) / closed - 1.0).abs();
        ok &= strictly_decreasing(&sup) && strictly_decreasing(&tv) && rel <= P0_REL_TOL;
        parts.push(format!(
            "alpha {alpha}: sup {:.3e}->{:.3e}, tv {:.3e}->{:.3e}, p(0) rel {rel:.1e}",
            sup[0], sup[2], tv[0], tv[2]
        ));
    }
    outcome(ok, parts.join("; "))
}

fn neumann_tail() -> Result<Outcome> {
    let kernel = TemporalKernel::exponential(2.0, 1.0)?;
    let theta = kernel.solve_theta()?;
    let eps: Vec<f64> = circulant(EPS_HALF_WIDTH)?
        .row_sq_sup(128)?
        .iter()
        .map(|v| v.sqrt())
        .collect();
    let v5 = neumann_tail_check(&kernel, theta, &eps, 5.0, 0.01)?.value;
    let v20 = neumann_tail_check(&kernel, theta, &eps, 20.0, 0.01)?.value;
    outcome(
        v20 < NEUMANN_RATIO * v5,
        format!(
            "value T=5 {v5:.4e}, T=20 {v20:.4e}, ratio {:.4} (required < {NEUMANN_RATIO})",
            v20 / v5
        ),
    )
}

fn reproducibility() -> Result<Outcome> {
    let bin = env!("CARGO_BIN_EXE_hawkes-longrange");
    let dir = tempfile::tempdir().expect("temp dir");
    let runs = [("one", "1"), ("eight", "8"), ("again", "1")];
    for (name, threads) in runs {
        let out = dir.path().join(name);
        let status = Command::new(bin)
            .args([
                "verify",
                "--profile",
                "quick",
                "--seed",
                "11",
                "--threads",
                threads,
                "--out",
            ])
            .arg(&out)
            .output()
            .expect("binary runs");
        if !status.status.success() {
            return outcome(
                false,
                format!(
                    "verify --threads {threads} exited with {:?}",
                    status.status.code()
                ),
            );
        }
    }
    let mut files: Vec<_> = std::fs::read_dir(dir.path().join("one"))
        .expect("output")
        .map(|e| e.expect("entry").file_name())
        .collect();
    files.sort();
    let mut differing = Vec::new();
    for f in &files {
        let base = std::fs::read(dir.path().join("one").join(f)).expect("read");
        for other in ["eight", "again"] {
            if std::fs::read(dir.path().join(other).join(f)).ok().as_ref() != Some(&base) {
                differing.push(format!("{}/{}", other, f.to_string_lossy()));
            }
        }
    }
    outcome(
        differing.is_empty() && files.len() >= 5,
        format!(
            "{} CSV files byte-identical across threads 1/8 and reruns; differing {differing:?}",
            files.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Result<Outcome>); 9] = [
        ("sub-critical growth law", subcritical_law),
        ("super-critical growth law", supercritical_law),
        ("mean-field solver order", meanfield_order),
        ("cluster vs thinning equivalence", engine_equivalence),
        ("sup-row l2 mass decay", eps_decay),
        ("spatial averaging", lattice_averaging),
        ("stable local limit theorems", local_limit),
        ("Neumann tail decay", neumann_tail),
        ("reproducibility", reproducibility),
    ];
    let only: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let id = (k + 1).to_string();
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check));
        let secs = start.elapsed().as_secs_f64();
        let (passed, detail) = match result {
            Ok(Ok(o)) => (o.passed, o.detail),
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".into()),
        };
        if !passed {
            failed += 1;
        }
        let line = format!(
            "criterion {id} {}: {name}: {detail} [{secs:.1}s]",
            if passed { "PASS" } else { "FAIL" }
        );
        println!("{line}");
        let _ = std::io::stdout().flush();
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
