//! Writes a mean-field growth chart and a Monte Carlo convergence table as
//! CSV and SVG into the directory given as the first argument, or a temporary one.

use std::path::PathBuf;

use hawkes_longrange::experiments::{run_subcritical, ExperimentPlan, Target};
use hawkes_longrange::io::table::write_convergence;
use hawkes_longrange::io::{emit_svg_lines, Metadata, Scale, Series};
use hawkes_longrange::kernel::TemporalKernel;
use hawkes_longrange::lattice::{LatticeKernel, Window};
use hawkes_longrange::meanfield::solve_volterra;
use hawkes_longrange::simulator::HawkesConfig;

fn main() -> hawkes_longrange::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("hawkes_convergence_plot"));
    std::fs::create_dir_all(&out).map_err(|e| hawkes_longrange::Error::Io {
        path: out.clone(),
        source: e,
    })?;
    let meta = Metadata::new(5, "example");

    let lattice = LatticeKernel::new(1.5, 8, Window::Circulant)?;
    let mu = vec![1.0; lattice.sites()];
    let mut curves = Vec::new();
    for a in [0.5, 1.0, 2.0] {
        let kernel = TemporalKernel::exponential(a, 1.0)?;
        let sol = solve_volterra(&kernel, &lattice, &mu, 10.0, 0.01)?;
        let pts = (1..sol.grid().len)
            .step_by(10)
            .map(|k| (sol.grid().time(k), sol.m_at(k, 8)))
            .collect();
        curves.push(Series::new(format!("a = {a}"), pts));
    }
    emit_svg_lines(
        &curves,
        &out.join("meanfield_growth.svg"),
        Scale::LogY,
        "m_t at site 0",
        &meta,
    )?;

    let cfg = HawkesConfig::new(
        lattice,
        TemporalKernel::exponential(0.5, 1.0)?,
        mu,
        100.0,
        5,
    )?;
    let times: Vec<f64> = (1..=10).map(|k| 10.0 * k as f64).collect();
    let plan = ExperimentPlan::new(cfg, 100, times, None, Target::SubCriticalLaw)?;
    let table = run_subcritical(&plan)?;
    write_convergence(&table, &out.join("subcritical.csv"), &meta)?;
    let err: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter(|r| r.site == 0)
        .map(|r| (r.t, r.estimate))
        .collect();
    emit_svg_lines(
        &[Series::new("E|Z/t - 2|, site 0", err)],
        &out.join("subcritical_error.svg"),
        Scale::LogY,
        "sub-critical L1 error",
        &meta,
    )?;
    println!("wrote {}", out.display());
    Ok(())
}
