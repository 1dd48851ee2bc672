//! Sub-critical growth law: Z_t / t approaches the Neumann-series rate
//! Σ I^n A^n μ, here 1 / (1 − I) = 2 for a flat baseline.

use hawkes_longrange::experiments::{run_subcritical, ExperimentPlan, Target};
use hawkes_longrange::kernel::TemporalKernel;
use hawkes_longrange::lattice::{LatticeKernel, Window};
use hawkes_longrange::simulator::HawkesConfig;

fn main() -> hawkes_longrange::Result<()> {
    let lattice = LatticeKernel::new(1.5, 32, Window::Circulant)?;
    let sites = lattice.sites();
    let cfg = HawkesConfig::new(
        lattice,
        TemporalKernel::exponential(0.5, 1.0)?,
        vec![1.0; sites],
        200.0,
        1,
    )?;
    let plan = ExperimentPlan::new(
        cfg,
        200,
        vec![25.0, 50.0, 100.0, 200.0],
        None,
        Target::SubCriticalLaw,
    )?;
    let table = run_subcritical(&plan)?;
    println!(
        "{:>6} {:>5} {:>10} {:>12} {:>10} {:>10}",
        "t", "site", "Z/t", "E|Z/t - 2|", "stderr", "theory"
    );
    for r in &table.rows {
        println!(
            "{:>6} {:>5} {:>10.5} {:>12.5} {:>10.2e} {:>10.4}",
            r.t, r.site, r.mean, r.estimate, r.mc_stderr, r.theory
        );
    }
    Ok(())
}
