//! The two exact simulators agree in law: total counts from the cluster
//! construction and from Ogata thinning, compared with a two-sample KS test.

use hawkes_longrange::experiments::compare_engines;
use hawkes_longrange::kernel::TemporalKernel;
use hawkes_longrange::lattice::{LatticeKernel, Window};
use hawkes_longrange::simulator::{intensity_trace, simulate_cluster, HawkesConfig};

fn main() -> hawkes_longrange::Result<()> {
    let lattice = LatticeKernel::new(1.5, 8, Window::Circulant)?;
    let sites = lattice.sites();
    let cfg = HawkesConfig::new(
        lattice,
        TemporalKernel::exponential(0.5, 1.0)?,
        vec![1.0; sites],
        10.0,
        42,
    )?;

    let c = compare_engines(&cfg, 2000)?;
    println!(
        "sub-critical: cluster mean {:.3}, thinning mean {:.3}, KS D = {:.4}, p = {:.3}",
        c.cluster_mean, c.thinning_mean, c.ks_statistic, c.p_value
    );
    let poisson = HawkesConfig::new(
        cfg.lattice().clone(),
        TemporalKernel::zero(),
        vec![0.5; sites],
        10.0,
        42,
    )?;
    let p = compare_engines(&poisson, 2000)?;
    println!(
        "no excitation: means {:.3} / {:.3}, expected {:.1}",
        p.cluster_mean,
        p.thinning_mean,
        0.5 * 10.0 * sites as f64
    );

    let log = simulate_cluster(&cfg, 0)?;
    let grid: Vec<f64> = (0..=5).map(|k| 2.0 * k as f64).collect();
    let trace = intensity_trace(&cfg, &log, &grid)?;
    println!(
        "\nreplica 0: {} events; intensity at site 0:",
        log.total_events()
    );
    for (t, row) in grid.iter().zip(&trace) {
        println!("  t = {t:>4}: {:.4}", row[8]);
    }
    Ok(())
}
