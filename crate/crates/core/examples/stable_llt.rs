//! Local limit theorem for the heavy-tailed lattice walk: sup and total
//! variation distance to the calibrated stable density as n grows.

use hawkes_longrange::stable::{llt_errors, StableDensity, WalkOptions};

fn main() -> hawkes_longrange::Result<()> {
    for alpha in [0.5, 1.5] {
        let density = StableDensity::calibrated(alpha)?;
        println!(
            "alpha = {alpha}: c = {:.6}, p(0) = {:.6}",
            density.c_scale(),
            density.density_at_zero()
        );
        // with α < 1 the walk spreads like n^{1/α}; a window of 16 n^{1/α} still
        // leaves about 15% of the mass outside
        let opts = WalkOptions {
            max_deficit: if alpha < 1.0 { 0.25 } else { 0.01 },
            ..WalkOptions::default()
        };
        println!(
            "{:>6} {:>9} {:>14} {:>12} {:>10}",
            "n", "M", "n^(1/a) sup", "tv", "deficit"
        );
        for n in [16u64, 64, 256] {
            let m = (16.0 * (n as f64).powf(1.0 / alpha)) as usize;
            let e = llt_errors(alpha, n, m, &opts)?;
            println!(
                "{:>6} {:>9} {:>14.6e} {:>12.6e} {:>10.4e}",
                n, m, e.rescaled_sup_error, e.tv_error, e.deficit
            );
        }
    }
    Ok(())
}
