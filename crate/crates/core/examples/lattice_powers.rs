//! Powers of the long-range lattice kernel: decay of the sup-row ℓ² mass and
//! flattening of a periodic baseline.

use hawkes_longrange::lattice::{LatticeKernel, Window};
use hawkes_longrange::stable::StableDensity;

fn main() -> hawkes_longrange::Result<()> {
    let alpha = 1.5;
    let lattice = LatticeKernel::new(alpha, 2048, Window::Circulant)?;
    println!(
        "c(alpha) = {:.8}, mass outside the window folded back: {:.3e}",
        lattice.c_alpha(),
        lattice.tail_mass()
    );

    let eps = lattice.row_sq_sup(64)?;
    let p0 = StableDensity::calibrated(alpha)?.density_at_zero();
    println!(
        "\n{:>4} {:>14} {:>14}   (p1(0) = {p0:.6})",
        "n", "eps_n", "n^(1/a) eps_n"
    );
    for n in [1usize, 2, 4, 8, 16, 32, 64] {
        let e = eps[n - 1];
        println!(
            "{n:>4} {e:>14.6e} {:>14.6}",
            (n as f64).powf(1.0 / alpha) * e
        );
    }

    let wide = LatticeKernel::new(alpha, 512, Window::Circulant)?;
    let even: Vec<f64> = (0..wide.sites())
        .map(|i| ((i as i64 - 512) % 2 == 0) as u8 as f64)
        .collect();
    let flow = wide.mu_average_flow(&even, 64)?;
    println!("\nmean of mu = {:.6}", flow.mean);
    for n in [1usize, 4, 16, 64] {
        let dev = flow.iterates[n - 1]
            .iter()
            .map(|v| (v - flow.mean).abs())
            .fold(0.0, f64::max);
        println!("max |A^{n} mu - mean| = {dev:.4e}");
    }

    let restricted = LatticeKernel::new(alpha, 64, Window::Restricted)?;
    let mut x = vec![0.0; restricted.sites()];
    x[64] = 1.0;
    for _ in 0..4 {
        x = restricted.apply(&x)?;
    }
    println!(
        "\nrestricted window: A^4 applied to a unit mass at site 0 keeps {:.6}",
        x.iter().sum::<f64>()
    );
    Ok(())
}
