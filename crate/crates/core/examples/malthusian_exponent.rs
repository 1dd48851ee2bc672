//! Regime, Malthusian exponent θ and the growth constant 1/(θ² m̄) for a few kernels.

use hawkes_longrange::kernel::{Regime, TemporalKernel};

fn main() -> hawkes_longrange::Result<()> {
    let kernels = [
        (
            "exponential a=0.5 b=1",
            TemporalKernel::exponential(0.5, 1.0)?,
        ),
        (
            "exponential a=2 b=1",
            TemporalKernel::exponential(2.0, 1.0)?,
        ),
        (
            "exponential a=3 b=0.5",
            TemporalKernel::exponential(3.0, 0.5)?,
        ),
        (
            "power c0=2 beta=2.5 cut=40",
            TemporalKernel::truncated_power(2.0, 2.5, 40.0)?,
        ),
        (
            "tabulated hump",
            TemporalKernel::tabulated(
                vec![0.0, 0.5, 1.0, 2.0, 4.0],
                vec![0.0, 1.2, 1.6, 0.8, 0.0],
            )?,
        ),
    ];
    println!(
        "{:<30} {:>10} {:>14} {:>12} {:>12} {:>12}",
        "kernel", "I", "regime", "theta", "m_bar", "1/(θ²m̄)"
    );
    for (name, k) in &kernels {
        let a = k.analyze()?;
        match (a.regime, a.theta, a.m_bar) {
            (Regime::SuperCritical, Some(theta), Some(m_bar)) => println!(
                "{name:<30} {:>10.6} {:>14} {theta:>12.8} {m_bar:>12.8} {:>12.6}",
                a.integral,
                format!("{:?}", a.regime),
                1.0 / (theta * theta * m_bar)
            ),
            _ => println!(
                "{name:<30} {:>10.6} {:>14}",
                a.integral,
                format!("{:?}", a.regime)
            ),
        }
    }
    // L_φ(θ) = 1 at the root
    let k = &kernels[3].1;
    let theta = k.solve_theta()?;
    println!(
        "\nL_phi(theta) - 1 for the power kernel: {:.3e}",
        k.laplace(theta)? - 1.0
    );
    Ok(())
}
