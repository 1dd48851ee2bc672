//! Mean-field first moments: the Volterra solver against the exponential
//! closed form, its O(h²) order, the super-critical growth constant and the
//! Neumann tail that controls the correction.

use hawkes_longrange::kernel::TemporalKernel;
use hawkes_longrange::lattice::{LatticeKernel, Window};
use hawkes_longrange::meanfield::{
    exponential_mean_field, neumann_tail_check, solve_volterra, subcritical_limit,
    supercritical_profile,
};

fn main() -> hawkes_longrange::Result<()> {
    let lattice = LatticeKernel::new(1.5, 4, Window::Circulant)?;
    let mu = vec![1.0; lattice.sites()];

    let mild = TemporalKernel::exponential(0.5, 1.0)?;
    let sup_error = |h: f64| -> hawkes_longrange::Result<f64> {
        let sol = solve_volterra(&mild, &lattice, &mu, 8.0, h)?;
        Ok((0..sol.grid().len)
            .map(|k| {
                (sol.x_at(k, 4) - exponential_mean_field(0.5, 1.0, 1.0, sol.grid().time(k)).1).abs()
            })
            .fold(0.0, f64::max))
    };
    let (e1, e2) = (sup_error(0.04)?, sup_error(0.02)?);
    println!(
        "sup error h=0.04: {e1:.3e}, h=0.02: {e2:.3e}, ratio {:.4}",
        e1 / e2
    );
    let limit = subcritical_limit(0.5, &lattice, &mu, 1e-12)?;
    println!(
        "sub-critical rate limit at site 0: {:.10} ({} Neumann terms)",
        limit.limit[4], limit.n_terms
    );

    let growth = TemporalKernel::exponential(2.0, 1.0)?;
    let theta = growth.solve_theta()?;
    for horizon in [5.0, 10.0, 15.0, 20.0] {
        let sol = solve_volterra(&growth, &lattice, &mu, horizon, 0.005)?;
        let p = supercritical_profile(&sol, theta)?;
        println!(
            "T = {horizon:>4}: e^(-T) m_T = {:.6}  (constant {:.1}, closed form {:.6})",
            p.rescaled[4],
            p.theory,
            exponential_mean_field(2.0, 1.0, 1.0, horizon).0 * (-horizon).exp()
        );
    }

    let eps: Vec<f64> = LatticeKernel::new(1.5, 2048, Window::Circulant)?
        .row_sq_sup(128)?
        .iter()
        .map(|v| v.sqrt())
        .collect();
    for horizon in [5.0, 10.0, 20.0] {
        let tail = neumann_tail_check(&growth, theta, &eps, horizon, 0.01)?;
        println!(
            "Neumann tail at T = {horizon:>4}: {:.6e} (remainder {:.1e})",
            tail.value, tail.remainder
        );
    }
    Ok(())
}
