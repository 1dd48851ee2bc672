//! First-moment equations: the Volterra system for x_t = E[λ_t] and
//! m_t = E[Z_t], the sub-critical Neumann limit and the super-critical
//! growth profile.

use crate::error::{Error, Result};
use crate::kernel::{trapezoid_convolve, Regime, TemporalKernel, TimeGrid};
use crate::lattice::LatticeKernel;

/// ln(1e300): the solver stops once x_t would exceed 1e300.
const LN_OVERFLOW: f64 = 690.775_527_898_213_7;

/// Solution of the mean-field system on a uniform grid.
///
/// Values are stored as x_t e^{-rt} and m_t e^{-rt} with `growth_rate` r (zero
/// unless the kernel is super-critical), so long super-critical horizons do
/// not overflow.
#[derive(Debug, Clone)]
pub struct MeanFieldSolution {
    grid: TimeGrid,
    sites: usize,
    growth_rate: f64,
    x_scaled: Vec<f64>,
    m_scaled: Vec<f64>,
    kernel: TemporalKernel,
    mu: Vec<f64>,
}

impl MeanFieldSolution {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn kernel(&self) -> &TemporalKernel {
        &self.kernel
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Exponential rate factored out of the stored values.
    pub fn growth_rate(&self) -> f64 {
        self.growth_rate
    }

    fn unscale(&self, k: usize) -> f64 {
        (self.growth_rate * self.grid.time(k)).exp()
    }

    /// x at grid index `k` for every site.
    pub fn x(&self, k: usize) -> Vec<f64> {
        let s = self.unscale(k);
        self.x_scaled[k * self.sites..(k + 1) * self.sites]
            .iter()
            .map(|v| v * s)
            .collect()
    }

    /// m at grid index `k` for every site.
    pub fn m(&self, k: usize) -> Vec<f64> {
        let s = self.unscale(k);
        self.m_scaled[k * self.sites..(k + 1) * self.sites]
            .iter()
            .map(|v| v * s)
            .collect()
    }

    pub fn x_at(&self, k: usize, site: usize) -> f64 {
        self.x_scaled[k * self.sites + site] * self.unscale(k)
    }

    pub fn m_at(&self, k: usize, site: usize) -> f64 {
        self.m_scaled[k * self.sites + site] * self.unscale(k)
    }

    /// m_t e^{-θt} at grid index `k`, computed without forming m_t.
    pub fn m_discounted(&self, k: usize, theta: f64) -> Vec<f64> {
        let s = ((self.growth_rate - theta) * self.grid.time(k)).exp();
        self.m_scaled[k * self.sites..(k + 1) * self.sites]
            .iter()
            .map(|v| v * s)
            .collect()
    }

    /// x_t e^{-θt} at grid index `k`.
    pub fn x_discounted(&self, k: usize, theta: f64) -> Vec<f64> {
        let s = ((self.growth_rate - theta) * self.grid.time(k)).exp();
        self.x_scaled[k * self.sites..(k + 1) * self.sites]
            .iter()
            .map(|v| v * s)
            .collect()
    }

    /// Grid index nearest to time `t`.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let k = (t / self.grid.h).round();
        if !(k >= 0.0) || k as usize >= self.grid.len {
            return Err(Error::domain(format!(
                "time {t} outside the solved horizon"
            )));
        }
        Ok(k as usize)
    }
}

/// Solves x_t = μ + ∫_0^t φ(t − s) A x_s ds by the trapezoid rule and
/// m_t = ∫_0^t x_s ds by cumulative trapezoid.
pub fn solve_volterra(
    kernel: &TemporalKernel,
    lattice: &LatticeKernel,
    mu: &[f64],
    horizon: f64,
    h: f64,
) -> Result<MeanFieldSolution> {
    let grid = TimeGrid::new(horizon, h)?;
    let n = lattice.sites();
    if mu.len() != n {
        return Err(Error::domain(format!(
            "mu has {} entries, window has {n} sites",
            mu.len()
        )));
    }
    if mu.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::domain("mu must be finite and non-negative"));
    }
    // Any rate works for the change of variables; θ keeps the stored values O(1).
    let rate = match kernel.regime() {
        Regime::SuperCritical => kernel.solve_theta().unwrap_or(0.0),
        _ => 0.0,
    };
    let steps = grid.len;
    let tilted: Vec<f64> = (0..steps)
        .map(|k| {
            let t = grid.time(k);
            kernel.phi(t) * (-rate * t).exp()
        })
        .collect();
    let diag = 0.5 * h * tilted[0];
    if diag >= 1.0 {
        return Err(Error::domain(format!(
            "step h = {h} too coarse: h φ(0) / 2 = {diag} ≥ 1"
        )));
    }

    let mut x = vec![0.0; steps * n];
    let mut m = vec![0.0; steps * n];
    x[..n].copy_from_slice(mu);
    let decay = (-rate * h).exp();
    let mut memory = vec![0.0; n];
    for k in 1..steps {
        let t = grid.time(k);
        memory.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..k {
            let w = if j == 0 { 0.5 } else { 1.0 } * tilted[k - j];
            if w == 0.0 {
                continue;
            }
            let row = &x[j * n..(j + 1) * n];
            for (acc, &v) in memory.iter_mut().zip(row) {
                *acc += w * v;
            }
        }
        let spread = lattice.apply(&memory)?;
        let base = (-rate * t).exp();
        let rhs: Vec<f64> = mu
            .iter()
            .zip(&spread)
            .map(|(u, s)| u * base + h * s)
            .collect();
        // the diagonal term is implicit: x = rhs + (h/2) φ(0) A x
        let mut cur = rhs.clone();
        if diag > 0.0 {
            for _ in 0..200 {
                let ax = lattice.apply(&cur)?;
                let next: Vec<f64> = rhs.iter().zip(&ax).map(|(r, a)| r + diag * a).collect();
                let change = next
                    .iter()
                    .zip(&cur)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                let size = next.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()));
                cur = next;
                if change <= 1e-16 * size {
                    break;
                }
            }
        }
        let peak = cur.iter().cloned().fold(0.0, f64::max);
        if !peak.is_finite() || (peak > 0.0 && peak.ln() + rate * t > LN_OVERFLOW) {
            return Err(Error::Overflow {
                time: t,
                detail: format!("mean intensity reached {peak:e}·e^({rate}·{t})"),
            });
        }
        let (prev, now) = x.split_at_mut(k * n);
        now[..n].copy_from_slice(&cur);
        let prev_x = &prev[(k - 1) * n..];
        for i in 0..n {
            m[k * n + i] = decay * (m[(k - 1) * n + i] + 0.5 * h * prev_x[i]) + 0.5 * h * cur[i];
        }
    }
    Ok(MeanFieldSolution {
        grid,
        sites: n,
        growth_rate: rate,
        x_scaled: x,
        m_scaled: m,
        kernel: kernel.clone(),
        mu: mu.to_vec(),
    })
}

/// Closed-form (m_t, x_t) for φ(t) = a e^{-bt}, constant μ and a stochastic
/// spatial operator.
pub fn exponential_mean_field(a: f64, b: f64, mu: f64, t: f64) -> (f64, f64) {
    if (a - b).abs() < 1e-12 * b {
        return (mu * (t + 0.5 * a * t * t), mu * (1.0 + a * t));
    }
    let g = a - b;
    let e = (g * t).exp_m1();
    let x = mu * (b - a * (g * t).exp()) / (b - a);
    let m = mu * (b * t - (a / g) * e) / (b - a);
    (m, x)
}

/// The vector Σ_n I^n A^n μ.
#[derive(Debug, Clone, PartialEq)]
pub struct SubCriticalLimit {
    pub limit: Vec<f64>,
    pub n_terms: usize,
}

/// Neumann series Σ_{n=0}^{N} I^n A^n μ with N set by the geometric remainder
/// I^{N+1} max μ / (1 − I) < tol.
pub fn subcritical_limit(
    integral: f64,
    lattice: &LatticeKernel,
    mu: &[f64],
    tol: f64,
) -> Result<SubCriticalLimit> {
    if !(integral < 1.0) || (integral - 1.0).abs() < crate::kernel::CRITICAL_TOL {
        return Err(Error::Regime(format!(
            "the Neumann limit needs I < 1; I = {integral}"
        )));
    }
    if !(integral >= 0.0) {
        return Err(Error::domain(format!(
            "I must be non-negative, got {integral}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    let peak = mu.iter().cloned().fold(0.0, f64::max);
    let mut n_terms = 0usize;
    let mut remainder = integral * peak / (1.0 - integral);
    while remainder >= tol && integral > 0.0 {
        n_terms += 1;
        remainder *= integral;
    }
    let mut limit = mu.to_vec();
    let mut term = mu.to_vec();
    for _ in 0..n_terms {
        term = lattice.apply(&term)?;
        term.iter_mut().for_each(|v| *v *= integral);
        limit.iter_mut().zip(&term).for_each(|(l, t)| *l += t);
    }
    Ok(SubCriticalLimit { limit, n_terms })
}

/// e^{-θT} m_T per site against the predicted constant μ̄ / (θ² m̄).
#[derive(Debug, Clone, PartialEq)]
pub struct SuperCriticalProfile {
    pub rescaled: Vec<f64>,
    pub theory: f64,
    pub mean_mu: f64,
    pub m_bar: f64,
    /// Set when θT < 3: too few e-foldings for the asymptotics to show.
    pub short_horizon: bool,
}

pub fn supercritical_profile(sol: &MeanFieldSolution, theta: f64) -> Result<SuperCriticalProfile> {
    let m_bar = sol.kernel.m_bar(theta)?;
    let last = sol.grid.len - 1;
    let mean_mu = sol.mu.iter().sum::<f64>() / sol.mu.len() as f64;
    Ok(SuperCriticalProfile {
        rescaled: sol.m_discounted(last, theta),
        theory: mean_mu / (theta * theta * m_bar),
        mean_mu,
        m_bar,
        short_horizon: theta * sol.grid.horizon() < 3.0,
    })
}

/// e^{-θT} Σ_n ε_n ∫_0^T φ^{⋆n}(T − s) e^{θs/2} ds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeumannTail {
    /// `truncated + remainder`.
    pub value: f64,
    /// Sum over the supplied ε_1..ε_N.
    pub truncated: f64,
    /// Bound on n > N, with ε_n ≤ ε_N.
    pub remainder: f64,
}

/// Evaluates the Neumann tail at t = T with tilted kernel powers
/// φ̄^{⋆n}(t) = φ^{⋆n}(t) e^{-θt}. Terms beyond the table are charged
/// ε_N (R̄ − Σ_{n≤N} φ̄^{⋆n}), where R̄ = φ̄ + φ̄ ⋆ R̄ is the renewal density.
pub fn neumann_tail_check(
    kernel: &TemporalKernel,
    theta: f64,
    eps: &[f64],
    horizon: f64,
    h: f64,
) -> Result<NeumannTail> {
    let kappa = kernel.bound().kappa;
    if !(kappa < theta) {
        return Err(Error::Hypothesis(format!("κ = {kappa} ≥ θ = {theta}")));
    }
    if eps.iter().any(|e| !(*e >= 0.0) || !e.is_finite()) {
        return Err(Error::domain("ε table must be finite and non-negative"));
    }
    let grid = TimeGrid::new(horizon, h)?;
    let steps = grid.len;
    let last = steps - 1;
    let tilted: Vec<f64> = (0..steps)
        .map(|k| kernel.phi(grid.time(k)) * (-theta * grid.time(k)).exp())
        .collect();
    // weight of lag T − s: e^{-θ s / 2}, trapezoid over s
    let weights: Vec<f64> = (0..steps)
        .map(|k| {
            let s = grid.time(last - k);
            let w = if k == 0 || k == last { 0.5 } else { 1.0 };
            w * h * (-0.5 * theta * s).exp()
        })
        .collect();
    let integrate = |f: &[f64]| -> f64 { f.iter().zip(&weights).map(|(a, b)| a * b).sum() };

    let mut truncated = 0.0;
    let mut partial = vec![0.0; steps];
    let mut power = tilted.clone();
    for (n, &e) in eps.iter().enumerate() {
        if n > 0 {
            power = trapezoid_convolve(&power, &tilted, h);
        }
        truncated += e * integrate(&power);
        partial.iter_mut().zip(&power).for_each(|(p, v)| *p += v);
    }
    let eta = eps.last().copied().unwrap_or(0.0);
    let remainder = if eta > 0.0 {
        let renewal = renewal_density(&tilted, h);
        let rest: Vec<f64> = renewal
            .iter()
            .zip(&partial)
            .map(|(r, p)| (r - p).max(0.0))
            .collect();
        eta * integrate(&rest)
    } else {
        0.0
    };
    Ok(NeumannTail {
        value: truncated + remainder,
        truncated,
        remainder,
    })
}

/// R = f + f ⋆ R by the trapezoid rule on a uniform grid.
fn renewal_density(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut r = vec![0.0; n];
    r[0] = f[0];
    let diag = 0.5 * h * f[0];
    for k in 1..n {
        let mut acc = 0.5 * f[k] * r[0];
        for j in 1..k {
            acc += f[k - j] * r[j];
        }
        r[k] = (f[k] + h * acc) / (1.0 - diag);
    }
    r
}
