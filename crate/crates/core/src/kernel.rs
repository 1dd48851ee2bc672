//! The temporal interaction kernel φ, its integral, Laplace transform, the
//! Malthusian exponent θ and convolution powers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

/// Relative tolerance for quadrature of kernel functionals.
const QUAD_REL: f64 = 1e-12;
/// Band around I = 1 reported as critical.
pub const CRITICAL_TOL: f64 = 1e-9;

/// Functional form of φ on [0, ∞).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelFamily {
    /// φ(t) = a e^{-bt}.
    Exponential { a: f64, b: f64 },
    /// φ(t) = c0 (1 + t)^{-β} on [0, t_cut], zero afterwards.
    TruncatedPowerTime { c0: f64, beta: f64, t_cut: f64 },
    /// Linear interpolation of `values` on `grid` (starting at 0), zero past the last node.
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
}

/// Certificate φ(t) ≤ C e^{κt}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubExpBound {
    pub c: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TemporalKernel {
    family: KernelFamily,
    bound: SubExpBound,
    /// Cumulative integral at the tabulation nodes (Tabulated only).
    cumulative: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    SubCritical,
    Critical,
    SuperCritical,
}

/// Summary constants of a kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelAnalysis {
    /// I = ∫ φ.
    pub integral: f64,
    /// Root of L_φ(θ) = 1, super-critical kernels only.
    pub theta: Option<f64>,
    /// ∫ t φ(t) e^{-θt} dt, present with `theta`.
    pub m_bar: Option<f64>,
    pub regime: Regime,
}

/// Uniform grid t_k = k h, k = 0..len.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub h: f64,
    pub len: usize,
}

impl TimeGrid {
    /// Grid covering [0, horizon] with step `h`; `horizon / h` must be an integer
    /// up to rounding.
    pub fn new(horizon: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) || !(horizon >= 0.0) || !h.is_finite() || !horizon.is_finite() {
            return Err(Error::domain(format!(
                "bad grid: horizon {horizon}, step {h}"
            )));
        }
        let steps = horizon / h;
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-6 * steps.max(1.0) {
            return Err(Error::domain(format!(
                "horizon {horizon} is not an integer multiple of step {h}"
            )));
        }
        Ok(TimeGrid {
            h,
            len: rounded as usize + 1,
        })
    }

    /// Validates that `points` is a uniform grid starting at 0.
    pub fn from_points(points: &[f64]) -> Result<Self> {
        if points.len() < 2 || points[0] != 0.0 {
            return Err(Error::domain(
                "grid must start at 0 and have at least two points",
            ));
        }
        let h = points[1] - points[0];
        if !(h > 0.0) {
            return Err(Error::domain("grid must be increasing"));
        }
        for (k, &t) in points.iter().enumerate() {
            if (t - k as f64 * h).abs() > 1e-9 * h.max(t) {
                return Err(Error::domain(format!("non-uniform grid at index {k}")));
            }
        }
        Ok(TimeGrid {
            h,
            len: points.len(),
        })
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.h
    }

    pub fn horizon(&self) -> f64 {
        self.time(self.len - 1)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|k| self.time(k)).collect()
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl TemporalKernel {
    pub fn exponential(a: f64, b: f64) -> Result<Self> {
        check_positive("a", a)?;
        check_positive("b", b)?;
        Self::new(KernelFamily::Exponential { a, b })
    }

    pub fn truncated_power(c0: f64, beta: f64, t_cut: f64) -> Result<Self> {
        check_positive("c0", c0)?;
        check_positive("t_cut", t_cut)?;
        if !(beta > 1.0) || !beta.is_finite() {
            return Err(Error::domain(format!("beta must exceed 1, got {beta}")));
        }
        Self::new(KernelFamily::TruncatedPowerTime { c0, beta, t_cut })
    }

    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(KernelFamily::Tabulated { grid, values })
    }

    /// φ ≡ 0, represented as an all-zero table.
    pub fn zero() -> Self {
        Self::tabulated(vec![0.0, 1.0], vec![0.0, 0.0]).expect("valid table")
    }

    /// Builds a kernel with its default certificate: C = sup φ, κ = 0.
    pub fn new(family: KernelFamily) -> Result<Self> {
        let (bound, cumulative) = match &family {
            KernelFamily::Exponential { a, b } => {
                check_positive("a", *a)?;
                check_positive("b", *b)?;
                (SubExpBound { c: *a, kappa: 0.0 }, Vec::new())
            }
            KernelFamily::TruncatedPowerTime { c0, beta, t_cut } => {
                check_positive("c0", *c0)?;
                check_positive("t_cut", *t_cut)?;
                if !(*beta > 1.0) {
                    return Err(Error::domain(format!("beta must exceed 1, got {beta}")));
                }
                (SubExpBound { c: *c0, kappa: 0.0 }, Vec::new())
            }
            KernelFamily::Tabulated { grid, values } => {
                if grid.len() < 2 || grid.len() != values.len() {
                    return Err(Error::domain(
                        "table needs at least two nodes and matching lengths",
                    ));
                }
                if grid[0] != 0.0 {
                    return Err(Error::domain("table grid must start at t = 0"));
                }
                if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|t| !t.is_finite()) {
                    return Err(Error::domain(
                        "table grid must be strictly increasing and finite",
                    ));
                }
                if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                    return Err(Error::Analysis(
                        "kernel values must be finite and non-negative".into(),
                    ));
                }
                let mut cum = Vec::with_capacity(grid.len());
                cum.push(0.0);
                for k in 1..grid.len() {
                    let seg = 0.5 * (values[k - 1] + values[k]) * (grid[k] - grid[k - 1]);
                    cum.push(cum[k - 1] + seg);
                }
                let sup = values.iter().cloned().fold(0.0, f64::max);
                let c = if sup > 0.0 { sup } else { 1.0 };
                (SubExpBound { c, kappa: 0.0 }, cum)
            }
        };
        Ok(TemporalKernel {
            family,
            bound,
            cumulative,
        })
    }

    /// Replaces the certificate, checking φ(t) ≤ C e^{κt} on an evaluation grid.
    pub fn with_bound(mut self, c: f64, kappa: f64) -> Result<Self> {
        if !(c > 0.0) || !(kappa >= 0.0) || !c.is_finite() || !kappa.is_finite() {
            return Err(Error::domain(format!(
                "bound needs C > 0, κ ≥ 0; got C={c}, κ={kappa}"
            )));
        }
        let bound = SubExpBound { c, kappa };
        for t in self.check_points() {
            let v = self.phi(t);
            if v > c * (kappa * t).exp() * (1.0 + 1e-12) {
                return Err(Error::Analysis(format!(
                    "sub-exponential bound violated at t = {t}: φ = {v} > {c}·e^({kappa}·t)"
                )));
            }
        }
        self.bound = bound;
        Ok(self)
    }

    fn check_points(&self) -> Vec<f64> {
        let end = self.support_end().unwrap_or_else(|| match self.family {
            KernelFamily::Exponential { b, .. } => 50.0 / b,
            _ => unreachable!(),
        });
        let mut pts: Vec<f64> = (0..=2000).map(|k| end * k as f64 / 2000.0).collect();
        if let KernelFamily::Tabulated { grid, .. } = &self.family {
            pts.extend_from_slice(grid);
        }
        pts
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn bound(&self) -> SubExpBound {
        self.bound
    }

    /// End of the support, or `None` when φ > 0 on all of [0, ∞).
    pub fn support_end(&self) -> Option<f64> {
        match &self.family {
            KernelFamily::Exponential { .. } => None,
            KernelFamily::TruncatedPowerTime { t_cut, .. } => Some(*t_cut),
            KernelFamily::Tabulated { grid, .. } => Some(*grid.last().expect("nonempty")),
        }
    }

    /// True when φ is nonincreasing on [0, ∞).
    pub fn is_nonincreasing(&self) -> bool {
        match &self.family {
            KernelFamily::Exponential { .. } | KernelFamily::TruncatedPowerTime { .. } => true,
            KernelFamily::Tabulated { values, .. } => values.windows(2).all(|w| w[1] <= w[0]),
        }
    }

    /// True when φ vanishes identically.
    pub fn is_zero(&self) -> bool {
        match &self.family {
            KernelFamily::Tabulated { values, .. } => values.iter().all(|&v| v == 0.0),
            _ => false,
        }
    }

    /// φ(t) without argument checks; 0 for t < 0.
    #[inline]
    pub fn phi(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match &self.family {
            KernelFamily::Exponential { a, b } => a * (-b * t).exp(),
            KernelFamily::TruncatedPowerTime { c0, beta, t_cut } => {
                if t <= *t_cut {
                    c0 * (1.0 + t).powf(-beta)
                } else {
                    0.0
                }
            }
            KernelFamily::Tabulated { grid, values } => {
                let last = grid.len() - 1;
                if t > grid[last] {
                    return 0.0;
                }
                let k = grid.partition_point(|&g| g <= t).clamp(1, last);
                let (t0, t1) = (grid[k - 1], grid[k]);
                let w = (t - t0) / (t1 - t0);
                values[k - 1] * (1.0 - w) + values[k] * w
            }
        }
    }

    /// φ(t), rejecting negative or non-finite arguments.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::domain(format!("φ evaluated at t = {t}")));
        }
        Ok(self.phi(t))
    }

    fn quadrature<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        match &self.family {
            KernelFamily::Exponential { .. } => {
                unreachable!("closed forms cover the exponential family")
            }
            KernelFamily::TruncatedPowerTime { t_cut, .. } => {
                // geometric breakpoints follow the algebraic decay
                let mut nodes = vec![0.0];
                let mut t = 1.0;
                while t < *t_cut {
                    nodes.push(t);
                    t *= 2.0;
                }
                nodes.push(*t_cut);
                quad::integrate_piecewise(f, &nodes, 1e-16, QUAD_REL).value
            }
            KernelFamily::Tabulated { grid, .. } => {
                quad::integrate_piecewise(f, grid, 1e-16, QUAD_REL).value
            }
        }
    }

    /// I = ∫_0^∞ φ.
    pub fn integral(&self) -> f64 {
        match &self.family {
            KernelFamily::Exponential { a, b } => a / b,
            _ => self.quadrature(|t| self.phi(t)),
        }
    }

    /// Smallest p for which the Laplace integral is known to converge
    /// (exclusive); −∞ for compactly supported kernels.
    pub fn laplace_abscissa(&self) -> f64 {
        match &self.family {
            KernelFamily::Exponential { b, .. } => -b,
            _ => f64::NEG_INFINITY,
        }
    }

    /// L_φ(p) = ∫_0^∞ φ(t) e^{-pt} dt.
    pub fn laplace(&self, p: f64) -> Result<f64> {
        if !(p > self.laplace_abscissa()) || p.is_nan() {
            return Err(Error::domain(format!(
                "Laplace transform diverges at p = {p} (abscissa {})",
                self.laplace_abscissa()
            )));
        }
        Ok(match &self.family {
            KernelFamily::Exponential { a, b } => a / (b + p),
            _ => self.quadrature(|t| self.phi(t) * (-p * t).exp()),
        })
    }

    /// ∫ t φ(t) e^{-pt} dt = −L_φ'(p), without the κ check.
    fn first_moment_tilted(&self, p: f64) -> f64 {
        match &self.family {
            KernelFamily::Exponential { a, b } => a / ((b + p) * (b + p)),
            _ => self.quadrature(|t| t * self.phi(t) * (-p * t).exp()),
        }
    }

    /// m̄ = ∫ t φ(t) e^{-θt} dt.
    pub fn m_bar(&self, theta: f64) -> Result<f64> {
        if !(theta > self.bound.kappa) {
            return Err(Error::domain(format!(
                "m̄ requires θ > κ; θ = {theta}, κ = {}",
                self.bound.kappa
            )));
        }
        Ok(self.first_moment_tilted(theta))
    }

    pub fn regime(&self) -> Regime {
        regime_of(self.integral())
    }

    /// The Malthusian exponent: the root of L_φ(θ) = 1 for a super-critical kernel.
    pub fn solve_theta(&self) -> Result<f64> {
        let integral = self.integral();
        if regime_of(integral) != Regime::SuperCritical {
            return Err(Error::Regime(format!(
                "θ exists only for I > 1; I = {integral}"
            )));
        }
        let kappa = self.bound.kappa;
        let excess = |p: f64| self.laplace(p).map(|v| v - 1.0);
        let mut lo = kappa + 1e-6;
        if excess(lo)? <= 0.0 {
            return Err(Error::Hypothesis(format!(
                "L_φ(κ + 1e-6) ≤ 1, so θ ≤ κ = {kappa}; the growth law needs κ < θ"
            )));
        }
        let mut hi = kappa + 1.0;
        let mut doublings = 0;
        while excess(hi)? >= 0.0 {
            hi = kappa + 2.0 * (hi - kappa);
            doublings += 1;
            if doublings > 200 {
                return Err(Error::Accuracy("no upper bracket for θ".into()));
            }
        }
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if excess(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut theta = 0.5 * (lo + hi);
        // one Newton polish; L' = -(tilted first moment)
        let slope = self.first_moment_tilted(theta);
        if slope > 0.0 {
            let step = excess(theta)? / slope;
            if (theta + step) > kappa {
                theta += step;
            }
        }
        let residual = excess(theta)?.abs();
        if residual > 1e-10 {
            return Err(Error::Accuracy(format!(
                "|L_φ(θ) − 1| = {residual:e} after solve"
            )));
        }
        if !(kappa < theta) {
            return Err(Error::Hypothesis(format!("κ = {kappa} ≥ θ = {theta}")));
        }
        Ok(theta)
    }

    pub fn analyze(&self) -> Result<KernelAnalysis> {
        let integral = self.integral();
        let regime = regime_of(integral);
        let (theta, m_bar) = if regime == Regime::SuperCritical {
            let theta = self.solve_theta()?;
            (Some(theta), Some(self.m_bar(theta)?))
        } else {
            (None, None)
        };
        Ok(KernelAnalysis {
            integral,
            theta,
            m_bar,
            regime,
        })
    }

    /// φ^{⋆n} on `grid` by iterated trapezoidal convolution.
    pub fn conv_power(&self, n: usize, grid: &TimeGrid) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::domain("convolution power must be at least 1"));
        }
        let base: Vec<f64> = (0..grid.len).map(|k| self.phi(grid.time(k))).collect();
        let mut current = base.clone();
        for _ in 1..n {
            current = trapezoid_convolve(&current, &base, grid.h);
        }
        Ok(current)
    }

    /// F(u) = ∫_0^u φ, in closed form for every family.
    pub fn cumulative(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        match &self.family {
            KernelFamily::Exponential { a, b } => -(a / b) * (-b * u).exp_m1(),
            KernelFamily::TruncatedPowerTime { c0, beta, t_cut } => {
                let u = u.min(*t_cut);
                c0 * (1.0 - (1.0 + u).powf(1.0 - beta)) / (beta - 1.0)
            }
            KernelFamily::Tabulated { grid, values } => {
                let last = grid.len() - 1;
                if u >= grid[last] {
                    return self.cumulative[last];
                }
                let k = grid.partition_point(|&g| g <= u).clamp(1, last);
                let (t0, t1) = (grid[k - 1], grid[k]);
                let slope = (values[k] - values[k - 1]) / (t1 - t0);
                let tau = u - t0;
                self.cumulative[k - 1] + values[k - 1] * tau + 0.5 * slope * tau * tau
            }
        }
    }

    /// Inverse of [`cumulative`](Self::cumulative) on [0, I).
    pub fn inverse_cumulative(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match &self.family {
            KernelFamily::Exponential { a, b } => -(-y * b / a).ln_1p() / b,
            KernelFamily::TruncatedPowerTime { c0, beta, t_cut } => {
                let base = 1.0 - y * (beta - 1.0) / c0;
                (base.powf(1.0 / (1.0 - beta)) - 1.0).min(*t_cut)
            }
            KernelFamily::Tabulated { grid, values } => {
                let cum = &self.cumulative;
                let last = grid.len() - 1;
                if y >= cum[last] {
                    return grid[last];
                }
                let k = cum.partition_point(|&c| c <= y).clamp(1, last);
                let (t0, t1) = (grid[k - 1], grid[k]);
                let v0 = values[k - 1];
                let slope = (values[k] - v0) / (t1 - t0);
                let r = y - cum[k - 1];
                // root of slope/2 τ² + v0 τ − r = 0 in cancellation-free form
                let disc = (v0 * v0 + 2.0 * slope * r).max(0.0);
                let denom = v0 + disc.sqrt();
                let tau = if denom > 0.0 { 2.0 * r / denom } else { 0.0 };
                (t0 + tau).min(t1)
            }
        }
    }
}

fn regime_of(integral: f64) -> Regime {
    if (integral - 1.0).abs() < CRITICAL_TOL {
        Regime::Critical
    } else if integral < 1.0 {
        Regime::SubCritical
    } else {
        Regime::SuperCritical
    }
}

/// (f ⋆ g)(t_k) = ∫_0^{t_k} f(t_k − s) g(s) ds by the trapezoid rule on a uniform grid.
pub fn trapezoid_convolve(f: &[f64], g: &[f64], h: f64) -> Vec<f64> {
    let n = f.len().min(g.len());
    let mut out = vec![0.0; n];
    for k in 1..n {
        let mut acc = 0.5 * (f[k] * g[0] + f[0] * g[k]);
        for j in 1..k {
            acc += f[k - j] * g[j];
        }
        out[k] = acc * h;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let k = TemporalKernel::exponential(2.0, 1.0).unwrap();
        assert_eq!(k.eval(0.0).unwrap(), 2.0);
        assert!((k.eval(2f64.ln()).unwrap() - 1.0).abs() < 1e-15);
        assert!(k.eval(-1.0).is_err());
        let tab = TemporalKernel::tabulated(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.25]).unwrap();
        assert_eq!(tab.eval(2.5).unwrap(), 0.0);
        assert!((tab.eval(1.5).unwrap() - 0.375).abs() < 1e-15);
    }

    #[test]
    fn integral_examples() {
        assert_eq!(
            TemporalKernel::exponential(0.5, 1.0).unwrap().integral(),
            0.5
        );
        assert_eq!(
            TemporalKernel::exponential(2.0, 1.0).unwrap().integral(),
            2.0
        );
        assert_eq!(TemporalKernel::zero().integral(), 0.0);
    }

    #[test]
    fn power_kernel_integral_against_closed_form() {
        let k = TemporalKernel::truncated_power(0.8, 2.5, 40.0).unwrap();
        let exact = 0.8 * (1.0 - 41f64.powf(-1.5)) / 1.5;
        assert!((k.integral() - exact).abs() < 1e-10 * exact);
        assert!((k.cumulative(40.0) - exact).abs() < 1e-14);
    }

    #[test]
    fn laplace_examples() {
        let k = TemporalKernel::exponential(2.0, 1.0).unwrap();
        assert_eq!(k.laplace(1.0).unwrap(), 1.0);
        assert!(k.laplace(1e6).unwrap() < 1e-3);
        assert_eq!(TemporalKernel::zero().laplace(1.0).unwrap(), 0.0);
        assert!(k.laplace(-1.0).is_err());
    }

    #[test]
    fn theta_examples() {
        let k = TemporalKernel::exponential(2.0, 1.0).unwrap();
        assert!((k.solve_theta().unwrap() - 1.0).abs() < 1e-10);
        let k = TemporalKernel::exponential(3.0, 1.0).unwrap();
        assert!((k.solve_theta().unwrap() - 2.0).abs() < 1e-10);
        let k = TemporalKernel::exponential(0.5, 1.0).unwrap();
        assert!(matches!(k.solve_theta(), Err(Error::Regime(_))));
    }

    #[test]
    fn theta_rejects_large_kappa() {
        // θ = 1, but a certificate with κ = 1.5 > θ
        let k = TemporalKernel::exponential(2.0, 1.0)
            .unwrap()
            .with_bound(2.0, 1.5)
            .unwrap();
        assert!(matches!(k.solve_theta(), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn critical_kernel_is_rejected() {
        let k = TemporalKernel::exponential(1.0, 1.0).unwrap();
        assert_eq!(k.regime(), Regime::Critical);
        assert!(matches!(k.solve_theta(), Err(Error::Regime(_))));
    }

    #[test]
    fn m_bar_examples() {
        let k = TemporalKernel::exponential(2.0, 1.0).unwrap();
        assert!((k.m_bar(1.0).unwrap() - 0.5).abs() < 1e-15);
        let k = TemporalKernel::exponential(3.0, 1.0).unwrap();
        assert!((k.m_bar(2.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(TemporalKernel::zero().m_bar(1.0).unwrap(), 0.0);
        assert!(TemporalKernel::zero().m_bar(0.0).is_err());
    }

    #[test]
    fn analysis_consistency() {
        let a = TemporalKernel::exponential(2.0, 1.0)
            .unwrap()
            .analyze()
            .unwrap();
        assert_eq!(a.regime, Regime::SuperCritical);
        assert!(a.theta.is_some() && a.m_bar.is_some());
        let a = TemporalKernel::exponential(0.5, 1.0)
            .unwrap()
            .analyze()
            .unwrap();
        assert_eq!(a.regime, Regime::SubCritical);
        assert!(a.theta.is_none() && a.m_bar.is_none());
    }

    #[test]
    fn bound_violation_is_an_analysis_error() {
        let k = TemporalKernel::exponential(2.0, 1.0).unwrap();
        assert!(matches!(k.with_bound(1.0, 0.0), Err(Error::Analysis(_))));
        let tab = TemporalKernel::tabulated(vec![0.0, 1.0], vec![1.0, -0.5]);
        assert!(matches!(tab, Err(Error::Analysis(_))));
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::from_points(&[0.0, 0.1, 0.2, 0.3]).is_ok());
        assert!(TimeGrid::from_points(&[0.0, 0.1, 0.25]).is_err());
        assert!(TimeGrid::new(1.0, 0.3).is_err());
        assert_eq!(TimeGrid::new(1.0, 0.25).unwrap().len, 5);
    }

    #[test]
    fn conv_power_one_is_phi() {
        let k = TemporalKernel::exponential(2.0, 1.0).unwrap();
        let g = TimeGrid::new(2.0, 0.01).unwrap();
        let v = k.conv_power(1, &g).unwrap();
        for (i, t) in g.points().into_iter().enumerate() {
            assert_eq!(v[i], k.phi(t));
        }
    }

    #[test]
    fn inverse_cumulative_roundtrip() {
        let kernels = [
            TemporalKernel::exponential(2.0, 1.3).unwrap(),
            TemporalKernel::truncated_power(0.6, 1.8, 25.0).unwrap(),
            TemporalKernel::tabulated(vec![0.0, 0.5, 2.0, 3.0], vec![1.0, 0.2, 0.7, 0.0]).unwrap(),
        ];
        for k in &kernels {
            for &u in &[0.01, 0.3, 1.0, 2.2, 2.9] {
                let y = k.cumulative(u);
                assert!((k.inverse_cumulative(y) - u).abs() < 1e-9, "{k:?} at {u}");
            }
        }
    }

    #[test]
    fn cumulative_matches_quadrature() {
        let tab =
            TemporalKernel::tabulated(vec![0.0, 0.5, 2.0, 3.0], vec![1.0, 0.2, 0.7, 0.0]).unwrap();
        assert!((tab.cumulative(10.0) - tab.integral()).abs() < 1e-12);
    }
}
