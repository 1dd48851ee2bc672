//! Symmetric α-stable densities and local limit checks for the heavy-tailed
//! lattice walk with step law P(X = j) = c(α) |j|^{-(1+α)}.

use std::f64::consts::PI;

use num_complex::Complex;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fft::{inverse_real, smooth_odd_size};
use crate::lattice::normalization_c;
use crate::quad;
use crate::special::{gamma, ln_gamma, FoldedTail};

/// e^{-u^α} is below this beyond the integration cutoff.
const ENVELOPE_LOG_CUTOFF: f64 = 37.0;
const TAIL_SWITCH: f64 = 20.0;
/// For α < 1 the convergent large-x series takes over from this scaled abscissa.
const SERIES_FROM: f64 = 2.0;

/// Density of the symmetric stable law with characteristic function e^{-|c t|^α}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableDensity {
    alpha: f64,
    c_scale: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::domain(format!(
            "stable index must lie in (0, 2), got {alpha}"
        )));
    }
    if alpha == 1.0 {
        return Err(Error::domain(
            "α = 1 is excluded from stable-law operations (Cauchy case with drift correction)",
        ));
    }
    Ok(())
}

/// Scale c with c^α = c(α) π / (Γ(1+α) sin(πα/2)), matching the lattice step law's
/// characteristic function 1 − c^α |t|^α + o(|t|^α) at the origin.
pub fn calibrated_scale(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let c = normalization_c(alpha)?;
    let c_pow = c * PI / (gamma(1.0 + alpha) * (PI * alpha / 2.0).sin());
    Ok(c_pow.powf(1.0 / alpha))
}

impl StableDensity {
    pub fn new(alpha: f64, c_scale: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(c_scale > 0.0) || !c_scale.is_finite() {
            return Err(Error::domain(format!(
                "scale must be positive, got {c_scale}"
            )));
        }
        Ok(StableDensity { alpha, c_scale })
    }

    /// The law attracting the lattice walk.
    pub fn calibrated(alpha: f64) -> Result<Self> {
        Self::new(alpha, calibrated_scale(alpha)?)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c_scale(&self) -> f64 {
        self.c_scale
    }

    /// The law of n^{1/α} Y: scale multiplied by n^{1/α}.
    pub fn rescaled(&self, n: u64) -> Self {
        StableDensity {
            alpha: self.alpha,
            c_scale: self.c_scale * (n as f64).powf(1.0 / self.alpha),
        }
    }

    /// p(0) = Γ(1/α) / (π α c).
    pub fn density_at_zero(&self) -> f64 {
        gamma(1.0 / self.alpha) / (PI * self.alpha * self.c_scale)
    }

    /// Γ(2/α) / (π α c²), a bound on |p'|.
    pub fn lipschitz_constant_bound(&self) -> f64 {
        gamma(2.0 / self.alpha) / (PI * self.alpha * self.c_scale * self.c_scale)
    }

    /// K with p(x) ~ K |x|^{-(1+α)} as |x| → ∞.
    pub fn tail_constant(&self) -> f64 {
        let a = self.alpha;
        self.c_scale.powf(a) * gamma(1.0 + a) * (PI * a / 2.0).sin() / PI
    }

    /// p(x) = (1/π) ∫_0^∞ e^{-c^α t^α} cos(t x) dt.
    pub fn pdf(&self, x: f64) -> f64 {
        let y = (x / self.c_scale).abs();
        let v = if self.alpha < 1.0 && y >= SERIES_FROM {
            unit_large_x_series(self.alpha, y)
        } else {
            unit_fourier_inversion(self.alpha, y)
        };
        (v / self.c_scale).max(0.0)
    }

    /// p_n(x) = n^{-1/α} p(x n^{-1/α}).
    pub fn pdf_scaled(&self, n: u64, x: f64) -> f64 {
        let s = (n as f64).powf(1.0 / self.alpha);
        self.pdf(x / s) / s
    }

    /// P(|Y| > x). Integrates the density up to |x|/c = 20 and uses the
    /// large-x expansion beyond, where three terms suffice for α > 1.
    pub fn tail_probability(&self, x: f64) -> f64 {
        let y = (x / self.c_scale).abs();
        if y <= TAIL_SWITCH {
            let mut nodes = vec![0.0];
            let mut g = 0.25;
            while g < y {
                nodes.push(g * self.c_scale);
                g *= 1.5;
            }
            nodes.push(y * self.c_scale);
            let body = quad::integrate_piecewise(|u| self.pdf(u), &nodes, 1e-12, 1e-12).value;
            return (1.0 - 2.0 * body).clamp(0.0, 1.0);
        }
        let a = self.alpha;
        let max_terms = if a < 1.0 { 500 } else { 3 };
        let mut sum = 0.0;
        for k in 1..=max_terms {
            let kf = k as f64;
            let sin = (kf * PI * a / 2.0).sin();
            let mag =
                (ln_gamma(kf * a + 1.0) - ln_gamma(kf + 1.0) - kf * a * y.ln()).exp() / (kf * a);
            let term = if k % 2 == 1 { mag * sin } else { -mag * sin };
            sum += term;
            if mag < 1e-17 * sum.abs() {
                break;
            }
        }
        (2.0 * sum / PI).clamp(0.0, 1.0)
    }

    /// Maximum of p on `grid` and the largest finite-difference slope between
    /// consecutive grid points.
    pub fn lipschitz_bound(&self, grid: &[f64]) -> Result<(f64, f64)> {
        if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain(
                "grid must be sorted with at least two points",
            ));
        }
        let values: Vec<f64> = grid.iter().map(|&x| self.pdf(x)).collect();
        let sup = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let slope = grid
            .windows(2)
            .zip(values.windows(2))
            .map(|(g, v)| ((v[1] - v[0]) / (g[1] - g[0])).abs())
            .fold(0.0, f64::max);
        Ok((sup, slope))
    }

    /// Σ_q p_n(j + qN) for j in FFT order on a torus of `period` sites,
    /// by Poisson summation of the characteristic function.
    pub fn periodized_scaled(&self, n: u64, period: usize) -> Vec<f64> {
        let rate = n as f64 * self.c_scale.powf(self.alpha);
        let a = self.alpha;
        let spectrum: Vec<f64> = (0..period)
            .map(|m| {
                let centred = if m > period / 2 {
                    m as f64 - period as f64
                } else {
                    m as f64
                };
                let f = centred / period as f64;
                let cf = |u: f64| (-rate * (2.0 * PI * u.abs()).powf(a)).exp();
                let mut acc = cf(f);
                for r in 1..10_000_000u64 {
                    let (lo, hi) = (cf(f - r as f64), cf(f + r as f64));
                    acc += lo + hi;
                    if lo + hi < 1e-20 {
                        break;
                    }
                }
                acc
            })
            .collect();
        inverse_real(&spectrum)
    }
}

/// (1/π) ∫_0^∞ e^{-u^α} cos(u y) du by panels between zeros of the cosine.
fn unit_fourier_inversion(alpha: f64, y: f64) -> f64 {
    let cutoff = ENVELOPE_LOG_CUTOFF.powf(1.0 / alpha);
    let mut nodes = vec![0.0];
    // geometric nodes resolve the cusp of u^α at the origin
    let mut g = 1e-3_f64.min(cutoff);
    while g < cutoff.min(1.0) {
        nodes.push(g);
        g *= 4.0;
    }
    if y > 0.0 {
        let mut k = 0.0;
        loop {
            let z = (k + 0.5) * PI / y;
            if z >= cutoff {
                break;
            }
            if z > *nodes.last().expect("nonempty") {
                nodes.push(z);
            }
            k += 1.0;
        }
    } else {
        let mut g = 1.0;
        while g < cutoff {
            if g > *nodes.last().expect("nonempty") {
                nodes.push(g);
            }
            g *= 2.0;
        }
    }
    nodes.push(cutoff);
    let f = |u: f64| (-u.powf(alpha)).exp() * (u * y).cos();
    quad::integrate_piecewise(f, &nodes, 1e-13, 1e-13).value / PI
}

/// Convergent expansion (1/π) Σ_{k≥1} (−1)^{k+1} Γ(kα+1)/k! sin(kπα/2) y^{-kα-1}, α < 1.
fn unit_large_x_series(alpha: f64, y: f64) -> f64 {
    let ly = y.ln();
    let mut sum = 0.0;
    for k in 1..=2000 {
        let kf = k as f64;
        let mag = (ln_gamma(kf * alpha + 1.0) - ln_gamma(kf + 1.0) - (kf * alpha + 1.0) * ly).exp();
        let term = mag * (kf * PI * alpha / 2.0).sin();
        sum += if k % 2 == 1 { term } else { -term };
        if mag < 1e-18 * sum.abs() {
            break;
        }
    }
    sum / PI
}

/// Controls for the lattice walk computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkOptions {
    /// Torus size as a multiple of the window size 2M + 1.
    pub pad: f64,
    /// Largest escaped mass accepted before reporting an accuracy error.
    pub max_deficit: f64,
}

impl Default for WalkOptions {
    fn default() -> Self {
        WalkOptions {
            pad: 2.0,
            max_deficit: 0.01,
        }
    }
}

/// P(S_n ≡ j mod N) for |j| ≤ M, where N is the torus size.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkDistribution {
    pub alpha: f64,
    pub n: u64,
    pub half_width: usize,
    /// Indexed by j + M.
    pub masses: Vec<f64>,
    /// 1 − Σ masses.
    pub deficit: f64,
    pub period: usize,
}

/// Step law folded onto a torus of `period` sites, in FFT order. The fold puts
/// mass period^{-(1+α)} at residue 0.
fn torus_step_pmf(alpha: f64, period: usize) -> Result<Vec<f64>> {
    let c = normalization_c(alpha)?;
    let s = 1.0 + alpha;
    let fold = FoldedTail::new(s);
    let p = period as f64;
    let scale = c * p.powf(-s);
    let mut pmf = vec![0.0; period];
    pmf[0] = p.powf(-s);
    for r in 1..=period / 2 {
        let v = c * (r as f64).powf(-s) + scale * fold.eval(r as f64 / p);
        pmf[r] = v;
        pmf[period - r] = v;
    }
    Ok(pmf)
}

fn walk_on_torus(alpha: f64, n: u64, period: usize) -> Result<Vec<f64>> {
    let step = torus_step_pmf(alpha, period)?;
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex<f64>> = step.iter().map(|&v| Complex::new(v, 0.0)).collect();
    planner.plan_fft_forward(period).process(&mut buf);
    let spectrum: Vec<f64> = buf.iter().map(|z| z.re.powi(n as i32)).collect();
    Ok(inverse_real(&spectrum))
}

fn window_of(torus: &[f64], m: usize) -> Vec<f64> {
    let p = torus.len() as i64;
    (-(m as i64)..=m as i64)
        .map(|j| torus[j.rem_euclid(p) as usize])
        .collect()
}

fn torus_size(m: usize, pad: f64) -> usize {
    smooth_odd_size(((2 * m + 1) as f64 * pad.max(1.0)).ceil() as usize)
}

pub fn walk_pmf(alpha: f64, n: u64, m: usize) -> Result<WalkDistribution> {
    walk_pmf_with(alpha, n, m, &WalkOptions::default())
}

/// Law of the n-step walk restricted to |j| ≤ M, computed by spectral powers
/// of the step law on a padded torus.
pub fn walk_pmf_with(alpha: f64, n: u64, m: usize, opts: &WalkOptions) -> Result<WalkDistribution> {
    check_alpha(alpha)?;
    if n == 0 || (m as u64) < n {
        return Err(Error::domain(format!(
            "need n ≥ 1 and M ≥ n; got n = {n}, M = {m}"
        )));
    }
    if n > i32::MAX as u64 {
        return Err(Error::domain("step count too large"));
    }
    let period = torus_size(m, opts.pad);
    let torus = walk_on_torus(alpha, n, period)?;
    let masses = window_of(&torus, m);
    let deficit = (1.0 - masses.iter().sum::<f64>()).max(0.0);
    if deficit > opts.max_deficit {
        return Err(Error::Accuracy(format!(
            "window M = {m} lets mass {deficit:.3e} escape for n = {n} (limit {})",
            opts.max_deficit
        )));
    }
    Ok(WalkDistribution {
        alpha,
        n,
        half_width: m,
        masses,
        deficit,
        period,
    })
}

/// Local-limit discrepancies between the walk and the calibrated stable law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LltErrors {
    pub alpha: f64,
    pub n: u64,
    pub half_width: usize,
    pub sup_error: f64,
    /// n^{1/α} · sup error.
    pub rescaled_sup_error: f64,
    /// Σ_{|j|≤M} |P(S_n = j) − p_n(j)| + deficit.
    pub tv_error: f64,
    pub deficit: f64,
    pub c_scale: f64,
}

/// Compares walk and density on the same torus; both sides carry the same
/// periodic images, so wrap-around cancels to leading order.
pub fn llt_errors(alpha: f64, n: u64, m: usize, opts: &WalkOptions) -> Result<LltErrors> {
    let walk = walk_pmf_with(alpha, n, m, opts)?;
    let density = StableDensity::calibrated(alpha)?;
    let stable = window_of(&density.periodized_scaled(n, walk.period), m);
    let mut sup: f64 = 0.0;
    let mut l1 = 0.0;
    for (w, p) in walk.masses.iter().zip(&stable) {
        let d = (w - p).abs();
        sup = sup.max(d);
        l1 += d;
    }
    Ok(LltErrors {
        alpha,
        n,
        half_width: m,
        sup_error: sup,
        rescaled_sup_error: sup * (n as f64).powf(1.0 / alpha),
        tv_error: l1 + walk.deficit,
        deficit: walk.deficit,
        c_scale: density.c_scale(),
    })
}

pub fn llt_sup_error(alpha: f64, n: u64, m: usize) -> Result<f64> {
    Ok(llt_errors(alpha, n, m, &WalkOptions::default())?.sup_error)
}

pub fn llt_tv_error(alpha: f64, n: u64, m: usize) -> Result<f64> {
    Ok(llt_errors(alpha, n, m, &WalkOptions::default())?.tv_error)
}
