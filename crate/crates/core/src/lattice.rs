//! The long-range interaction operator A(i, j) = c(α) |i − j|^{-(1+α)} on a
//! finite window of sites {−L, …, L}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft::{smooth_size, SpectralConvolver};
use crate::special::{hurwitz_zeta, zeta, FoldedTail};

/// Windows at or above this half-width apply the operator through FFTs.
pub const FFT_THRESHOLD: usize = 64;

/// How the infinite lattice is cut down to 2L + 1 sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// Periodic: the ℤ-tail is folded back onto the window.
    #[default]
    Circulant,
    /// Interactions leaving the window are dropped.
    Restricted,
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Window::Circulant => "circulant",
            Window::Restricted => "restricted",
        })
    }
}

impl std::str::FromStr for Window {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circulant" => Ok(Window::Circulant),
            "restricted" => Ok(Window::Restricted),
            other => Err(Error::domain(format!("unknown window mode '{other}'"))),
        }
    }
}

/// c(α) = 1 / (2 ζ(1 + α)), making Σ_{j≠0} c(α) |j|^{-(1+α)} = 1.
pub fn normalization_c(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    Ok(0.5 / zeta(1.0 + alpha))
}

#[derive(Debug, Clone)]
pub struct LatticeKernel {
    alpha: f64,
    c_alpha: f64,
    half_width: usize,
    window: Window,
    /// Indexed by displacement + L.
    pmf: Vec<f64>,
    tail_mass: f64,
    convolver: Option<SpectralConvolver>,
}

/// Iterates A^n μ together with the window average μ̄.
#[derive(Debug, Clone)]
pub struct AverageFlow {
    pub iterates: Vec<Vec<f64>>,
    pub mean: f64,
    /// False when α ≥ 2, where convergence to μ̄ is not covered by the theory.
    pub within_hypothesis: bool,
}

impl LatticeKernel {
    pub fn new(alpha: f64, half_width: usize, window: Window) -> Result<Self> {
        let c_alpha = normalization_c(alpha)?;
        if half_width < 1 {
            return Err(Error::domain("window half-width L must be at least 1"));
        }
        let s = 1.0 + alpha;
        let l = half_width;
        let n = 2 * l + 1;
        let mut pmf = vec![0.0; n];
        for d in 1..=l {
            let v = c_alpha * (d as f64).powf(-s);
            pmf[l + d] = v;
            pmf[l - d] = v;
        }
        let tail_mass = match window {
            Window::Restricted => 2.0 * c_alpha * hurwitz_zeta(s, l as f64 + 1.0),
            Window::Circulant => {
                let fold = FoldedTail::new(s);
                let period = n as f64;
                let scale = c_alpha * period.powf(-s);
                for d in 1..=l {
                    let extra = scale * fold.eval(d as f64 / period);
                    pmf[l + d] += extra;
                    pmf[l - d] += extra;
                }
                // The fold also lands mass period^{-s} on displacement 0; A has
                // no self-interaction, so that share is spread back proportionally.
                let total: f64 = pmf.iter().sum();
                for v in &mut pmf {
                    *v /= total;
                }
                0.0
            }
        };
        Ok(Self::assemble(alpha, c_alpha, l, window, pmf, tail_mass))
    }

    /// A kernel with an arbitrary displacement law, for diagnostics. `pmf` is
    /// indexed by displacement + L and need not vanish at 0.
    pub fn from_raw_pmf(alpha: f64, pmf: Vec<f64>, window: Window) -> Result<Self> {
        if pmf.len() < 3 || pmf.len().is_multiple_of(2) {
            return Err(Error::domain("raw pmf needs odd length ≥ 3"));
        }
        if pmf.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain(
                "raw pmf entries must be finite and non-negative",
            ));
        }
        let l = pmf.len() / 2;
        let tail = (1.0 - pmf.iter().sum::<f64>()).max(0.0);
        let c_alpha = normalization_c(alpha)?;
        Ok(Self::assemble(alpha, c_alpha, l, window, pmf, tail))
    }

    fn assemble(
        alpha: f64,
        c_alpha: f64,
        l: usize,
        window: Window,
        pmf: Vec<f64>,
        tail_mass: f64,
    ) -> Self {
        let convolver = (l >= FFT_THRESHOLD).then(|| {
            let n = 2 * l + 1;
            let size = match window {
                Window::Circulant => n,
                Window::Restricted => smooth_size(2 * n - 1),
            };
            SpectralConvolver::new(&fft_order(&pmf, size))
        });
        LatticeKernel {
            alpha,
            c_alpha,
            half_width: l,
            window,
            pmf,
            tail_mass,
            convolver,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c_alpha(&self) -> f64 {
        self.c_alpha
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Number of sites, 2L + 1.
    pub fn sites(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// One row of the operator indexed by displacement + L.
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Mass of A(0, ·) at displacement `d`.
    pub fn mass(&self, d: i64) -> f64 {
        let l = self.half_width as i64;
        if d.abs() > l {
            0.0
        } else {
            self.pmf[(d + l) as usize]
        }
    }

    /// Row mass lost outside the window (zero for circulant windows).
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    fn check_len(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.sites() {
            return Err(Error::domain(format!(
                "site array has length {}, window has {} sites",
                x.len(),
                self.sites()
            )));
        }
        Ok(())
    }

    /// (A x)_i = Σ_j A(i, j) x_j.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x)?;
        Ok(match &self.convolver {
            Some(conv) => self.apply_fft(conv, x),
            None => self.apply_direct(x),
        })
    }

    fn apply_fft(&self, conv: &SpectralConvolver, x: &[f64]) -> Vec<f64> {
        let mut y = conv.convolve(x);
        // restricted: padding keeps wrapped terms out of the first 2L + 1 entries
        y.truncate(self.sites());
        y
    }

    /// Direct O(N²) evaluation, used for small windows and as a cross-check.
    pub fn apply_direct(&self, x: &[f64]) -> Vec<f64> {
        let n = self.sites() as i64;
        let l = self.half_width as i64;
        let mut out = vec![0.0; n as usize];
        for (i, o) in out.iter_mut().enumerate() {
            let i = i as i64;
            let mut acc = 0.0;
            for (j, &xj) in x.iter().enumerate() {
                let mut d = i - j as i64;
                if self.window == Window::Circulant {
                    d = (d + l).rem_euclid(n) - l;
                } else if d.abs() > l {
                    continue;
                }
                acc += self.pmf[(d + l) as usize] * xj;
            }
            *o = acc;
        }
        out
    }

    fn require_circulant(&self, what: &str) -> Result<()> {
        if self.window != Window::Circulant {
            return Err(Error::Mode(format!("{what} requires a circulant window")));
        }
        Ok(())
    }

    /// Eigenvalues of the circulant operator in FFT order (real by symmetry).
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.require_circulant("the spectrum")?;
        let conv = SpectralConvolver::new(&fft_order(&self.pmf, self.sites()));
        Ok(conv.spectrum().iter().map(|c| c.re).collect())
    }

    /// A^n(0, ·) indexed by displacement + L.
    pub fn power_row(&self, n: u32) -> Result<Vec<f64>> {
        self.require_circulant("power_row")?;
        let size = self.sites();
        let conv = SpectralConvolver::new(&fft_order(&self.pmf, size));
        let raw = conv.inverse_of(|s| num_complex::Complex::new(s.re.powi(n as i32), 0.0));
        Ok(from_fft_order(&raw, self.half_width))
    }

    /// ε_n = Σ_d A^n(0, d)² for n = 1..=n_max, by Parseval on the spectrum.
    pub fn row_sq_sup(&self, n_max: u32) -> Result<Vec<f64>> {
        let lambda = self.eigenvalues()?;
        let size = lambda.len() as f64;
        Ok((1..=n_max)
            .map(|n| {
                let p = 2 * n as i32;
                lambda.iter().map(|l| l.powi(p)).sum::<f64>() / size
            })
            .collect())
    }

    /// A^n μ for n = 1..=n_max by repeated application, plus the window average.
    pub fn mu_average_flow(&self, mu: &[f64], n_max: usize) -> Result<AverageFlow> {
        self.require_circulant("mu_average_flow")?;
        self.check_len(mu)?;
        let mut iterates = Vec::with_capacity(n_max);
        let mut current = mu.to_vec();
        for _ in 0..n_max {
            current = self.apply(&current)?;
            iterates.push(current.clone());
        }
        Ok(AverageFlow {
            iterates,
            mean: mu.iter().sum::<f64>() / mu.len() as f64,
            within_hypothesis: self.alpha < 2.0,
        })
    }

    /// Σ_i p_i |x_i| with p_0 = 1 and p_i = |i|^{-(1+α)}.
    pub fn weighted_norm(&self, x: &[f64]) -> Result<f64> {
        self.check_len(x)?;
        let l = self.half_width as i64;
        let s = 1.0 + self.alpha;
        Ok(x.iter()
            .enumerate()
            .map(|(k, v)| {
                let i = k as i64 - l;
                let w = if i == 0 {
                    1.0
                } else {
                    (i.abs() as f64).powf(-s)
                };
                w * v.abs()
            })
            .sum())
    }
}

/// Places a displacement-indexed row (centre at L) into a length-`size` FFT buffer.
pub(crate) fn fft_order(row: &[f64], size: usize) -> Vec<f64> {
    let l = row.len() / 2;
    let mut out = vec![0.0; size];
    for (k, &v) in row.iter().enumerate() {
        let d = k as i64 - l as i64;
        out[d.rem_euclid(size as i64) as usize] += v;
    }
    out
}

/// Inverse of [`fft_order`] for a buffer of exactly 2L + 1 entries.
pub(crate) fn from_fft_order(buf: &[f64], l: usize) -> Vec<f64> {
    let size = buf.len() as i64;
    (0..2 * l + 1)
        .map(|k| buf[(k as i64 - l as i64).rem_euclid(size) as usize])
        .collect()
}
