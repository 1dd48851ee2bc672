//! Thin helpers over `rustfft` for real circular convolutions.

use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Smallest integer ≥ `n` whose prime factors are all in {2, 3, 5, 7}.
pub fn smooth_size(n: usize) -> usize {
    next_with_factors(n.max(1), &[2, 3, 5, 7])
}

/// Smallest odd integer ≥ `n` whose prime factors are all in {3, 5, 7}.
pub fn smooth_odd_size(n: usize) -> usize {
    next_with_factors(n.max(1), &[3, 5, 7])
}

fn next_with_factors(n: usize, primes: &[usize]) -> usize {
    let mut m = n;
    loop {
        let mut r = m;
        for &p in primes {
            while r.is_multiple_of(p) {
                r /= p;
            }
        }
        if r == 1 {
            return m;
        }
        m += 1;
    }
}

/// A precomputed circular convolution by a fixed real kernel of length `n`.
#[derive(Clone)]
pub struct SpectralConvolver {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    spectrum: Vec<Complex<f64>>,
}

impl std::fmt::Debug for SpectralConvolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralConvolver")
            .field("n", &self.n)
            .finish()
    }
}

impl SpectralConvolver {
    /// `kernel` is given in FFT order (index k ↔ displacement k mod n).
    pub fn new(kernel: &[f64]) -> Self {
        let n = kernel.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let mut spectrum: Vec<Complex<f64>> =
            kernel.iter().map(|&v| Complex::new(v, 0.0)).collect();
        forward.process(&mut spectrum);
        SpectralConvolver {
            n,
            forward,
            inverse,
            spectrum,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn spectrum(&self) -> &[Complex<f64>] {
        &self.spectrum
    }

    /// Circular convolution of `x` (zero-padded to `n`) with the kernel.
    pub fn convolve(&self, x: &[f64]) -> Vec<f64> {
        debug_assert!(x.len() <= self.n);
        let mut buf = vec![Complex::new(0.0, 0.0); self.n];
        for (b, &v) in buf.iter_mut().zip(x) {
            b.re = v;
        }
        self.forward.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(&self.spectrum) {
            *b *= s;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Inverse transform of `g(spectrum)` applied pointwise; returns the real part.
    pub fn inverse_of<G: Fn(Complex<f64>) -> Complex<f64>>(&self, g: G) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = self.spectrum.iter().map(|&s| g(s)).collect();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }
}

/// Inverse DFT of a real sequence given in FFT order, real part, normalized by 1/n.
pub fn inverse_real(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter().map(|c| c.re * scale).collect()
}

/// Circular convolution of two equal-length real sequences.
pub fn circular_convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len());
    SpectralConvolver::new(a).convolve(b)
}
