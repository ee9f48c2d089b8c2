//! Spectral containers for real periodic field pairs (u, v).
//!
//! Transform convention (used everywhere in the crate): the forward transform
//! is unnormalized, `û_k = Σ_j u_j e^{-2πijk/n}`, and the inverse divides by
//! `n`. Mode 0 is therefore the grid sum, so `v_hat[0] = mean(v) · n_grid`.
//! Fields are real, hence coefficients carry Hermitian symmetry
//! `û_{n-k} = conj(û_k)`.

use crate::error::{Error, Result};
use crate::params::ModelParams;
use num_complex::Complex64;

use rustfft::{Fft, FftPlanner};
use std::f64::consts::TAU;
use std::sync::Arc;

/// Periodic collocation grid plus cached FFT plans. Cheap to clone.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    length: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Grid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::domain(format!(
                "n_grid must be a power of two >= 16, got {n}"
            )));
        }
        if length.is_nan() || length <= 0.0 {
            return Err(Error::domain(format!("length must be > 0, got {length}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            length,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Collocation points x_j = j·L/n.
    pub fn x(&self) -> impl Iterator<Item = f64> + '_ {
        let dx = self.length / self.n as f64;
        (0..self.n).map(move |j| j as f64 * dx)
    }

    /// Signed wavenumber of coefficient index m (Nyquist kept positive; all
    /// differential operators in this crate are even powers of ∂_x).
    pub fn wavenumber(&self, m: usize) -> f64 {
        let half = self.n / 2;
        let signed = if m <= half {
            m as isize
        } else {
            m as isize - self.n as isize
        };
        TAU / self.length * signed as f64
    }

    /// Forward transform of real samples (unnormalized).
    pub fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        assert_eq!(samples.len(), self.n);
        let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        self.fwd.process(&mut buf);
        buf
    }

    /// Inverse transform to real samples (divides by n; imaginary parts from
    /// roundoff are dropped).
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.n);
        let mut buf = coeffs.to_vec();
        self.inv.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    /// Inverse transform keeping the complex samples (used by the amplitude
    /// system, whose envelope field is genuinely complex).
    pub fn inverse_complex(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(coeffs.len(), self.n);
        let mut buf = coeffs.to_vec();
        self.inv.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    pub fn forward_complex(&self, samples: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(samples.len(), self.n);
        let mut buf = samples.to_vec();
        self.fwd.process(&mut buf);
        buf
    }
}

/// Real periodic fields (u, v) stored spectrally on a shared grid.
#[derive(Debug, Clone)]
pub struct FieldPair {
    pub grid: Grid,
    pub u_hat: Vec<Complex64>,
    pub v_hat: Vec<Complex64>,
}

impl FieldPair {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.n();
        Self {
            grid,
            u_hat: vec![Complex64::new(0.0, 0.0); n],
            v_hat: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    pub fn u(&self) -> Vec<f64> {
        self.grid.inverse(&self.u_hat)
    }

    pub fn v(&self) -> Vec<f64> {
        self.grid.inverse(&self.v_hat)
    }

    pub fn set_u(&mut self, samples: &[f64]) {
        self.u_hat = self.grid.forward(samples);
    }

    pub fn set_v(&mut self, samples: &[f64]) {
        self.v_hat = self.grid.forward(samples);
    }

    /// Conserved scalar: the spatial mean of v, `v_hat[0]/n` under the
    /// crate transform convention.
    pub fn mean_v(&self) -> f64 {
        self.v_hat[0].re / self.n() as f64
    }

    /// Largest relative Hermitian-symmetry defect over both fields.
    pub fn hermitian_defect(&self) -> f64 {
        let defect = |hat: &[Complex64]| {
            let n = hat.len();
            let scale = hat.iter().map(|c| c.norm()).fold(1e-300, f64::max);
            let mut worst: f64 = hat[0].im.abs();
            for k in 1..n {
                worst = worst.max((hat[k] - hat[n - k].conj()).norm() * 0.5);
            }
            worst / scale
        };
        defect(&self.u_hat).max(defect(&self.v_hat))
    }

    pub fn sup_norm_u(&self) -> f64 {
        self.u().iter().fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    pub fn sup_norm_v(&self) -> f64 {
        self.v().iter().fold(0.0f64, |m, &x| m.max(x.abs()))
    }
}

/// Builds a zero-initialized field pair on a domain of `n_periods` pattern
/// wavelengths, length = n_periods · 2π/kc.
pub fn make_grid(n_grid: usize, n_periods: usize, params: &ModelParams) -> Result<FieldPair> {
    if n_periods < 1 {
        return Err(Error::domain(format!(
            "n_periods must be >= 1, got {n_periods}"
        )));
    }
    let length = n_periods as f64 * TAU / params.kc;
    Ok(FieldPair::zeros(Grid::new(n_grid, length)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params() -> ModelParams {
        ModelParams::new(3.0, 7.0, 0.0, 0.1).unwrap()
    }

    #[test]
    fn make_grid_lengths() {
        let f = make_grid(64, 1, &params()).unwrap();
        assert!((f.grid.length() - TAU).abs() < 1e-15);
        assert_eq!(f.n(), 64);
        assert!(f.u_hat.iter().all(|c| c.norm() == 0.0));

        let f = make_grid(256, 20, &params()).unwrap();
        assert!((f.grid.length() - 40.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn make_grid_rejects_bad_sizes() {
        assert!(make_grid(48, 1, &params()).is_err());
        assert!(make_grid(8, 1, &params()).is_err());
        assert!(make_grid(64, 0, &params()).is_err());
    }

    #[test]
    fn mode_zero_is_grid_sum() {
        let mut f = make_grid(64, 1, &params()).unwrap();
        let v: Vec<f64> = f.grid.x().map(|x| 0.7 + 0.1 * x.cos()).collect();
        f.set_v(&v);
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        assert!((f.v_hat[0].re - mean * 64.0).abs() < 1e-10);
        assert!((f.mean_v() - mean).abs() < 1e-14);
    }

    proptest! {
        // Round-trip identity: forward(inverse(x)) recovers coefficients to
        // <= 1e-12 relative error for Hermitian inputs.
        #[test]
        fn fft_round_trip(seed in 0u64..1000) {
            let grid = Grid::new(128, TAU).unwrap();
            let n = grid.n();
            // Deterministic pseudo-random real field from the seed.
            let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state as f64 / u64::MAX as f64) - 0.5
            };
            let samples: Vec<f64> = (0..n).map(|_| next()).collect();
            let hat = grid.forward(&samples);
            let back = grid.inverse(&hat);
            let hat2 = grid.forward(&back);
            let scale = hat.iter().map(|c| c.norm()).fold(1e-300, f64::max);
            for (a, b) in hat.iter().zip(&hat2) {
                prop_assert!((a - b).norm() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn hermitian_defect_detects_real_fields() {
        let mut f = make_grid(64, 1, &params()).unwrap();
        let u: Vec<f64> = f.grid.x().map(|x| x.cos() + 0.3 * (2.0 * x).sin()).collect();
        f.set_u(&u);
        assert!(f.hermitian_defect() < 1e-13);
        f.u_hat[3] += Complex64::new(10.0, 5.0);
        assert!(f.hermitian_defect() > 1e-3);
    }
}
