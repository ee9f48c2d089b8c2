//! Bifurcating stationary periodic states.
//!
//! For γ > -3, q₀² < α₀ the system has small stationary periodic solutions
//!
//! ```text
//! u_per(x) =  ε·2·sqrt((α₀-q₀²)/(3+γ)) cos(kc(x+x₀)) + O(ε²),
//! v_per(x) = -ε²·2·(α₀-q₀²)γ/(3+γ)    cos(2kc(x+x₀)) + O(ε³),
//! ```
//!
//! with kc² = 1 + εq₀ and zero v-mean. [`leading_order`] populates exactly
//! these modes; [`newton_refine`] solves the stationary truncated Fourier
//! system
//!
//! ```text
//! 0 = -(1+∂_x²)²u + αu + uv - u³,      0 = ∂_x²(v + γu²),
//! ```
//!
//! with v₀ = 0 imposed as a hard constraint (the mode is removed from the
//! unknowns) and the translation family pinned by Im u₁ = 0.

use crate::error::{Error, Result};
use crate::linalg::{lu_solve_real, C64};
use crate::params::ModelParams;
use num_complex::Complex64;

/// Truncated Fourier representation of (u_per, v_per): coefficients for
/// modes 0..=N with Hermitian symmetry implied (c_{-n} = conj(c_n)).
#[derive(Debug, Clone)]
pub struct PeriodicEquilibrium {
    pub n_modes: usize,
    pub u_coeffs: Vec<C64>,
    pub v_coeffs: Vec<C64>,
    /// l2 norm of the truncated stationary residual; None until refined.
    pub residual_norm: Option<f64>,
    pub params: ModelParams,
}

impl PeriodicEquilibrium {
    pub fn eval_u(&self, x: f64) -> f64 {
        eval_series(&self.u_coeffs, self.params.kc, x)
    }

    pub fn eval_v(&self, x: f64) -> f64 {
        eval_series(&self.v_coeffs, self.params.kc, x)
    }

    /// Cosine amplitude of the fundamental u-mode, 2|u₁|.
    pub fn fundamental_amplitude(&self) -> f64 {
        2.0 * self.u_coeffs[1].norm()
    }

    /// Shifts the pattern by `shift` (coefficients pick up e^{i n kc shift}).
    pub fn translated(&self, shift: f64) -> Self {
        let rotate = |coeffs: &[C64]| {
            coeffs
                .iter()
                .enumerate()
                .map(|(n, &c)| {
                    let phase = self.params.kc * n as f64 * shift;
                    c * Complex64::new(phase.cos(), phase.sin())
                })
                .collect()
        };
        Self {
            n_modes: self.n_modes,
            u_coeffs: rotate(&self.u_coeffs),
            v_coeffs: rotate(&self.v_coeffs),
            residual_norm: self.residual_norm,
            params: self.params,
        }
    }
}

fn eval_series(coeffs: &[C64], kc: f64, x: f64) -> f64 {
    let mut acc = coeffs[0].re;
    for (n, &c) in coeffs.iter().enumerate().skip(1) {
        let phase = kc * n as f64 * x;
        acc += 2.0 * (c.re * phase.cos() - c.im * phase.sin());
    }
    acc
}

/// Nontrivial amplitude of the reduced stationary state,
/// sqrt((α₀-q₀²)/(3+γ)).
pub fn amplitude_fixed_point(params: &ModelParams) -> Result<f64> {
    if params.gamma <= -3.0 {
        return Err(Error::domain(format!(
            "no small periodic states for gamma = {} <= -3",
            params.gamma
        )));
    }
    params.require_detuning_band()?;
    Ok(((params.alpha0 - params.q0 * params.q0) / (3.0 + params.gamma)).sqrt())
}

/// Leading-order periodic state: u at modes ±1, v at modes ±2 only
/// (default truncation N = 16; coefficients decay like ε^n, far below
/// machine precision there for ε ≤ 0.1).
pub fn leading_order(params: &ModelParams) -> Result<PeriodicEquilibrium> {
    leading_order_with_modes(params, 16)
}

pub fn leading_order_with_modes(
    params: &ModelParams,
    n_modes: usize,
) -> Result<PeriodicEquilibrium> {
    let a = amplitude_fixed_point(params)?;
    if n_modes < 2 {
        return Err(Error::domain("need at least 2 modes".to_string()));
    }
    let eps = params.eps;
    let q = params.alpha0 - params.q0 * params.q0;
    let mut u_coeffs = vec![Complex64::new(0.0, 0.0); n_modes + 1];
    let mut v_coeffs = vec![Complex64::new(0.0, 0.0); n_modes + 1];
    // ε·2a·cos(kc(x+x₀)) → u₁ = εa·e^{i kc x₀}.
    let phase1 = params.kc * params.x0;
    u_coeffs[1] = eps * a * Complex64::new(phase1.cos(), phase1.sin());
    // -ε²·2b·cos(2kc(x+x₀)) → v₂ = -ε²b·e^{2i kc x₀}, b = qγ/(3+γ).
    let b = q * params.gamma / (3.0 + params.gamma);
    let phase2 = 2.0 * params.kc * params.x0;
    v_coeffs[2] = -eps * eps * b * Complex64::new(phase2.cos(), phase2.sin());
    Ok(PeriodicEquilibrium {
        n_modes,
        u_coeffs,
        v_coeffs,
        residual_norm: None,
        params: *params,
    })
}

/// Full symmetric coefficient array (-N..=N) from the stored half.
fn full_coeffs(half: &[C64]) -> Vec<C64> {
    let n = half.len() - 1;
    let mut full = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    for (k, &c) in half.iter().enumerate() {
        full[n + k] = c;
        if k > 0 {
            full[n - k] = c.conj();
        }
    }
    full
}

/// Convolution of two symmetric arrays (possibly of different truncations),
/// projected to |n| <= n_out.
fn convolve(a: &[C64], b: &[C64], n_out: usize) -> Vec<C64> {
    let a_off = (a.len() - 1) / 2;
    let b_off = (b.len() - 1) / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n_out + 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai.norm_sqr() == 0.0 {
            continue;
        }
        let ni = i as isize - a_off as isize;
        for (j, &bj) in b.iter().enumerate() {
            let nj = j as isize - b_off as isize;
            let k = ni + nj;
            if k.unsigned_abs() <= n_out {
                out[(k + n_out as isize) as usize] += ai * bj;
            }
        }
    }
    out
}

/// Stationary residual of the truncated system: u-equations for n = 0..=N
/// and v-equations -n²kc²(v_n + γ(u²)_n) for n = 1..=N. Products are full
/// convolutions projected to |n| <= N (Galerkin truncation).
fn residual(u: &[C64], v: &[C64], params: &ModelParams) -> (Vec<C64>, Vec<C64>) {
    let n = u.len() - 1;
    let kc2 = params.kc * params.kc;
    let alpha = params.alpha();
    let uf = full_coeffs(u);
    let vf = full_coeffs(v);
    let u2 = convolve(&uf, &uf, 2 * n);
    let uv = convolve(&uf, &vf, n);
    let u3 = convolve(&u2, &uf, n);
    let mut res_u = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mu2 = (k as f64) * (k as f64) * kc2;
        let lin = -(1.0 - mu2) * (1.0 - mu2) + alpha;
        res_u.push(u[k] * lin + uv[n + k] - u3[n + k]);
    }
    let mut res_v = Vec::with_capacity(n);
    for k in 1..=n {
        let mu2 = (k as f64) * (k as f64) * kc2;
        res_v.push((v[k] + params.gamma * u2[2 * n + k]) * (-mu2));
    }
    (res_u, res_v)
}

fn residual_norm_of(u: &[C64], v: &[C64], params: &ModelParams) -> f64 {
    let (ru, rv) = residual(u, v, params);
    ru.iter()
        .map(|c| c.norm_sqr())
        .chain(rv.iter().map(|c| c.norm_sqr()))
        .sum::<f64>()
        .sqrt()
}

// Real unknown vector: [u0, Re u1, Im u1, ..., Re uN, Im uN,
//                       Re v1, Im v1, ..., Re vN, Im vN].
#[allow(clippy::needless_range_loop)]
fn pack(u: &[C64], v: &[C64]) -> Vec<f64> {
    let n = u.len() - 1;
    let mut x = Vec::with_capacity(1 + 4 * n);
    x.push(u[0].re);
    for k in 1..=n {
        x.push(u[k].re);
        x.push(u[k].im);
    }
    for k in 1..=n {
        x.push(v[k].re);
        x.push(v[k].im);
    }
    x
}

#[allow(clippy::needless_range_loop)]
fn unpack(x: &[f64], n: usize) -> (Vec<C64>, Vec<C64>) {
    let mut u = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut v = vec![Complex64::new(0.0, 0.0); n + 1];
    u[0] = Complex64::new(x[0], 0.0);
    for k in 1..=n {
        u[k] = Complex64::new(x[2 * k - 1], x[2 * k]);
    }
    for k in 1..=n {
        v[k] = Complex64::new(x[2 * n + 2 * k - 1], x[2 * n + 2 * k]);
    }
    (u, v)
}

/// Residual in real form with the phase pin Im u₁ = 0 replacing the
/// translation-redundant imaginary part of the n = 1 u-equation.
#[allow(clippy::needless_range_loop)]
fn residual_real(x: &[f64], n: usize, params: &ModelParams) -> Vec<f64> {
    let (u, v) = unpack(x, n);
    let (ru, rv) = residual(&u, &v, params);
    let mut out = Vec::with_capacity(x.len());
    out.push(ru[0].re);
    for k in 1..=n {
        out.push(ru[k].re);
        if k == 1 {
            out.push(u[1].im); // phase pin
        } else {
            out.push(ru[k].im);
        }
    }
    for r in &rv {
        out.push(r.re);
        out.push(r.im);
    }
    out
}

/// Newton refinement of a leading-order start. The Jacobian is assembled by
/// forward differences (~70 unknowns at the default N = 16); a singular
/// Jacobian is reported with the pivot-ratio condition estimate.
pub fn newton_refine(
    start: &PeriodicEquilibrium,
    tol: f64,
    max_iter: usize,
) -> Result<PeriodicEquilibrium> {
    if tol < 1e-13 {
        return Err(Error::domain(format!(
            "tolerance {tol} below attainable roundoff floor 1e-13"
        )));
    }
    let params = start.params;
    let n = start.n_modes;

    // Work in the x₀ = 0 gauge: rotate the start, pin Im u₁ = 0, rotate
    // back afterwards (translation equivariance).
    let gauge = start.translated(-params.x0);
    let mut x = pack(&gauge.u_coeffs, &gauge.v_coeffs);
    let dim = x.len();

    let mut res = residual_real(&x, n, &params);
    let mut res_norm = res.iter().map(|r| r * r).sum::<f64>().sqrt();
    let mut converged = res_norm <= tol;
    let mut iterations = 0usize;

    while !converged {
        if iterations >= max_iter {
            return Err(Error::numerical(format!(
                "Newton did not converge after {max_iter} iterations (residual {res_norm:.3e})"
            )));
        }
        iterations += 1;

        let mut jac = vec![0.0f64; dim * dim];
        for col in 0..dim {
            let h = 1e-7 * (1.0 + x[col].abs());
            let mut xp = x.clone();
            xp[col] += h;
            let rp = residual_real(&xp, n, &params);
            for row in 0..dim {
                jac[row * dim + col] = (rp[row] - res[row]) / h;
            }
        }
        let mut step = res.clone();
        let cond = lu_solve_real(&mut jac, dim, &mut step).map_err(|e| {
            Error::numerical(format!("singular Jacobian in periodic Newton solve: {e}"))
        })?;
        if cond > 1e14 {
            return Err(Error::numerical(format!(
                "Jacobian near-singular (pivot ratio {cond:.3e}) in periodic Newton solve"
            )));
        }
        for (xi, si) in x.iter_mut().zip(&step) {
            *xi -= si;
        }
        res = residual_real(&x, n, &params);
        res_norm = res.iter().map(|r| r * r).sum::<f64>().sqrt();
        converged = res_norm <= tol;
    }

    let (u, v) = unpack(&x, n);
    let refined = PeriodicEquilibrium {
        n_modes: n,
        u_coeffs: u,
        v_coeffs: v,
        residual_norm: None,
        params,
    }
    .translated(params.x0);
    let norm = residual_norm_of(&refined.u_coeffs, &refined.v_coeffs, &params);
    Ok(PeriodicEquilibrium {
        residual_norm: Some(norm),
        ..refined
    })
}

/// Residual of a state embedded (zero-padded) into a larger truncation;
/// measures spectral convergence in N.
pub fn embedded_residual(state: &PeriodicEquilibrium, n_modes: usize) -> f64 {
    assert!(n_modes >= state.n_modes);
    let mut u = state.u_coeffs.clone();
    let mut v = state.v_coeffs.clone();
    u.resize(n_modes + 1, Complex64::new(0.0, 0.0));
    v.resize(n_modes + 1, Complex64::new(0.0, 0.0));
    residual_norm_of(&u, &v, &state.params)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitude_formula_values() {
        let p = ModelParams::new(3.0, 7.0, 0.0, 0.1).unwrap();
        assert!((amplitude_fixed_point(&p).unwrap() - 1.0).abs() < 1e-15);
        let p = ModelParams::new(3.0, 7.0, 1.0, 0.1).unwrap();
        // sqrt(3/4) = 0.8660254...
        assert!((amplitude_fixed_point(&p).unwrap() - 0.75f64.sqrt()).abs() < 1e-15);
        // Band edge: q0² → α₀ drives the amplitude to 0.
        let p = ModelParams::with_detuning(3.0, 7.0, 0.0, 0.1, (3.0f64 - 1e-12).sqrt(), 0.0)
            .unwrap();
        assert!(amplitude_fixed_point(&p).unwrap() < 1e-5);
        // γ ≤ -3 rejected.
        let p = ModelParams::new(3.0, 7.0, -3.5, 0.1).unwrap();
        assert!(amplitude_fixed_point(&p).is_err());
    }

    #[test]
    fn leading_order_reference_amplitudes() {
        // ε=0.1, α₀=3, q₀=0, γ=0: u-amplitude = ε·2·sqrt(3/3) = 0.2.
        let p = ModelParams::new(3.0, 7.0, 0.0, 0.1).unwrap();
        let state = leading_order(&p).unwrap();
        assert!((state.fundamental_amplitude() - 0.2).abs() < 1e-15);
        // γ=0 → v ≡ 0 at leading order.
        assert!(state.v_coeffs.iter().all(|c| c.norm() == 0.0));

        // γ=1: v cosine amplitude -ε²·2·3·1/4 = -0.015.
        let p = ModelParams::new(3.0, 7.0, 1.0, 0.1).unwrap();
        let state = leading_order(&p).unwrap();
        let v2 = state.v_coeffs[2];
        assert!((2.0 * v2.re + 0.015).abs() < 1e-15);
        assert_eq!(state.v_coeffs[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn newton_converges_and_stays_close_to_leading_order() {
        for &gamma in &[0.0, 1.0] {
            let p = ModelParams::new(3.0, 7.0, gamma, 0.05).unwrap();
            let refined = newton_refine(&leading_order(&p).unwrap(), 1e-12, 25).unwrap();
            let res = refined.residual_norm.unwrap();
            assert!(res <= 1e-12, "residual {res} at gamma={gamma}");
            // |refined fundamental amplitude − ε·2a| ≤ C·ε² with C frozen
            // from calibration (measured ≈ 0.002 here; the bound leaves
            // room for other parameter corners).
            let target = p.eps * 2.0 * amplitude_fixed_point(&p).unwrap();
            let dev = (refined.fundamental_amplitude() - target).abs();
            assert!(
                dev <= 0.5 * p.eps * p.eps,
                "amplitude deviation {dev} at gamma={gamma}"
            );
            assert_eq!(refined.v_coeffs[0], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn newton_on_trivial_state_at_onset() {
        // ε = 0: the zero start already satisfies the system; the solver
        // returns before attempting a (singular) Newton step.
        let p = ModelParams::new(3.0, 7.0, 1.0, 0.0).unwrap();
        let refined = newton_refine(&leading_order(&p).unwrap(), 1e-12, 5).unwrap();
        assert_eq!(refined.residual_norm, Some(0.0));
        assert!(refined.u_coeffs.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn mode_three_is_third_order() {
        // Residual hierarchy: |u₃| = O(ε³); constant frozen from
        // calibration.
        let p = ModelParams::new(3.0, 7.0, 1.0, 0.05).unwrap();
        let refined = newton_refine(&leading_order(&p).unwrap(), 1e-12, 25).unwrap();
        let eps3 = p.eps.powi(3);
        let u3 = refined.u_coeffs[3].norm();
        assert!(u3 > 0.0);
        assert!(u3 <= 2.0 * (1.0 + p.gamma) * eps3, "u3 = {u3}");
    }

    #[test]
    fn reflection_symmetry_real_coefficients() {
        // x₀ = 0: the refined state is a cosine series (real coefficients).
        let p = ModelParams::new(3.0, 7.0, 1.0, 0.05).unwrap();
        let refined = newton_refine(&leading_order(&p).unwrap(), 1e-12, 25).unwrap();
        for c in refined.u_coeffs.iter().chain(&refined.v_coeffs) {
            assert!(c.im.abs() <= 1e-10, "imaginary leak {c}");
        }
    }

    #[test]
    fn translation_family() {
        // Refining with x₀ and refining at 0 then shifting agree in field
        // values to 1e-10.
        let x0 = 0.7;
        let p = ModelParams::with_detuning(3.0, 7.0, 1.0, 0.05, 0.0, x0).unwrap();
        let p0 = ModelParams::new(3.0, 7.0, 1.0, 0.05).unwrap();
        let shifted = newton_refine(&leading_order(&p).unwrap(), 1e-12, 25).unwrap();
        let base = newton_refine(&leading_order(&p0).unwrap(), 1e-12, 25).unwrap();
        for i in 0..64 {
            let x = i as f64 * std::f64::consts::TAU / 64.0;
            assert!((shifted.eval_u(x) - base.eval_u(x + x0)).abs() < 1e-10);
            assert!((shifted.eval_v(x) - base.eval_v(x + x0)).abs() < 1e-10);
        }
    }

    #[test]
    fn spectral_convergence_in_truncation() {
        // Residual of the N-mode solution embedded in the 2N-mode system
        // decays by ≥ 1e3 per doubling at ε = 0.05 (until roundoff).
        let p = ModelParams::new(3.0, 7.0, 1.0, 0.05).unwrap();
        let mut prev: Option<f64> = None;
        for n in [4usize, 8, 16] {
            let start = leading_order_with_modes(&p, n).unwrap();
            let refined = newton_refine(&start, 1e-12, 30).unwrap();
            let embedded = embedded_residual(&refined, 2 * n);
            if let Some(last) = prev {
                assert!(
                    embedded <= 1e-3 * last || embedded < 1e-14,
                    "ratio {} at N={n}",
                    embedded / last
                );
            }
            prev = Some(embedded);
        }
    }

    #[test]
    fn tolerance_floor_rejected() {
        let p = ModelParams::new(3.0, 7.0, 0.0, 0.05).unwrap();
        assert!(newton_refine(&leading_order(&p).unwrap(), 1e-14, 5).is_err());
    }

    #[test]
    fn non_convergence_reported() {
        let p = ModelParams::new(3.0, 7.0, 1.0, 0.05).unwrap();
        let err = newton_refine(&leading_order(&p).unwrap(), 1e-12, 1).unwrap_err();
        assert!(matches!(err, crate::error::Error::Numerical(_)), "{err}");
    }
}
