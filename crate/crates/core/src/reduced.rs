//! The reduced flow on the center manifold and its heteroclinic orbits.
//!
//! In the slow spatial variable ξ̃ = εξ the center-manifold dynamics reduce
//! to three equations for (Â, B̂, Ŵ₀) with Â, B̂ complex and Ŵ₀ real:
//!
//! ```text
//! ∂Â  = B̂,
//! ∂B̂  = (1/4)(-α₀Â - c₀B̂ - ÂŴ₀ + 3(1+γ)Â|Â|²),
//! ∂Ŵ₀ = -c₀Ŵ₀ + 2c₀γ|Â|²,
//! ```
//!
//! the ε = 0 truncation (the O(ε²)/O(ε³) remainders are dropped, matching
//! the numerics this module reproduces). Fixed points: the origin and, for
//! γ > -3, the circle (sqrt(α₀/(3+γ))e^{iφ}, 0, 2γα₀/(3+γ)). The derivation
//! uses intermediate amplitudes A, B with A = (Â + (c₀/Δ)Â + (8/Δ)B̃)/2;
//! that substitution is scaffolding only and never appears in the types.
//!
//! Fronts are found by shooting: perturb off the circle along its single
//! unstable eigenvector and integrate forward until the origin captures the
//! trajectory ([`shoot_heteroclinic`]). At γ = 0 the Ŵ₀ ≡ 0 slice is
//! invariant and H(Â,B̂) = 2|B̂|² + (α₀/2)|Â|² - (3/4)|Â|⁴ decays along
//! orbits with ∂H = -c₀|B̂|².
//!
//! The large-γ limit after the rescaling (Ã,B̃) = sqrt((3+γ)/α₀)(Â,B̂),
//! W̃₀ = (3+γ)/(2α₀γ)·Ŵ₀ is [`limiting_rhs`], with fixed points (0,0,0) and
//! (e^{iφ}, 0, 1).

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::ode::{self, IntegratorOptions, StopReason};
use crate::params::ModelParams;
use num_complex::Complex64;

/// State (Â, B̂, Ŵ₀) of the reduced system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedState {
    pub a: C64,
    pub b: C64,
    pub w0: f64,
}

impl ReducedState {
    pub fn new(a: C64, b: C64, w0: f64) -> Self {
        Self { a, b, w0 }
    }

    pub fn zero() -> Self {
        Self::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0)
    }

    /// Euclidean norm in the five real coordinates.
    pub fn norm(&self) -> f64 {
        (self.a.norm_sqr() + self.b.norm_sqr() + self.w0 * self.w0).sqrt()
    }

    /// Real coordinates (Re Â, Im Â, Re B̂, Im B̂, Ŵ₀).
    pub fn to_array(self) -> [f64; 5] {
        [self.a.re, self.a.im, self.b.re, self.b.im, self.w0]
    }

    pub fn from_array(x: &[f64; 5]) -> Self {
        Self::new(
            Complex64::new(x[0], x[1]),
            Complex64::new(x[2], x[3]),
            x[4],
        )
    }
}

/// Right-hand side of the reduced system (exact ε = 0 truncation).
pub fn reduced_rhs(s: &ReducedState, params: &ModelParams) -> ReducedState {
    let a2 = s.a.norm_sqr();
    let da = s.b;
    let db = (-params.alpha0 * s.a - params.c0 * s.b - s.a * s.w0
        + 3.0 * (1.0 + params.gamma) * s.a * a2)
        * 0.25;
    let dw = -params.c0 * s.w0 + 2.0 * params.c0 * params.gamma * a2;
    ReducedState::new(da, db, dw)
}

/// Right-hand side of the formal γ → ∞ limiting system.
pub fn limiting_rhs(s: &ReducedState, params: &ModelParams) -> ReducedState {
    let a2 = s.a.norm_sqr();
    let da = s.b;
    let db = (-params.c0 * s.b - params.alpha0 * s.a - 2.0 * params.alpha0 * s.a * s.w0
        + 3.0 * params.alpha0 * s.a * a2)
        * 0.25;
    let dw = -params.c0 * s.w0 + params.c0 * a2;
    ReducedState::new(da, db, dw)
}

/// Lyapunov function H(Â,B̂) = 2|B̂|² + (α₀/2)|Â|² - (3/4)|Â|⁴ for the
/// γ = 0, Ŵ₀ = 0 slice.
pub fn lyapunov_h(a: C64, b: C64, params: &ModelParams) -> f64 {
    let a2 = a.norm_sqr();
    2.0 * b.norm_sqr() + 0.5 * params.alpha0 * a2 - 0.75 * a2 * a2
}

/// dH/dξ̃ along the flow, evaluated through the chain rule with the reduced
/// right-hand side. Equals -c₀|B̂|² identically when γ = 0 and Ŵ₀ = 0.
pub fn lyapunov_h_derivative(s: &ReducedState, params: &ModelParams) -> f64 {
    let rhs = reduced_rhs(s, params);
    let re_ab = (s.a.conj() * rhs.a).re;
    let re_bdb = (s.b.conj() * rhs.b).re;
    4.0 * re_bdb + params.alpha0 * re_ab - 3.0 * s.a.norm_sqr() * re_ab
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointKind {
    Trivial,
    Circle,
}

/// A fixed point with its five-dimensional linearization data.
#[derive(Debug, Clone)]
pub struct FixedPointInfo {
    pub kind: FixedPointKind,
    pub state: ReducedState,
    /// Eigenvalues of the real 5×5 Jacobian, sorted descending by real part.
    pub eigenvalues: Vec<C64>,
    /// Unit eigenvector of the positive eigenvalue, when there is exactly
    /// one eigenvalue with real part > 1e-8.
    pub unstable_dir: Option<[f64; 5]>,
}

/// The φ = 0 representative of the nontrivial circle, when γ > -3.
pub fn circle_representative(params: &ModelParams) -> Result<ReducedState> {
    if params.gamma <= -3.0 {
        return Err(Error::domain(format!(
            "no nontrivial fixed points for gamma = {} <= -3",
            params.gamma
        )));
    }
    let denom = 3.0 + params.gamma;
    Ok(ReducedState::new(
        Complex64::new((params.alpha0 / denom).sqrt(), 0.0),
        Complex64::new(0.0, 0.0),
        2.0 * params.gamma * params.alpha0 / denom,
    ))
}

/// Analytic Jacobian of [`reduced_rhs`] in the real coordinates
/// (Re Â, Im Â, Re B̂, Im B̂, Ŵ₀).
pub fn jacobian(at: &ReducedState, params: &ModelParams) -> [[f64; 5]; 5] {
    let (x1, x2) = (at.a.re, at.a.im);
    let w = at.w0;
    let g = params.gamma;
    let a0 = params.alpha0;
    let c0 = params.c0;
    let k = 3.0 * (1.0 + g);
    [
        [0.0, 0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.0],
        [
            0.25 * (-a0 - w + k * (3.0 * x1 * x1 + x2 * x2)),
            0.25 * (2.0 * k * x1 * x2),
            -0.25 * c0,
            0.0,
            -0.25 * x1,
        ],
        [
            0.25 * (2.0 * k * x1 * x2),
            0.25 * (-a0 - w + k * (x1 * x1 + 3.0 * x2 * x2)),
            0.0,
            -0.25 * c0,
            -0.25 * x2,
        ],
        [4.0 * c0 * g * x1, 4.0 * c0 * g * x2, 0.0, 0.0, -c0],
    ]
}

/// Linearization at a fixed point: eigenvalues sorted descending by real
/// part plus the unstable eigenvector when the spectrum has exactly one
/// positive direction.
pub fn linearize(at: &ReducedState, params: &ModelParams) -> Result<FixedPointInfo> {
    let jac = jacobian(at, params);
    let m = CMat::from_real(&jac.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    let mut eigs = linalg::eigenvalues(&m)?;
    eigs.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());

    let positive: Vec<C64> = eigs.iter().cloned().filter(|l| l.re > 1e-8).collect();
    let unstable_dir = if positive.len() == 1 {
        let v = linalg::eigenvector(&m, positive[0])?;
        // The unstable eigenvalue is real; take the real part and
        // renormalize.
        let mut dir = [0.0f64; 5];
        // Rotate the complex scale so the vector is (numerically) real.
        let pivot = v
            .iter()
            .cloned()
            .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
            .unwrap();
        let phase = pivot / pivot.norm();
        let mut norm2 = 0.0;
        for (i, &c) in v.iter().enumerate() {
            let r = (c / phase).re;
            dir[i] = r;
            norm2 += r * r;
        }
        let norm = norm2.sqrt();
        dir.iter_mut().for_each(|d| *d /= norm);
        Some(dir)
    } else {
        None
    };

    let kind = if at.norm() < 1e-12 {
        FixedPointKind::Trivial
    } else {
        FixedPointKind::Circle
    };
    Ok(FixedPointInfo {
        kind,
        state: *at,
        eigenvalues: eigs,
        unstable_dir,
    })
}

/// The trivial fixed point plus (when γ > -3) the φ = 0 circle
/// representative, each with linearization data.
pub fn fixed_points(params: &ModelParams) -> Result<Vec<FixedPointInfo>> {
    let mut out = vec![linearize(&ReducedState::zero(), params)?];
    match circle_representative(params) {
        Ok(rep) => out.push(linearize(&rep, params)?),
        Err(_) => {
            // γ ≤ -3: only the trivial point exists.
        }
    }
    Ok(out)
}

/// Outcome of a shooting run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShootOutcome {
    /// Terminal state entered the origin ball of radius tol_origin.
    Success,
    /// Trajectory left the escape ball (no connection at these parameters).
    Escaped,
    /// ξ̃ budget exhausted before capture.
    OutOfTime,
}

#[derive(Debug, Clone)]
pub struct ShootResult {
    pub outcome: ShootOutcome,
    /// Densely sampled (ξ̃, state) along the orbit.
    pub trajectory: Vec<(f64, ReducedState)>,
    pub terminal_norm: f64,
    /// Origin-capture radius used.
    pub tol_origin: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct ShootOptions {
    pub integrator: IntegratorOptions,
    pub tol_origin: f64,
    /// Multiple of the circle-representative norm that counts as escape.
    pub escape_factor: f64,
}

impl Default for ShootOptions {
    fn default() -> Self {
        Self {
            integrator: IntegratorOptions::default(),
            tol_origin: 1e-6,
            escape_factor: 10.0,
        }
    }
}

/// Shoots from the circle representative along its unstable eigenvector.
///
/// The initial state is `circle + delta·v` with the sign of `v` chosen so
/// that |Â|² initially decreases (the front-facing side of the
/// one-dimensional unstable manifold). Integration runs until the origin
/// ball (success), the escape radius, or ξ̃_max = 200/min|Re λ_stable|.
pub fn shoot_heteroclinic(
    params: &ModelParams,
    delta: f64,
    opts: &ShootOptions,
) -> Result<ShootResult> {
    params.require_front_regime()?;
    if delta.is_nan() || delta <= 0.0 || delta > 1e-2 {
        return Err(Error::domain(format!(
            "delta must lie in (0, 1e-2], got {delta}"
        )));
    }
    let rep = circle_representative(params)?;
    let info = linearize(&rep, params)?;
    let dir = info.unstable_dir.ok_or_else(|| {
        Error::numerical("circle fixed point does not have a single unstable direction".to_string())
    })?;

    // d|Â|²/dξ̃ = 2Re(conj(Â)B̂); at the perturbed point ≈ 2δ·Re(a)·v_b.
    let a_dot_vb = rep.a.re * dir[2] + rep.a.im * dir[3];
    let sign = if a_dot_vb < 0.0 { 1.0 } else { -1.0 };

    let mut start = rep.to_array();
    for (s, d) in start.iter_mut().zip(&dir) {
        *s += sign * delta * d;
    }

    let stable_rate = stable_contraction_rate(params)?;
    let xi_max = 200.0 / stable_rate;
    let escape_radius = opts.escape_factor * rep.norm();
    let tol_origin = opts.tol_origin;

    let f = |_t: f64, y: &[f64; 5]| {
        let s = ReducedState::from_array(y);
        let d = reduced_rhs(&s, params);
        [d.a.re, d.a.im, d.b.re, d.b.im, d.w0]
    };
    let mut escaped = false;
    let sol = ode::integrate(
        &f,
        0.0,
        start,
        xi_max,
        &opts.integrator,
        &mut |_t, y: &[f64; 5]| {
            let norm = ReducedState::from_array(y).norm();
            if norm >= escape_radius {
                escaped = true;
                return true;
            }
            norm <= tol_origin
        },
    )?;

    let trajectory: Vec<(f64, ReducedState)> = sol
        .samples
        .iter()
        .map(|(t, y)| (*t, ReducedState::from_array(y)))
        .collect();
    let terminal_norm = trajectory.last().unwrap().1.norm();
    let outcome = if escaped {
        ShootOutcome::Escaped
    } else if sol.reason == StopReason::Event {
        ShootOutcome::Success
    } else {
        ShootOutcome::OutOfTime
    };
    Ok(ShootResult {
        outcome,
        trajectory,
        terminal_norm,
        tol_origin,
    })
}

/// Slowest contraction rate at the origin, min|Re λ| over the stable
/// spectrum {(-c₀±Δ)/8 (×2), -c₀}; sets the ξ̃ integration budget.
fn stable_contraction_rate(params: &ModelParams) -> Result<f64> {
    let delta = params.delta()?;
    Ok((params.c0 - delta) / 8.0)
}
