//! Reconstruction of modulating-front fields from a reduced trajectory.
//!
//! Along a heteroclinic orbit (Â, B̂, Ŵ₀)(ξ̃) of the reduced system the
//! approximate front fields in the slow variable y = εx - ε²c₀t are
//!
//! ```text
//! u_f(t,x) = ε·2|Â(y)|·cos(kc(x+x₀)),
//! v_f(t,x) = ε²[Ŵ₀(y) - 2γ|Â(y)|² - 2γ|Â(y)|²·cos(2kc(x+x₀))],
//! ```
//!
//! dropping the O(ε²)/O(ε³) remainders. The v-envelope splits as a mean
//! part V₀ = Ŵ₀ - 2γ|Â|² and a second-harmonic cosine amplitude
//! V₁ = -2γ|Â|²; at the circle fixed point V₀ vanishes and the fields
//! coincide with the leading-order periodic state.
//!
//! The envelope data |Â| and Ŵ₀ are interpolated in y by monotone cubics
//! and clamped to the adjacent fixed-point values outside the trajectory
//! range (the heteroclinic converges exponentially, so the clamp error is
//! below integrator tolerance).

use crate::error::{Error, Result};
use crate::field::FieldPair;
use crate::interp::MonotoneCubic;
use crate::params::ModelParams;
use crate::periodic;
use crate::reduced::{circle_representative, ReducedState};

/// Front envelope samples in the slow variable y.
#[derive(Debug, Clone)]
pub struct FrontProfile {
    pub y: Vec<f64>,
    pub a_abs: Vec<f64>,
    pub w0: Vec<f64>,
    /// d|Â|/dy and dŴ₀/dy from the trajectory states (used by the residual
    /// diagnostics; zero in clamped regions).
    pub da_abs: Vec<f64>,
    pub dw0: Vec<f64>,
    pub params: ModelParams,
    /// Fixed-point envelope values for clamping: (|Â|, Ŵ₀) behind the
    /// front and (0, 0) ahead.
    pub pattern_a: f64,
    pub pattern_w0: f64,
}

impl FrontProfile {
    /// Builds the profile from a shooting trajectory; `y_offset` shifts the
    /// interface (y = ξ̃ + y_offset).
    pub fn from_trajectory(
        traj: &[(f64, ReducedState)],
        params: &ModelParams,
        y_offset: f64,
    ) -> Result<Self> {
        if traj.len() < 2 {
            return Err(Error::domain("trajectory needs at least 2 samples".to_string()));
        }
        let rep = circle_representative(params)?;
        let mut y = Vec::with_capacity(traj.len());
        let mut a_abs = Vec::with_capacity(traj.len());
        let mut w0 = Vec::with_capacity(traj.len());
        let mut da_abs = Vec::with_capacity(traj.len());
        let mut dw0 = Vec::with_capacity(traj.len());
        for (xi, s) in traj {
            y.push(xi + y_offset);
            let mag = s.a.norm();
            a_abs.push(mag);
            w0.push(s.w0);
            // d|Â|/dy = Re(conj(Â)·B̂)/|Â| (chain rule along the orbit).
            da_abs.push(if mag > 1e-300 {
                (s.a.conj() * s.b).re / mag
            } else {
                0.0
            });
            dw0.push(-params.c0 * s.w0 + 2.0 * params.c0 * params.gamma * s.a.norm_sqr());
        }
        Ok(Self {
            y,
            a_abs,
            w0,
            da_abs,
            dw0,
            params: *params,
            pattern_a: rep.a.norm(),
            pattern_w0: rep.w0,
        })
    }

    /// Builds the profile with the envelope's half-amplitude crossing
    /// placed at `y_interface` (the natural way to seed a front at a chosen
    /// position on a PDE grid).
    pub fn from_trajectory_centered(
        traj: &[(f64, ReducedState)],
        params: &ModelParams,
        y_interface: f64,
    ) -> Result<Self> {
        let rep = circle_representative(params)?;
        let half = rep.a.norm() / 2.0;
        let k = traj
            .iter()
            .position(|(_, s)| s.a.norm() < half)
            .ok_or_else(|| {
                Error::domain(
                    "trajectory never crosses half the pattern amplitude".to_string(),
                )
            })?;
        let xi_cross = if k == 0 {
            traj[0].0
        } else {
            let (t0, s0) = traj[k - 1];
            let (t1, s1) = traj[k];
            let f = (s0.a.norm() - half) / (s0.a.norm() - s1.a.norm());
            t0 + f * (t1 - t0)
        };
        Self::from_trajectory(traj, params, y_interface - xi_cross)
    }

    /// A constant profile (used for consistency checks against the
    /// periodic state).
    pub fn constant(state: &ReducedState, params: &ModelParams, y_range: (f64, f64)) -> Self {
        let rep = circle_representative(params)
            .unwrap_or_else(|_| ReducedState::zero());
        Self {
            y: vec![y_range.0, y_range.1],
            a_abs: vec![state.a.norm(); 2],
            w0: vec![state.w0; 2],
            da_abs: vec![0.0; 2],
            dw0: vec![0.0; 2],
            params: *params,
            pattern_a: rep.a.norm(),
            pattern_w0: rep.w0,
        }
    }

    pub fn y_min(&self) -> f64 {
        self.y[0]
    }

    pub fn y_max(&self) -> f64 {
        *self.y.last().unwrap()
    }
}

/// v = w - γu², pointwise on matching grids.
pub fn w_to_v(u: &[f64], w: &[f64], gamma: f64) -> Result<Vec<f64>> {
    if u.len() != w.len() {
        return Err(Error::domain(format!(
            "grid mismatch: u has {} samples, w has {}",
            u.len(),
            w.len()
        )));
    }
    Ok(u.iter().zip(w).map(|(&ui, &wi)| wi - gamma * ui * ui).collect())
}

/// Interpolated envelopes evaluated on the grid at time t, plus their
/// y-derivatives.
pub struct SampledEnvelopes {
    pub a: Vec<f64>,
    pub w0: Vec<f64>,
    pub da: Vec<f64>,
    pub dw0: Vec<f64>,
}

/// How grid positions map to the slow variable.
#[derive(Debug, Clone, Copy)]
pub enum FrontGeometry {
    /// y = εx - ε²c₀t: a single interface, pattern to the left.
    HalfLine,
    /// y = ε|x - center| - ε²c₀t: a reflection-symmetric double front
    /// (pattern in the middle, zeros at both domain ends). The mirrored
    /// half is the reflected (left-moving) front, so the composite field is
    /// smooth and periodic, required whenever the field feeds spectral
    /// differentiation directly rather than a time stepper.
    Folded { center: f64 },
}

impl FrontGeometry {
    fn y(&self, eps: f64, c0: f64, x: f64, t: f64) -> f64 {
        match self {
            FrontGeometry::HalfLine => eps * x - eps * eps * c0 * t,
            FrontGeometry::Folded { center } => eps * (x - center).abs() - eps * eps * c0 * t,
        }
    }
}

/// Samples |Â|, Ŵ₀ (and their y-derivatives) at y = εx - ε²c₀t for every
/// grid point, clamping outside the trajectory to the fixed-point values.
pub fn sample_envelopes(
    profile: &FrontProfile,
    grid: &FieldPair,
    t: f64,
) -> Result<SampledEnvelopes> {
    let params = profile.params;
    let eps = params.eps;
    let y_lo = -eps * eps * params.c0 * t;
    let y_hi = eps * grid.grid.length() - eps * eps * params.c0 * t;
    if y_hi < profile.y_min() || y_lo > profile.y_max() {
        return Err(Error::domain(format!(
            "trajectory y-range [{:.3}, {:.3}] does not intersect the grid window [{y_lo:.3}, {y_hi:.3}]; required ξ̃-range [{:.3}, {:.3}]",
            profile.y_min(),
            profile.y_max(),
            y_lo,
            y_hi
        )));
    }
    sample_envelopes_with(profile, grid, t, FrontGeometry::HalfLine)
}

/// [`sample_envelopes`] with an explicit grid-to-y geometry.
pub fn sample_envelopes_with(
    profile: &FrontProfile,
    grid: &FieldPair,
    t: f64,
    geometry: FrontGeometry,
) -> Result<SampledEnvelopes> {
    let params = profile.params;
    let eps = params.eps;
    let a_itp = MonotoneCubic::new(profile.y.clone(), profile.a_abs.clone())?;
    let w_itp = MonotoneCubic::new(profile.y.clone(), profile.w0.clone())?;
    let da_itp = MonotoneCubic::new(profile.y.clone(), profile.da_abs.clone())?;
    let dw_itp = MonotoneCubic::new(profile.y.clone(), profile.dw0.clone())?;

    let n = grid.n();
    let mut a = Vec::with_capacity(n);
    let mut w0 = Vec::with_capacity(n);
    let mut da = Vec::with_capacity(n);
    let mut dw0 = Vec::with_capacity(n);
    for x in grid.grid.x() {
        let y = geometry.y(eps, params.c0, x, t);
        if y < profile.y_min() {
            a.push(profile.pattern_a);
            w0.push(profile.pattern_w0);
            da.push(0.0);
            dw0.push(0.0);
        } else if y > profile.y_max() {
            a.push(0.0);
            w0.push(0.0);
            da.push(0.0);
            dw0.push(0.0);
        } else {
            a.push(a_itp.eval(y));
            w0.push(w_itp.eval(y));
            da.push(da_itp.eval(y));
            dw0.push(dw_itp.eval(y));
        }
    }
    Ok(SampledEnvelopes { a, w0, da, dw0 })
}

/// Assembles (u_f, v_f) on the grid at time t from a front profile.
pub fn assemble_front(
    profile: &FrontProfile,
    params: &ModelParams,
    t: f64,
    grid: &FieldPair,
) -> Result<FieldPair> {
    // Coverage check happens inside the half-line sampler.
    let _ = sample_envelopes(profile, grid, t)?;
    assemble_front_with(profile, params, t, grid, FrontGeometry::HalfLine)
}

/// [`assemble_front`] with an explicit grid-to-y geometry.
pub fn assemble_front_with(
    profile: &FrontProfile,
    params: &ModelParams,
    t: f64,
    grid: &FieldPair,
    geometry: FrontGeometry,
) -> Result<FieldPair> {
    let env = sample_envelopes_with(profile, grid, t, geometry)?;
    let eps = params.eps;
    let gamma = params.gamma;
    let kc = params.kc;
    let x0 = params.x0;
    let mut u = Vec::with_capacity(grid.n());
    let mut v = Vec::with_capacity(grid.n());
    for (j, x) in grid.grid.x().enumerate() {
        let carrier = (kc * (x + x0)).cos();
        let carrier2 = (2.0 * kc * (x + x0)).cos();
        let a = env.a[j];
        let w0 = env.w0[j];
        u.push(eps * 2.0 * a * carrier);
        v.push(eps * eps * (w0 - 2.0 * gamma * a * a - 2.0 * gamma * a * a * carrier2));
    }
    let mut out = FieldPair::zeros(grid.grid.clone());
    out.set_u(&u);
    out.set_v(&v);
    Ok(out)
}

/// The leading-order periodic fields sampled on the grid (consistency
/// reference for constant-trajectory assembly).
pub fn periodic_reference(params: &ModelParams, grid: &FieldPair) -> Result<(Vec<f64>, Vec<f64>)> {
    let state = periodic::leading_order(params)?;
    let u: Vec<f64> = grid.grid.x().map(|x| state.eval_u(x)).collect();
    let v: Vec<f64> = grid.grid.x().map(|x| state.eval_v(x)).collect();
    Ok((u, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_grid;
    use crate::reduced::{shoot_heteroclinic, ShootOptions, ShootOutcome};
    use proptest::prelude::*;

    fn params(gamma: f64, eps: f64) -> ModelParams {
        ModelParams::new(3.0, 7.0, gamma, eps).unwrap()
    }

    #[test]
    fn w_to_v_reference_cases() {
        // γ=0 → v = w.
        let u = vec![1.0, 2.0, 3.0];
        let w = vec![0.5, -0.5, 0.0];
        assert_eq!(w_to_v(&u, &w, 0.0).unwrap(), w);
        // u = const a, w = 0 → v = -γa².
        let u = vec![2.0; 4];
        let w = vec![0.0; 4];
        let v = w_to_v(&u, &w, 0.3).unwrap();
        for vi in v {
            assert!((vi + 0.3 * 4.0).abs() < 1e-15);
        }
        // Grid mismatch.
        assert!(w_to_v(&[1.0], &[1.0, 2.0], 1.0).is_err());
    }

    proptest! {
        // Round-trip v → w → v is exact to 1e-15 (algebraic inverse).
        #[test]
        fn w_v_round_trip(seed in 0u64..500, gamma in -2.0f64..5.0) {
            let mut state = seed.wrapping_mul(0x2545F4914F6CDD1D).wrapping_add(7);
            let mut next = || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state as f64 / u64::MAX as f64) - 0.5
            };
            let u: Vec<f64> = (0..32).map(|_| next()).collect();
            let v: Vec<f64> = (0..32).map(|_| next()).collect();
            let w: Vec<f64> = u.iter().zip(&v).map(|(&ui, &vi)| vi + gamma * ui * ui).collect();
            let back = w_to_v(&u, &w, gamma).unwrap();
            for (a, b) in back.iter().zip(&v) {
                prop_assert!((a - b).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn constant_circle_trajectory_reproduces_periodic_state() {
        // trajectory ≡ circle point: u_f, v_f equal the leading-order
        // periodic fields and the v-mean vanishes
        // (Ŵ₀ - 2γ|Â|² = 2γα₀/(3+γ) - 2γα₀/(3+γ) = 0).
        for &gamma in &[0.0, 1.0, 2.5] {
            let p = params(gamma, 0.1);
            let rep = circle_representative(&p).unwrap();
            let grid = make_grid(256, 4, &p).unwrap();
            let profile = FrontProfile::constant(&rep, &p, (-1.0, 1.0e5));
            let fields = assemble_front(&profile, &p, 0.0, &grid).unwrap();
            let (u_ref, v_ref) = periodic_reference(&p, &grid).unwrap();
            let u = fields.u();
            let v = fields.v();
            for j in 0..grid.n() {
                assert!((u[j] - u_ref[j]).abs() < 1e-13, "gamma={gamma} u at {j}");
                assert!((v[j] - v_ref[j]).abs() < 1e-13, "gamma={gamma} v at {j}");
            }
            assert!(fields.mean_v().abs() < 1e-14);
        }
    }

    #[test]
    fn zero_trajectory_gives_zero_fields() {
        let p = params(1.0, 0.1);
        let grid = make_grid(64, 2, &p).unwrap();
        let profile = FrontProfile::constant(&ReducedState::zero(), &p, (-1.0, 1.0e4));
        let fields = assemble_front(&profile, &p, 0.0, &grid).unwrap();
        assert!(fields.sup_norm_u() < 1e-15);
        assert!(fields.sup_norm_v() < 1e-15);
    }

    #[test]
    fn gamma_zero_v_vanishes() {
        let p = params(0.0, 0.1);
        let r = shoot_heteroclinic(&p, 1e-5, &ShootOptions::default()).unwrap();
        let profile = FrontProfile::from_trajectory(&r.trajectory, &p, 0.0).unwrap();
        let grid = make_grid(512, 40, &p).unwrap();
        let fields = assemble_front(&profile, &p, 0.0, &grid).unwrap();
        assert!(fields.sup_norm_v() < 1e-15);
        assert!(fields.sup_norm_u() > 0.1);
    }

    #[test]
    fn boundary_conditions_of_assembled_front() {
        // Left cells match the leading-order periodic amplitude within 5%;
        // right cells are ≲ tol_origin·ε.
        let p = params(0.5, 0.1);
        let r = shoot_heteroclinic(&p, 1e-5, &ShootOptions::default()).unwrap();
        assert_eq!(r.outcome, ShootOutcome::Success);
        // Interface at one third of an 80-period box.
        let grid = make_grid(2048, 80, &p).unwrap();
        let y_interface = p.eps * grid.grid.length() / 3.0;
        let profile =
            FrontProfile::from_trajectory_centered(&r.trajectory, &p, y_interface).unwrap();
        let fields = assemble_front(&profile, &p, 0.0, &grid).unwrap();
        let u = fields.u();
        let n = grid.n();

        let amp_ref = p.eps * 2.0 * periodic::amplitude_fixed_point(&p).unwrap();
        let left_max = u[..n / 16].iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        assert!((left_max - amp_ref).abs() / amp_ref < 0.05, "left amplitude {left_max}");

        let right_max = u[n - n / 16..].iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        assert!(right_max <= 1.01 * r.tol_origin * p.eps * 2.0, "right tail {right_max}");

        // Profile endpoint invariants.
        assert!((profile.a_abs[0] - profile.pattern_a).abs() <= 10.0 * 1e-5);
        assert!(*profile.a_abs.last().unwrap() <= r.tol_origin);
        assert!((profile.w0[0] - profile.pattern_w0).abs() <= 10.0 * 1e-5);
        assert!(profile.w0.last().unwrap().abs() <= r.tol_origin);

        // Mean of assembled v over the domain: tends to zero as the domain
        // grows symmetric around the interface; bounded loosely here.
        assert!(fields.mean_v().abs() < p.eps * p.eps);
    }

    #[test]
    fn assembled_fields_round_trip_and_stay_hermitian() {
        // FieldPairs produced by assembly keep Hermitian symmetry and
        // round-trip through the transforms to <= 1e-12 relative error.
        let p = params(0.5, 0.1);
        let r = shoot_heteroclinic(&p, 1e-5, &ShootOptions::default()).unwrap();
        let grid = make_grid(512, 40, &p).unwrap();
        let y_interface = p.eps * grid.grid.length() / 3.0;
        let profile =
            FrontProfile::from_trajectory_centered(&r.trajectory, &p, y_interface).unwrap();
        let fields = assemble_front(&profile, &p, 0.0, &grid).unwrap();
        assert!(fields.hermitian_defect() < 1e-13);
        let back = grid.grid.forward(&fields.u());
        let scale = fields.u_hat.iter().map(|c| c.norm()).fold(1e-300, f64::max);
        for (a, b) in fields.u_hat.iter().zip(&back) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn coverage_check_fires() {
        let p = params(0.5, 0.1);
        let rep = circle_representative(&p).unwrap();
        let grid = make_grid(64, 2, &p).unwrap();
        // Trajectory window entirely left of the grid's y-window.
        let profile = FrontProfile::constant(&rep, &p, (-100.0, -50.0));
        let err = assemble_front(&profile, &p, 0.0, &grid);
        assert!(err.is_err());
    }

    #[test]
    fn v_mean_relation_on_grid() {
        // v_f = w_f - γu_f² pointwise, with w_f the assembled Ŵ₀ envelope
        // field: checks the W ↔ V transform wiring end to end.
        let p = params(1.5, 0.1);
        let r = shoot_heteroclinic(&p, 1e-5, &ShootOptions::default()).unwrap();
        let grid = make_grid(1024, 60, &p).unwrap();
        let y_interface = p.eps * grid.grid.length() / 3.0;
        let profile =
            FrontProfile::from_trajectory_centered(&r.trajectory, &p, y_interface).unwrap();
        let fields = assemble_front(&profile, &p, 0.0, &grid).unwrap();
        let env = sample_envelopes(&profile, &grid, 0.0).unwrap();
        let u = fields.u();
        let v = fields.v();
        // w envelope in physical space: ε²Ŵ₀(y) (mean mode only at leading
        // order; harmonic content of w comes entirely from γu²).
        // The identity v_f = w_f - γu_f² is exact pointwise:
        // γ(ε2a·cos)² = ε²(2γa² + 2γa²cos2).
        for j in 0..grid.n() {
            let w = p.eps * p.eps * env.w0[j];
            let expect = w - p.gamma * u[j] * u[j];
            assert!(
                (v[j] - expect).abs() <= 1e-12,
                "v relation off by {} at {j}",
                (v[j] - expect).abs()
            );
        }
    }
}
