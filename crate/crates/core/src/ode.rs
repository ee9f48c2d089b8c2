//! Adaptive Dormand–Prince 5(4) integration for small ODE systems.
//!
//! The reduced center-manifold flow is mildly stiff at worst; accuracy
//! dominates, so an embedded explicit pair with PI-style step control and
//! per-step stop conditions is the right tool. States are fixed-size arrays.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Initial step; also the retry scale after rejections.
    pub h0: f64,
    /// Optional cap on the step size (dense trajectory output).
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            h0: 1e-3,
            max_step: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

/// Why the integration loop returned.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The stop condition fired.
    Event,
    /// Reached `t_end`.
    EndTime,
}

#[derive(Debug, Clone)]
pub struct OdeSolution<const N: usize> {
    /// Accepted steps (t, state), densely sampled; includes the initial point.
    pub samples: Vec<(f64, [f64; N])>,
    pub reason: StopReason,
    pub n_accepted: usize,
    pub n_rejected: usize,
}

impl<const N: usize> OdeSolution<N> {
    pub fn last(&self) -> (f64, [f64; N]) {
        *self.samples.last().unwrap()
    }
}

const A: [[f64; 6]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
];
const C: [f64; 6] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `dy/dt = f(t, y)` from `(t0, y0)` until `t_end`, an event, or
/// failure. `stop` is evaluated after each accepted step.
pub fn integrate<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &IntegratorOptions,
    stop: &mut dyn FnMut(f64, &[f64; N]) -> bool,
) -> Result<OdeSolution<N>> {
    let mut t = t0;
    let mut y = y0;
    let mut h = opts.h0.min(opts.max_step).min(t_end - t0);
    if h <= 0.0 {
        return Err(Error::domain("integration span must be positive".to_string()));
    }
    let mut samples = vec![(t, y)];
    let mut k = [[0.0f64; N]; 7];
    k[0] = f(t, &y);
    let mut n_accepted = 0usize;
    let mut n_rejected = 0usize;

    if stop(t, &y) {
        return Ok(OdeSolution {
            samples,
            reason: StopReason::Event,
            n_accepted,
            n_rejected,
        });
    }

    for _ in 0..opts.max_steps {
        if t >= t_end {
            return Ok(OdeSolution {
                samples,
                reason: StopReason::EndTime,
                n_accepted,
                n_rejected,
            });
        }
        h = h.min(t_end - t);
        if h < 1e-14 * (1.0 + t.abs()) {
            return Err(Error::numerical(format!(
                "step size underflow at t = {t} (h = {h})"
            )));
        }

        // Stages 2..7 (k[0] carries FSAL from the previous step).
        for s in 1..6 {
            let mut ys = y;
            for (j, row) in A[s].iter().enumerate().take(s) {
                for i in 0..N {
                    ys[i] += h * row * k[j][i];
                }
            }
            k[s] = f(t + C[s] * h, &ys);
        }
        let mut y5 = y;
        for (j, &w) in B5.iter().enumerate().take(6) {
            for i in 0..N {
                y5[i] += h * w * k[j][i];
            }
        }
        k[6] = f(t + h, &y5);

        // Embedded error estimate.
        let mut err_norm: f64 = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += (B5[j] - B4[j]) * kj[i];
            }
            e *= h;
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y5[i].abs());
            err_norm += (e / scale) * (e / scale);
        }
        err_norm = (err_norm / N as f64).sqrt();

        if !err_norm.is_finite() {
            return Err(Error::numerical(format!(
                "non-finite error estimate at t = {t}"
            )));
        }

        if err_norm <= 1.0 {
            t += h;
            y = y5;
            k[0] = k[6]; // FSAL
            samples.push((t, y));
            n_accepted += 1;
            if stop(t, &y) {
                return Ok(OdeSolution {
                    samples,
                    reason: StopReason::Event,
                    n_accepted,
                    n_rejected,
                });
            }
        } else {
            n_rejected += 1;
        }

        let factor = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h * factor).min(opts.max_step);
    }
    Err(Error::numerical(format!(
        "integration exceeded {} steps (t = {t})",
        opts.max_steps
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay_accuracy() {
        let f = |_t: f64, y: &[f64; 1]| [-2.0 * y[0]];
        let sol = integrate(&f, 0.0, [1.0], 3.0, &IntegratorOptions::default(), &mut |_, _| false)
            .unwrap();
        let (t, y) = sol.last();
        assert_eq!(sol.reason, StopReason::EndTime);
        assert!((t - 3.0).abs() < 1e-12);
        assert!((y[0] - (-6.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_order() {
        // One full period of x'' = -x; the 5th-order pair at rtol 1e-10
        // lands back at the start to ~1e-9.
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let sol = integrate(
            &f,
            0.0,
            [1.0, 0.0],
            std::f64::consts::TAU,
            &IntegratorOptions::default(),
            &mut |_, _| false,
        )
        .unwrap();
        let (_, y) = sol.last();
        assert!((y[0] - 1.0).abs() < 1e-8);
        assert!(y[1].abs() < 1e-8);
    }

    #[test]
    fn stop_condition_fires() {
        let f = |_t: f64, y: &[f64; 1]| [-y[0]];
        let sol = integrate(
            &f,
            0.0,
            [1.0],
            100.0,
            &IntegratorOptions::default(),
            &mut |_, y| y[0] <= 0.5,
        )
        .unwrap();
        assert_eq!(sol.reason, StopReason::Event);
        let (t, y) = sol.last();
        assert!(y[0] <= 0.5);
        // Event detected within one step of the exact crossing ln 2.
        assert!((std::f64::consts::LN_2 - 1e-12..1.2).contains(&t));
    }

    #[test]
    fn max_step_caps_sampling() {
        let f = |_t: f64, y: &[f64; 1]| [-0.01 * y[0]];
        let opts = IntegratorOptions {
            max_step: 0.05,
            ..Default::default()
        };
        let sol = integrate(&f, 0.0, [1.0], 1.0, &opts, &mut |_, _| false).unwrap();
        for w in sol.samples.windows(2) {
            assert!(w[1].0 - w[0].0 <= 0.05 + 1e-12);
        }
    }
}
