//! Complex polynomials and root finding.
//!
//! [`Poly::roots`] implements Aberth–Ehrlich simultaneous iteration with
//! Newton polishing. It is the deliberately independent second route for the
//! spatial-dynamics eigenvalues (the first being the dense QR eigensolver on
//! the companion matrices in [`crate::linalg`]).

use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};

/// Coefficients ascending: `c[0] + c[1] z + ... + c[d] z^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: C64) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::new(vec![C64::new(0.0, 0.0)]);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![C64::new(0.0, 0.0); self.degree() + other.degree() + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len().max(other.coeffs.len())];
        for (i, &a) in self.coeffs.iter().enumerate() {
            out[i] += a;
        }
        for (i, &b) in other.coeffs.iter().enumerate() {
            out[i] += b;
        }
        Poly::new(out)
    }

    pub fn scale(&self, factor: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * factor).collect())
    }

    /// (z - root) as a degree-1 polynomial.
    pub fn linear(root: C64) -> Poly {
        Poly::new(vec![-root, C64::new(1.0, 0.0)])
    }

    /// Companion matrix of the monic normalization (bottom-row form matching
    /// the spatial-dynamics blocks).
    pub fn companion(&self) -> CMat {
        let d = self.degree();
        assert!(d >= 1);
        let lead = self.coeffs[d];
        let bottom: Vec<C64> = (0..d).map(|k| -self.coeffs[k] / lead).collect();
        // Bottom-row companion: rows 0..d-1 are unit shifts, last row holds
        // -c_k/c_d; char poly λ^d + Σ (c_k/c_d) λ^k.
        CMat::companion(&bottom)
    }

    /// All roots by Aberth–Ehrlich iteration. Multiple roots converge to a
    /// cluster of radius ~sqrt(machine eps); callers with exactly known
    /// multiple roots (the ε = 0 spectra) bypass this.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let d = self.degree();
        if d == 0 {
            return Ok(vec![]);
        }
        if self.coeffs[d].norm() == 0.0 {
            return Err(Error::numerical(
                "leading coefficient is zero in root finder".to_string(),
            ));
        }
        if d == 1 {
            return Ok(vec![-self.coeffs[0] / self.coeffs[1]]);
        }
        if d == 2 {
            let a = self.coeffs[2];
            let b = self.coeffs[1];
            let c = self.coeffs[0];
            let disc = (b * b - 4.0 * a * c).sqrt();
            // Stable quadratic: avoid subtracting nearly equal quantities.
            let q = if (b + disc).norm() >= (b - disc).norm() {
                -0.5 * (b + disc)
            } else {
                -0.5 * (b - disc)
            };
            let r1 = q / a;
            let r2 = if q.norm() == 0.0 {
                C64::new(0.0, 0.0)
            } else {
                c / q
            };
            return Ok(vec![r1, r2]);
        }

        let monic: Vec<C64> = self.coeffs.iter().map(|&c| c / self.coeffs[d]).collect();
        let p = Poly::new(monic.clone());
        let dp = p.derivative();

        // Initial guesses on a circle of the classical Cauchy-bound radius,
        // with an angular offset so no guess starts on an axis.
        let radius = 1.0
            + monic[..d]
                .iter()
                .map(|c| c.norm())
                .fold(0.0f64, f64::max);
        let mut z: Vec<C64> = (0..d)
            .map(|k| {
                let angle = std::f64::consts::TAU * k as f64 / d as f64 + 0.41;
                radius * C64::new(angle.cos(), angle.sin())
            })
            .collect();

        let coeff_scale = monic.iter().map(|c| c.norm()).fold(1.0f64, f64::max);
        let mut converged = vec![false; d];
        for _sweep in 0..200 {
            let mut all_done = true;
            for i in 0..d {
                if converged[i] {
                    continue;
                }
                let pz = p.eval(z[i]);
                let magnitude = z[i].norm().max(1.0).powi(d as i32);
                if pz.norm() <= 1e-14 * coeff_scale * magnitude {
                    converged[i] = true;
                    continue;
                }
                let dpz = dp.eval(z[i]);
                let newton = if dpz.norm() > 0.0 {
                    pz / dpz
                } else {
                    C64::new(1e-8, 1e-8)
                };
                let mut repulsion = C64::new(0.0, 0.0);
                for (j, &zj) in z.iter().enumerate() {
                    if j != i {
                        let diff = z[i] - zj;
                        if diff.norm() > 1e-300 {
                            repulsion += C64::new(1.0, 0.0) / diff;
                        }
                    }
                }
                let denom = C64::new(1.0, 0.0) - newton * repulsion;
                let step = if denom.norm() > 1e-300 {
                    newton / denom
                } else {
                    newton
                };
                z[i] -= step;
                if step.norm() > 1e-15 * (1.0 + z[i].norm()) {
                    all_done = false;
                }
            }
            if all_done {
                break;
            }
        }
        // Newton polish.
        for zi in z.iter_mut() {
            for _ in 0..3 {
                let pz = p.eval(*zi);
                let dpz = dp.eval(*zi);
                if dpz.norm() == 0.0 {
                    break;
                }
                let step = pz / dpz;
                if !step.norm().is_finite() {
                    break;
                }
                *zi -= step;
            }
            if !zi.re.is_finite() || !zi.im.is_finite() {
                return Err(Error::numerical("root iteration diverged".to_string()));
            }
        }
        Ok(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_root_set(roots: &[C64], expect: &[C64], tol: f64) {
        assert_eq!(roots.len(), expect.len());
        let mut used = vec![false; expect.len()];
        for r in roots {
            let mut best = f64::INFINITY;
            let mut best_j = 0;
            for (j, e) in expect.iter().enumerate() {
                if !used[j] && (r - e).norm() < best {
                    best = (r - e).norm();
                    best_j = j;
                }
            }
            assert!(best < tol, "root {r} missed expected set by {best}");
            used[best_j] = true;
        }
    }

    #[test]
    fn roots_of_factored_quartic() {
        // (z-1)(z+2)(z-3i)(z+1-i)
        let p = Poly::linear(c(1.0, 0.0))
            .mul(&Poly::linear(c(-2.0, 0.0)))
            .mul(&Poly::linear(c(0.0, 3.0)))
            .mul(&Poly::linear(c(-1.0, 1.0)));
        let roots = p.roots().unwrap();
        assert_root_set(
            &roots,
            &[c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 3.0), c(-1.0, 1.0)],
            1e-11,
        );
    }

    #[test]
    fn quadratic_closed_form() {
        let p = Poly::from_real(&[2.0, -3.0, 1.0]); // (z-1)(z-2)
        let roots = p.roots().unwrap();
        assert_root_set(&roots, &[c(1.0, 0.0), c(2.0, 0.0)], 1e-14);
    }

    #[test]
    fn near_double_roots_resolved() {
        // (z - 1)(z - 1 - 1e-5): separation well above sqrt(eps).
        let p = Poly::linear(c(1.0, 0.0)).mul(&Poly::linear(c(1.0 + 1e-5, 0.0)));
        let roots = p.roots().unwrap();
        assert_root_set(&roots, &[c(1.0, 0.0), c(1.0 + 1e-5, 0.0)], 1e-9);
    }

    #[test]
    fn companion_of_monic_matches_roots() {
        let p = Poly::from_real(&[-6.0, 11.0, -6.0, 1.0]); // (z-1)(z-2)(z-3)
        let m = p.companion();
        let eigs = crate::linalg::eigenvalues(&m).unwrap();
        assert_root_set(&eigs, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], 1e-10);
    }

    #[test]
    fn eval_and_derivative() {
        let p = Poly::from_real(&[1.0, 0.0, -2.0, 4.0]);
        let z = c(0.5, -0.25);
        let dp = p.derivative();
        // Finite-difference check of the analytic derivative.
        let h = 1e-7;
        let fd = (p.eval(z + c(h, 0.0)) - p.eval(z - c(h, 0.0))) / c(2.0 * h, 0.0);
        assert!((dp.eval(z) - fd).norm() < 1e-6);
    }
}
