//! Small dense linear-algebra kernels.
//!
//! Everything here targets the tiny systems this crate actually solves: the
//! 4×4/2×2 spatial-dynamics blocks, the 5×5 reduced Jacobian and the ~70
//! unknowns of the periodic Newton system. Eigenvalues come from a complex
//! shifted-QR iteration on the Hessenberg form; the independent cross-check
//! against polynomial root deflation lives in [`crate::poly`].

use crate::error::{Error, Result};
use num_complex::Complex64;

pub type C64 = Complex64;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub n: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n);
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                m[(i, j)] = C64::new(v, 0.0);
            }
        }
        m
    }

    /// Companion matrix with unit super-shifts and the given bottom row.
    pub fn companion(bottom: &[C64]) -> Self {
        let n = bottom.len();
        let mut m = Self::zeros(n);
        for i in 0..n - 1 {
            m[(i, i + 1)] = C64::new(1.0, 0.0);
        }
        for (j, &v) in bottom.iter().enumerate() {
            m[(n - 1, j)] = v;
        }
        m
    }

    pub fn mat_vec(&self, x: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut y = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..n {
                acc += self[(i, j)] * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

// ---------------------------------------------------------------------------
// LU decomposition (partial pivoting)
// ---------------------------------------------------------------------------

/// Solves A x = b in place for real A. Returns a crude condition indicator
/// max|pivot| / min|pivot| alongside the solution.
pub fn lu_solve_real(a: &mut [f64], n: usize, b: &mut [f64]) -> Result<f64> {
    assert_eq!(a.len(), n * n);
    assert_eq!(b.len(), n);
    let mut piv_min = f64::INFINITY;
    let mut piv_max = 0.0f64;
    for col in 0..n {
        let mut p = col;
        let mut best = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return Err(Error::numerical(format!(
                "singular matrix in LU at column {col} (pivot {best})"
            )));
        }
        if p != col {
            for j in 0..n {
                a.swap(col * n + j, p * n + j);
            }
            b.swap(col, p);
        }
        piv_min = piv_min.min(best);
        piv_max = piv_max.max(best);
        let inv = 1.0 / a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] * inv;
            a[r * n + col] = f;
            for j in col + 1..n {
                a[r * n + j] -= f * a[col * n + j];
            }
            b[r] -= f * b[col];
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i * n + j] * b[j];
        }
        b[i] = s / a[i * n + i];
    }
    Ok(piv_max / piv_min)
}

/// Complex LU solve, same contract as [`lu_solve_real`].
pub fn lu_solve_complex(a: &mut CMat, b: &mut [C64]) -> Result<f64> {
    let n = a.n;
    assert_eq!(b.len(), n);
    let mut piv_min = f64::INFINITY;
    let mut piv_max = 0.0f64;
    for col in 0..n {
        let mut p = col;
        let mut best = a[(col, col)].norm();
        for r in col + 1..n {
            let v = a[(r, col)].norm();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return Err(Error::numerical(format!(
                "singular complex matrix in LU at column {col}"
            )));
        }
        if p != col {
            for j in 0..n {
                let tmp = a[(col, j)];
                a[(col, j)] = a[(p, j)];
                a[(p, j)] = tmp;
            }
            b.swap(col, p);
        }
        piv_min = piv_min.min(best);
        piv_max = piv_max.max(best);
        let inv = C64::new(1.0, 0.0) / a[(col, col)];
        for r in col + 1..n {
            let f = a[(r, col)] * inv;
            a[(r, col)] = f;
            for j in col + 1..n {
                let sub = f * a[(col, j)];
                a[(r, j)] -= sub;
            }
            let sub = f * b[col];
            b[r] -= sub;
        }
    }
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[(i, j)] * b[j];
        }
        b[i] = s / a[(i, i)];
    }
    Ok(piv_max / piv_min)
}

// ---------------------------------------------------------------------------
// Eigenvalues: complex Hessenberg QR with Wilkinson shifts
// ---------------------------------------------------------------------------

/// Parlett–Reinsch balancing: diagonal similarity with powers of two so row
/// and column norms match. Companion matrices with large bottom-row entries
/// lose ~|A|·ε of eigenvalue accuracy without this.
fn balance(a: &mut CMat) {
    let n = a.n;
    let radix = 2.0f64;
    for _ in 0..32 {
        let mut converged = true;
        for i in 0..n {
            let mut c: f64 = 0.0;
            let mut r: f64 = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].norm();
                    r += a[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut f = 1.0;
            let s = c + r;
            let mut c_scaled = c;
            let mut r_scaled = r;
            while c_scaled < r_scaled / radix {
                c_scaled *= radix;
                r_scaled /= radix;
                f *= radix;
            }
            while c_scaled >= r_scaled * radix {
                c_scaled /= radix;
                r_scaled *= radix;
                f /= radix;
            }
            if (c_scaled + r_scaled) < 0.95 * s && f != 1.0 {
                converged = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    a[(i, j)] *= inv;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
        if converged {
            break;
        }
    }
}

fn hessenberg_reduce(a: &mut CMat) {
    let n = a.n;
    for col in 0..n.saturating_sub(2) {
        let mut norm2 = 0.0;
        for r in col + 1..n {
            norm2 += a[(r, col)].norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            continue;
        }
        let pivot = a[(col + 1, col)];
        let phase = if pivot.norm() > 0.0 {
            pivot / pivot.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = (col + 1..n).map(|r| a[(r, col)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // A <- H A with H = I - beta v v^H on rows col+1..n.
        for j in col..n {
            let mut dot = C64::new(0.0, 0.0);
            for (k, vk) in v.iter().enumerate() {
                dot += vk.conj() * a[(col + 1 + k, j)];
            }
            dot *= beta;
            for (k, vk) in v.iter().enumerate() {
                let sub = *vk * dot;
                a[(col + 1 + k, j)] -= sub;
            }
        }
        // A <- A H on columns col+1..n.
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for (k, vk) in v.iter().enumerate() {
                dot += a[(i, col + 1 + k)] * *vk;
            }
            dot *= beta;
            for (k, vk) in v.iter().enumerate() {
                let sub = dot * vk.conj();
                a[(i, col + 1 + k)] -= sub;
            }
        }
    }
}

fn eig2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    // Eigenvalues of [[a, b], [c, d]]; larger-magnitude root first, partner
    // from the product to avoid cancellation.
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - 4.0 * det).sqrt();
    let r1 = (tr + disc) * 0.5;
    let r2 = (tr - disc) * 0.5;
    let big = if r1.norm() >= r2.norm() { r1 } else { r2 };
    if big.norm() == 0.0 {
        (r1, r2)
    } else {
        (big, det / big)
    }
}

/// Complex Givens rotation à la zlartg: returns (c, s) with c real such that
/// [c, s; -conj(s), c] · (f, g)ᵀ = (r, 0)ᵀ.
fn givens(f: C64, g: C64) -> (f64, C64) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if fn_ == 0.0 {
        return (0.0, g.conj() / gn);
    }
    let d = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / d;
    let s = (f / fn_) * g.conj() / d;
    (c, s)
}

/// Eigenvalues of a general small complex matrix: Hessenberg reduction, then
/// explicit single-shift QR with deflation.
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>> {
    let n = m.n;
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    if n == 2 {
        let (l1, l2) = eig2(m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
        return Ok(vec![l1, l2]);
    }
    let mut h = m.clone();
    balance(&mut h);
    hessenberg_reduce(&mut h);
    let mut eigs = Vec::with_capacity(n);
    let mut hi = n;
    let mut iters_this_block = 0usize;
    let max_iters = 100 * n;
    let mut total_iters = 0usize;
    while hi > 0 {
        if hi == 1 {
            eigs.push(h[(0, 0)]);
            break;
        }
        // Find the top of the active unreduced block, deflating negligible
        // subdiagonal entries on the way.
        let mut lo = hi - 1;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { 1.0 } else { s };
            if h[(lo, lo - 1)].norm() <= f64::EPSILON * s {
                h[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi - 1 {
            eigs.push(h[(hi - 1, hi - 1)]);
            hi -= 1;
            iters_this_block = 0;
            continue;
        }
        if hi - lo == 2 {
            let (l1, l2) = eig2(
                h[(lo, lo)],
                h[(lo, lo + 1)],
                h[(lo + 1, lo)],
                h[(lo + 1, lo + 1)],
            );
            eigs.push(l1);
            eigs.push(l2);
            hi = lo;
            iters_this_block = 0;
            continue;
        }
        total_iters += 1;
        iters_this_block += 1;
        if total_iters > max_iters {
            return Err(Error::numerical(format!(
                "QR iteration failed to converge after {max_iters} sweeps (n = {n})"
            )));
        }
        let corner = h[(hi - 1, hi - 1)];
        let shift = if iters_this_block.is_multiple_of(12) {
            // Exceptional shift to break rare cycling.
            corner + C64::new(1.5 * h[(hi - 1, hi - 2)].norm(), 0.0)
        } else {
            let (l1, l2) = eig2(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            );
            if (l1 - corner).norm() <= (l2 - corner).norm() {
                l1
            } else {
                l2
            }
        };
        for i in lo..hi {
            h[(i, i)] -= shift;
        }
        // QR factorization of the shifted Hessenberg block by Givens
        // rotations on adjacent rows...
        let mut rots = Vec::with_capacity(hi - lo - 1);
        for i in lo..hi - 1 {
            let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
            for j in i..hi {
                let t1 = h[(i, j)];
                let t2 = h[(i + 1, j)];
                h[(i, j)] = c * t1 + s * t2;
                h[(i + 1, j)] = -s.conj() * t1 + c * t2;
            }
            rots.push((c, s));
        }
        // ...then RQ by applying the adjoint rotations to columns.
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let i = lo + idx;
            let top = (i + 2).min(hi);
            for r in lo..top {
                let t1 = h[(r, i)];
                let t2 = h[(r, i + 1)];
                h[(r, i)] = c * t1 + s.conj() * t2;
                h[(r, i + 1)] = -s * t1 + c * t2;
            }
        }
        for i in lo..hi {
            h[(i, i)] += shift;
        }
    }
    Ok(eigs)
}

/// Inverse iteration for the eigenvector of `m` at (approximate) eigenvalue
/// `lambda`. Deterministic start vector; a few iterations suffice for the
/// well-separated eigenvalues this crate feeds in.
pub fn eigenvector(m: &CMat, lambda: C64) -> Result<Vec<C64>> {
    let n = m.n;
    // Tiny diagonal offset keeps the shifted matrix invertible when lambda is
    // numerically exact.
    let scale: f64 = m.data.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let offset = C64::new(1e-13 * scale, 1e-13 * scale);
    let mut x: Vec<C64> = (0..n)
        .map(|k| C64::new(1.0 + 0.3 * (k as f64 + 1.0).sin(), 0.1 * (k as f64 + 0.7).cos()))
        .collect();
    for _ in 0..3 {
        let mut shifted = m.clone();
        for d in 0..n {
            shifted[(d, d)] -= lambda + offset;
        }
        lu_solve_complex(&mut shifted, &mut x)?;
        let norm = x.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::numerical(
                "inverse iteration produced a non-finite vector".to_string(),
            ));
        }
        x.iter_mut().for_each(|c| *c /= norm);
    }
    Ok(x)
}
