//! Thin singular value decomposition via one-sided Jacobi rotations.
//!
//! For an m x n input (any shape) this produces U (m x k), s (k, descending,
//! non-negative) and V (n x k) with k = min(m, n) such that
//! `Q = U diag(s) V^T`. One-sided Jacobi is slow in the asymptotic sense but
//! simple, accurate, and more than fast enough for the projection matrices
//! handled here (at most a few hundred columns).

use crate::error::{KgaError, Result};
use crate::kernels::matrix::{dot, norm2, DenseMatrix};

pub struct Svd {
    /// Left singular vectors, one per column, m x k.
    pub u: DenseMatrix,
    /// Singular values, descending.
    pub s: Vec<f64>,
    /// Right singular vectors, one per column, n x k.
    pub v: DenseMatrix,
}

const MAX_SWEEPS: usize = 64;
const JACOBI_TOL: f64 = 1e-14;

pub fn svd(m: &DenseMatrix) -> Result<Svd> {
    if !m.is_finite() {
        return Err(KgaError::Numeric("svd input has non-finite entries".into()));
    }
    if m.rows() >= m.cols() {
        svd_tall(m)
    } else {
        // Decompose the transpose and swap factors: A^T = U S V^T => A = V S U^T.
        let t = svd_tall(&m.transpose())?;
        Ok(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        })
    }
}

fn svd_tall(m: &DenseMatrix) -> Result<Svd> {
    let (rows, cols) = (m.rows(), m.cols());
    // Work on columns: a[j] is the j-th column of the evolving matrix.
    let mut a: Vec<Vec<f64>> = (0..cols)
        .map(|j| (0..rows).map(|i| m.at(i, j)).collect())
        .collect();
    let mut v: Vec<Vec<f64>> = (0..cols)
        .map(|j| {
            let mut e = vec![0.0; cols];
            e[j] = 1.0;
            e
        })
        .collect();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0usize;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let app = dot(&a[p], &a[p]);
                let aqq = dot(&a[q], &a[q]);
                let apq = dot(&a[p], &a[q]);
                if apq.abs() <= JACOBI_TOL * (app * aqq).sqrt() || apq == 0.0 {
                    continue;
                }
                off += 1;
                // Jacobi rotation zeroing the (p,q) inner product.
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut a, p, q, c, s);
                rotate_pair(&mut v, p, q, c, s);
            }
        }
        if off == 0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(KgaError::Numeric(format!(
            "svd failed to converge in {} sweeps",
            MAX_SWEEPS
        )));
    }

    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = a.iter().map(|col| norm2(col)).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut u = DenseMatrix::zeros(rows, cols);
    let mut vm = DenseMatrix::zeros(cols, cols);
    let mut s = Vec::with_capacity(cols);
    let max_norm = norms.iter().cloned().fold(0.0f64, f64::max);
    let rank_tol = max_norm * 1e-13;
    let mut filled = 0usize;
    for (k, &j) in order.iter().enumerate() {
        s.push(norms[j]);
        for i in 0..cols {
            *vm.at_mut(i, k) = v[j][i];
        }
        if norms[j] > rank_tol && norms[j] > 0.0 {
            for i in 0..rows {
                *u.at_mut(i, k) = a[j][i] / norms[j];
            }
            filled = k + 1;
        }
    }
    // Numerically zero singular directions leave U columns undetermined;
    // complete them to an orthonormal set so U^T U = I holds unconditionally.
    complete_basis(&mut u, filled);

    Ok(Svd { u, s, v: vm })
}

fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let n = cols[p].len();
    for i in 0..n {
        let vp = cols[p][i];
        let vq = cols[q][i];
        cols[p][i] = c * vp - s * vq;
        cols[q][i] = s * vp + c * vq;
    }
}

/// Fill columns `filled..` of `u` with unit vectors orthogonal to all
/// earlier columns, chosen deterministically from the canonical basis.
fn complete_basis(u: &mut DenseMatrix, filled: usize) {
    let (rows, cols) = (u.rows(), u.cols());
    let mut next = filled;
    let mut candidate = 0usize;
    while next < cols && candidate < rows {
        let mut col = vec![0.0; rows];
        col[candidate] = 1.0;
        candidate += 1;
        // Gram-Schmidt against everything already placed, twice for stability.
        for _ in 0..2 {
            for k in 0..next {
                let proj: f64 = (0..rows).map(|i| col[i] * u.at(i, k)).sum();
                for (i, item) in col.iter_mut().enumerate() {
                    *item -= proj * u.at(i, k);
                }
            }
        }
        let n = norm2(&col);
        if n > 0.5 {
            for (i, item) in col.iter().enumerate() {
                *u.at_mut(i, next) = item / n;
            }
            next += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::assert_abs_diff_eq;

    fn reconstruct(d: &Svd) -> DenseMatrix {
        let k = d.s.len();
        let mut us = DenseMatrix::zeros(d.u.rows(), k);
        for i in 0..d.u.rows() {
            for j in 0..k {
                *us.at_mut(i, j) = d.u.at(i, j) * d.s[j];
            }
        }
        us.matmul(&d.v.transpose()).unwrap()
    }

    fn max_orth_err(m: &DenseMatrix) -> f64 {
        let g = m.transpose().matmul(m).unwrap();
        let mut err = 0.0f64;
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                let want = if i == j { 1.0 } else { 0.0 };
                err = err.max((g.at(i, j) - want).abs());
            }
        }
        err
    }

    #[test]
    fn identity_has_unit_singular_values() {
        let d = svd(&DenseMatrix::identity(4)).unwrap();
        for &s in &d.s {
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn diagonal_singular_values_descend() {
        let mut m = DenseMatrix::zeros(3, 3);
        *m.at_mut(0, 0) = 1.0;
        *m.at_mut(1, 1) = 3.0;
        *m.at_mut(2, 2) = 2.0;
        let d = svd(&m).unwrap();
        assert_abs_diff_eq!(d.s[0], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.s[1], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.s[2], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn random_rect_reconstructs() {
        let mut rng = stream(11, "svd.test");
        for &(r, c) in &[(8usize, 5usize), (5, 8), (6, 6)] {
            let m = DenseMatrix::uniform(r, c, -1.0, 1.0, &mut rng);
            let d = svd(&m).unwrap();
            let back = reconstruct(&d);
            let mut diff = 0.0f64;
            for i in 0..r {
                for j in 0..c {
                    diff += (m.at(i, j) - back.at(i, j)).powi(2);
                }
            }
            let rel = diff.sqrt() / m.frobenius_norm();
            assert!(rel <= 1e-8, "reconstruction error {rel}");
            assert!(max_orth_err(&d.u) <= 1e-8);
            assert!(max_orth_err(&d.v) <= 1e-8);
            assert!(d.s.windows(2).all(|w| w[0] >= w[1]));
            assert!(d.s.iter().all(|&s| s >= 0.0));
        }
    }

    #[test]
    fn rank_deficient_keeps_u_orthonormal() {
        // Two identical columns: rank 1 out of 2.
        let m = DenseMatrix::from_vec(3, 2, vec![1.0, 1.0, 2.0, 2.0, -1.0, -1.0]).unwrap();
        let d = svd(&m).unwrap();
        assert!(d.s[1].abs() < 1e-10);
        assert!(max_orth_err(&d.u) <= 1e-8);
        let back = reconstruct(&d);
        for i in 0..3 {
            for j in 0..2 {
                assert_abs_diff_eq!(back.at(i, j), m.at(i, j), epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn non_finite_input_rejected() {
        let mut m = DenseMatrix::zeros(2, 2);
        *m.at_mut(0, 0) = f64::INFINITY;
        assert!(matches!(svd(&m), Err(KgaError::Numeric(_))));
    }
}
