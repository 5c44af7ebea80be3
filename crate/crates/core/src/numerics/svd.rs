//! Singular value decomposition, pseudo-inverse and least squares.

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::float::{cast, to_f64, Float};

/// Default relative cutoff for singular values in [`pseudo_inverse`].
pub const DEFAULT_RCOND: f64 = 1e-12;

const MAX_SWEEPS: usize = 60;

/// Thin SVD `a = u * diag(sigma) * v^T`, singular values descending.
#[derive(Debug, Clone)]
pub struct Svd<F> {
    pub u: Matrix<F>,
    pub sigma: Vec<F>,
    pub v: Matrix<F>,
}

/// One-sided Jacobi (Hestenes) SVD.
///
/// Column pairs of the working copy are rotated until all are mutually
/// orthogonal; column norms then give the singular values. Quadratic
/// convergence makes the sweep cap generous for the dense sizes this crate
/// handles. Matrices with more columns than rows are factored through their
/// transpose.
pub fn svd<F: Float>(a: &Matrix<F>) -> Result<Svd<F>> {
    if a.rows() < a.cols() {
        let t = svd(&a.transpose())?;
        return Ok(Svd {
            u: t.v,
            sigma: t.sigma,
            v: t.u,
        });
    }

    let m = a.rows();
    let n = a.cols();
    // Column-major working copy: cols[j] is the j-th column of the rotated a.
    let mut cols: Vec<Vec<F>> = (0..n).map(|j| a.col_vec(j)).collect();
    let mut v_cols: Vec<Vec<F>> = (0..n)
        .map(|j| {
            let mut e = vec![F::zero(); n];
            e[j] = F::one();
            e
        })
        .collect();

    let tol = F::epsilon() * cast::<F>(8.0);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = F::zero();
                let mut beta = F::zero();
                let mut gamma = F::zero();
                for i in 0..m {
                    alpha = alpha + cols[p][i] * cols[p][i];
                    beta = beta + cols[q][i] * cols[q][i];
                    gamma = gamma + cols[p][i] * cols[q][i];
                }
                if gamma.abs() <= tol * (alpha * beta).sqrt() || gamma == F::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (cast::<F>(2.0) * gamma);
                let t = {
                    let sign = if zeta >= F::zero() { F::one() } else { -F::one() };
                    sign / (zeta.abs() + (F::one() + zeta * zeta).sqrt())
                };
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let vp = cols[p][i];
                    let vq = cols[q][i];
                    cols[p][i] = c * vp - s * vq;
                    cols[q][i] = s * vp + c * vq;
                }
                for i in 0..n {
                    let vp = v_cols[p][i];
                    let vq = v_cols[q][i];
                    v_cols[p][i] = c * vp - s * vq;
                    v_cols[q][i] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        let norms: Vec<F> = cols
            .iter()
            .map(|c| c.iter().map(|&x| x * x).sum::<F>().sqrt())
            .collect();
        let max = norms.iter().cloned().fold(F::zero(), F::max);
        let min_pos = norms
            .iter()
            .cloned()
            .filter(|&s| s > F::zero())
            .fold(F::infinity(), F::min);
        return Err(Error::SvdNoConvergence {
            condition: to_f64(max / min_pos),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<F> = cols
        .iter()
        .map(|c| c.iter().map(|&x| x * x).sum::<F>().sqrt())
        .collect();
    order.sort_by(|&i, &j| to_f64(norms[j]).partial_cmp(&to_f64(norms[i])).unwrap());

    let mut u = Matrix::zeros(m, n);
    let mut v = Matrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        sigma.push(s);
        if s > F::zero() {
            for i in 0..m {
                u.set(i, k, cols[j][i] / s);
            }
        }
        for i in 0..n {
            v.set(i, k, v_cols[j][i]);
        }
    }
    Ok(Svd { u, sigma, v })
}

/// Moore-Penrose pseudo-inverse.
///
/// Singular values below `rcond * sigma_max` are treated as zero, which is
/// what makes the least-squares stage of RBF training robust to
/// rank-deficient design matrices.
pub fn pseudo_inverse<F: Float>(a: &Matrix<F>, rcond: F) -> Result<Matrix<F>> {
    if a.is_empty() {
        return Err(Error::InvalidParam("pseudo_inverse of empty matrix".into()));
    }
    if rcond <= F::zero() || rcond >= F::one() {
        return Err(Error::InvalidParam(format!(
            "rcond must lie in (0, 1), got {rcond}"
        )));
    }
    let Svd { u, sigma, v } = svd(a)?;
    let cutoff = rcond * sigma.iter().cloned().fold(F::zero(), F::max);
    // pinv = v * diag(1/sigma) * u^T, dropping directions below the cutoff.
    let k = sigma.len();
    let mut scaled_vt = Matrix::zeros(k, v.rows());
    for j in 0..k {
        if sigma[j] > cutoff {
            let inv = F::one() / sigma[j];
            for i in 0..v.rows() {
                scaled_vt.set(j, i, v.get(i, j) * inv);
            }
        }
    }
    scaled_vt.transpose().matmul(&u.transpose())
}

/// Minimum-norm least squares solution of `a * x = b` via the
/// pseudo-inverse.
pub fn solve_least_squares<F: Float>(a: &Matrix<F>, b: &Matrix<F>) -> Result<Matrix<F>> {
    if a.rows() != b.rows() {
        return Err(Error::ShapeMismatch {
            op: "solve_least_squares",
            left_rows: a.rows(),
            left_cols: a.cols(),
            right_rows: b.rows(),
            right_cols: b.cols(),
        });
    }
    pseudo_inverse(a, cast(DEFAULT_RCOND))?.matmul(b)
}
