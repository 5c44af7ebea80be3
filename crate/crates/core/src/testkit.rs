//! Independent reference implementations backing the test suites.
//!
//! Nothing here is used by the production code paths: these are the slow,
//! simple oracles the acceptance tests compare the real implementations
//! against, kept deliberately separate so a bug cannot cancel out on both
//! sides of a check.

use crate::float::{cast, Float};
use crate::numerics::Matrix;

/// Central finite-difference gradient of `f` at `w` with step `h`.
pub fn finite_difference_gradient<F: Float>(f: impl Fn(&[F]) -> F, w: &[F], h: f64) -> Vec<F> {
    let step = cast::<F>(h);
    let two = cast::<F>(2.0);
    let mut grad = Vec::with_capacity(w.len());
    let mut probe = w.to_vec();
    for i in 0..w.len() {
        let original = probe[i];
        probe[i] = original + step;
        let plus = f(&probe);
        probe[i] = original - step;
        let minus = f(&probe);
        probe[i] = original;
        grad.push((plus - minus) / (two * step));
    }
    grad
}

/// Eigenvalues of a symmetric matrix by the classical two-sided Jacobi
/// iteration. Input symmetry is the caller's responsibility.
pub fn symmetric_eigenvalues<F: Float>(a: &Matrix<F>) -> Vec<F> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "symmetric_eigenvalues needs a square matrix");
    let mut m: Vec<F> = a.as_slice().to_vec();
    let idx = |r: usize, c: usize| r * n + c;
    if n >= 2 {
        for _ in 0..200 {
            // Largest off-diagonal element.
            let mut off = F::zero();
            let (mut p, mut q) = (0, 1);
            for r in 0..n {
                for c in (r + 1)..n {
                    if m[idx(r, c)].abs() > off {
                        off = m[idx(r, c)].abs();
                        p = r;
                        q = c;
                    }
                }
            }
            if off <= cast::<F>(1e-14) {
                break;
            }
            let app = m[idx(p, p)];
            let aqq = m[idx(q, q)];
            let apq = m[idx(p, q)];
            let theta = (aqq - app) / (cast::<F>(2.0) * apq);
            let t = {
                let sign = if theta >= F::zero() { F::one() } else { -F::one() };
                sign / (theta.abs() + (F::one() + theta * theta).sqrt())
            };
            let c = F::one() / (F::one() + t * t).sqrt();
            let s = c * t;
            for k in 0..n {
                let akp = m[idx(k, p)];
                let akq = m[idx(k, q)];
                m[idx(k, p)] = c * akp - s * akq;
                m[idx(k, q)] = s * akp + c * akq;
            }
            for k in 0..n {
                let apk = m[idx(p, k)];
                let aqk = m[idx(q, k)];
                m[idx(p, k)] = c * apk - s * aqk;
                m[idx(q, k)] = s * apk + c * aqk;
            }
        }
    }
    (0..n).map(|i| m[idx(i, i)]).collect()
}

/// Brute-force solver for the epsilon-SVR dual, used as the oracle for the
/// decomposition solver.
///
/// Minimizes `f(a) = 1/2 a^T Q a + p^T a` over the box `[0, C]^{2n}`
/// intersected with `s^T a = 0`, where `Q[i][j] = s_i s_j K[i%n][j%n]` and
/// `s` is `+1` on the first block and `-1` on the second. The method is
/// accelerated projected gradient with momentum restarts; the projection
/// onto the box-plus-hyperplane set is exact, via bisection on the
/// hyperplane multiplier. Returns the optimal objective value.
pub fn qp_reference_objective(gram: &Matrix<f64>, targets: &[f64], c: f64, epsilon: f64) -> f64 {
    let n = targets.len();
    let dim = 2 * n;
    let sign = |t: usize| if t < n { 1.0 } else { -1.0 };
    let p: Vec<f64> = (0..dim)
        .map(|t| {
            if t < n {
                epsilon - targets[t]
            } else {
                epsilon + targets[t - n]
            }
        })
        .collect();
    let q = |r: usize, cidx: usize| sign(r) * sign(cidx) * gram.get(r % n, cidx % n);

    let grad = |a: &[f64]| -> Vec<f64> {
        (0..dim)
            .map(|r| (0..dim).map(|cidx| q(r, cidx) * a[cidx]).sum::<f64>() + p[r])
            .collect()
    };
    let value = |a: &[f64]| -> f64 {
        let quad: f64 = (0..dim)
            .map(|r| {
                let row: f64 = (0..dim).map(|cidx| q(r, cidx) * a[cidx]).sum();
                a[r] * row
            })
            .sum();
        0.5 * quad + a.iter().zip(&p).map(|(x, y)| x * y).sum::<f64>()
    };

    // Exact projection onto {0 <= a <= C, sum(s_i a_i) = 0}: bisect on the
    // multiplier nu of the hyperplane constraint.
    let project = |v: &[f64]| -> Vec<f64> {
        let residual = |nu: f64| -> f64 {
            (0..dim)
                .map(|i| sign(i) * (v[i] - nu * sign(i)).clamp(0.0, c))
                .sum()
        };
        let bound = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs())) + c + 1.0;
        let (mut lo, mut hi) = (-bound, bound);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if residual(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let nu = 0.5 * (lo + hi);
        (0..dim)
            .map(|i| (v[i] - nu * sign(i)).clamp(0.0, c))
            .collect()
    };

    // Gradient Lipschitz constant: 2 * lambda_max(K), estimated by power
    // iteration with slack.
    let mut v = vec![1.0; n];
    let mut lambda_max: f64 = 1.0;
    for _ in 0..50 {
        let mut w = vec![0.0; n];
        for (r, w_r) in w.iter_mut().enumerate() {
            for (cidx, v_c) in v.iter().enumerate() {
                *w_r += gram.get(r, cidx) * v_c;
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-300 {
            break;
        }
        lambda_max = norm;
        for (v_i, w_i) in v.iter_mut().zip(&w) {
            *v_i = w_i / norm;
        }
    }
    let step = 1.0 / (2.0 * lambda_max + 1e-6);

    let mut a = vec![0.0; dim];
    let mut y_acc = a.clone();
    let mut t_acc = 1.0f64;
    let mut best = value(&a);
    let mut best_a = a.clone();
    let mut stall = 0usize;
    for _ in 0..60_000 {
        let g = grad(&y_acc);
        let trial: Vec<f64> = (0..dim).map(|i| y_acc[i] - step * g[i]).collect();
        let a_next = project(&trial);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t_acc * t_acc).sqrt());
        let momentum = (t_acc - 1.0) / t_next;
        y_acc = (0..dim)
            .map(|i| a_next[i] + momentum * (a_next[i] - a[i]))
            .collect();
        a = a_next;
        t_acc = t_next;
        let f_now = value(&a);
        if f_now < best - 1e-14 {
            best = f_now;
            best_a = a.clone();
            stall = 0;
        } else {
            stall += 1;
            if f_now > best {
                // Momentum overshot; restart from the incumbent.
                y_acc = best_a.clone();
                a = best_a.clone();
                t_acc = 1.0;
            }
            if stall > 3000 {
                break;
            }
        }
    }
    best
}

/// Direct counting implementation of the tolerance-accuracy metric.
pub fn count_within_tolerance(predictions: &[f64], actuals: &[f64], tau: f64) -> usize {
    predictions
        .iter()
        .zip(actuals)
        .filter(|(p, a)| (*p - *a).abs() <= tau)
        .count()
}
