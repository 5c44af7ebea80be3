//! Batch minimizers over a flat parameter vector.
//!
//! All three optimizers consume a combined value-and-gradient closure and
//! share the same contract: they only ever accept steps that keep the
//! objective finite and non-increasing, so the history of accepted
//! objective values is monotone.

use crate::error::{Error, Result};
use crate::float::{cast, Float};

/// Training algorithm selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptimizerKind {
    /// Moller's scaled conjugate gradient.
    Scg,
    /// Polak-Ribiere conjugate gradient with a backtracking line search.
    ConjGrad,
    /// BFGS quasi-Newton with the same line search.
    QuasiNewton,
}

impl OptimizerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            OptimizerKind::Scg => "scg",
            OptimizerKind::ConjGrad => "conjgrad",
            OptimizerKind::QuasiNewton => "quasinew",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "scg" => Some(OptimizerKind::Scg),
            "conjgrad" => Some(OptimizerKind::ConjGrad),
            "quasinew" => Some(OptimizerKind::QuasiNewton),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OptimizeOptions {
    pub max_iters: usize,
    /// Stop once the Euclidean gradient norm drops below this.
    pub grad_tol: f64,
}

#[derive(Debug, Clone)]
pub struct OptimizeOutcome<F> {
    pub weights: Vec<F>,
    pub objective: F,
    pub iterations: usize,
    pub converged: bool,
    /// Objective at the start plus after every accepted step.
    pub history: Vec<F>,
}

/// Minimizes `f` from `w0` with the selected algorithm.
///
/// `f` returns the objective value and its gradient in one pass. Fails with
/// [`Error::Divergence`] if the objective is non-finite at an accepted
/// point (including the starting point).
pub fn minimize<F: Float>(
    kind: OptimizerKind,
    f: impl Fn(&[F]) -> (F, Vec<F>),
    w0: &[F],
    opts: OptimizeOptions,
) -> Result<OptimizeOutcome<F>> {
    match kind {
        OptimizerKind::Scg => scg(f, w0, opts),
        OptimizerKind::ConjGrad => conjugate_gradient(f, w0, opts),
        OptimizerKind::QuasiNewton => bfgs(f, w0, opts),
    }
}

fn dot<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm<F: Float>(a: &[F]) -> F {
    dot(a, a).sqrt()
}

fn add_scaled<F: Float>(w: &[F], alpha: F, d: &[F]) -> Vec<F> {
    w.iter().zip(d).map(|(&x, &y)| x + alpha * y).collect()
}

/// Scaled conjugate gradient after Moller (1993).
///
/// The Hessian-vector product is approximated by a forward difference of
/// gradients; the scaling parameter lambda grows on failed steps and
/// shrinks on well-modelled ones, playing the role of the line search.
fn scg<F: Float>(
    f: impl Fn(&[F]) -> (F, Vec<F>),
    w0: &[F],
    opts: OptimizeOptions,
) -> Result<OptimizeOutcome<F>> {
    let n = w0.len();
    let grad_tol = cast::<F>(opts.grad_tol);
    let sigma0 = cast::<F>(1e-4);

    let mut w = w0.to_vec();
    let (mut e, mut grad) = f(&w);
    if !e.is_finite() {
        return Err(Error::Divergence { iteration: 0 });
    }
    let mut r: Vec<F> = grad.iter().map(|&g| -g).collect();
    let mut p = r.clone();
    let mut lambda = cast::<F>(1e-6);
    let mut lambda_bar = F::zero();
    let mut success = true;
    let mut delta = F::zero();
    let mut history = vec![e];
    let mut converged = false;
    let mut iterations = 0;

    for k in 1..=opts.max_iters {
        iterations = k;
        if norm(&r) < grad_tol {
            converged = true;
            break;
        }
        let pnorm2 = dot(&p, &p);
        if pnorm2 <= F::min_positive_value() {
            converged = true;
            break;
        }
        if success {
            let sigma = sigma0 / pnorm2.sqrt();
            let probe = add_scaled(&w, sigma, &p);
            let (_, probe_grad) = f(&probe);
            delta = (0..n)
                .map(|i| p[i] * (probe_grad[i] - grad[i]) / sigma)
                .sum();
        }
        delta = delta + (lambda - lambda_bar) * pnorm2;
        if delta <= F::zero() {
            lambda_bar = cast::<F>(2.0) * (lambda - delta / pnorm2);
            delta = -delta + lambda * pnorm2;
            lambda = lambda_bar;
        }
        let mu = dot(&p, &r);
        let alpha = mu / delta;
        let w_trial = add_scaled(&w, alpha, &p);
        let (e_trial, grad_trial) = f(&w_trial);
        let comparison = if e_trial.is_finite() {
            cast::<F>(2.0) * delta * (e - e_trial) / (mu * mu)
        } else {
            -F::one()
        };

        if comparison >= F::zero() {
            w = w_trial;
            e = e_trial;
            let r_new: Vec<F> = grad_trial.iter().map(|&g| -g).collect();
            grad = grad_trial;
            lambda_bar = F::zero();
            success = true;
            if k % n == 0 {
                p = r_new.clone();
            } else {
                let beta = (dot(&r_new, &r_new) - dot(&r_new, &r)) / mu;
                p = (0..n).map(|i| r_new[i] + beta * p[i]).collect();
            }
            r = r_new;
            history.push(e);
            if comparison >= cast(0.75) {
                lambda = lambda * cast(0.25);
            }
        } else {
            lambda_bar = lambda;
            success = false;
        }
        if comparison < cast(0.25) {
            lambda = lambda + delta * (F::one() - comparison) / pnorm2;
        }
        if !lambda.is_finite() || lambda > cast(1e200) {
            // The model trust has collapsed; no representable step remains.
            break;
        }
    }

    Ok(OptimizeOutcome {
        weights: w,
        objective: e,
        iterations,
        converged,
        history,
    })
}

/// Backtracking Armijo search along `d`. Returns the accepted step and the
/// evaluation at the new point, or `None` if no acceptable step exists.
fn backtrack<F: Float>(
    f: &impl Fn(&[F]) -> (F, Vec<F>),
    w: &[F],
    d: &[F],
    e: F,
    slope: F,
    alpha_init: F,
) -> Option<(F, Vec<F>, F, Vec<F>)> {
    let c1 = cast::<F>(1e-4);
    let mut alpha = alpha_init;
    for _ in 0..60 {
        let trial = add_scaled(w, alpha, d);
        let (e_trial, g_trial) = f(&trial);
        if e_trial.is_finite() && e_trial <= e + c1 * alpha * slope {
            return Some((alpha, trial, e_trial, g_trial));
        }
        alpha = alpha * cast(0.5);
    }
    None
}

fn conjugate_gradient<F: Float>(
    f: impl Fn(&[F]) -> (F, Vec<F>),
    w0: &[F],
    opts: OptimizeOptions,
) -> Result<OptimizeOutcome<F>> {
    let n = w0.len();
    let grad_tol = cast::<F>(opts.grad_tol);
    let mut w = w0.to_vec();
    let (mut e, mut g) = f(&w);
    if !e.is_finite() {
        return Err(Error::Divergence { iteration: 0 });
    }
    let mut d: Vec<F> = g.iter().map(|&x| -x).collect();
    let mut history = vec![e];
    let mut converged = false;
    let mut iterations = 0;
    let mut alpha_prev = F::one() / (F::one() + norm(&g));

    for k in 1..=opts.max_iters {
        iterations = k;
        if norm(&g) < grad_tol {
            converged = true;
            break;
        }
        let mut slope = dot(&g, &d);
        let mut steepest = false;
        if slope >= F::zero() {
            d = g.iter().map(|&x| -x).collect();
            slope = -dot(&g, &g);
            steepest = true;
        }
        let alpha_init = (alpha_prev * cast(2.0)).min(cast(1e3)).max(cast(1e-12));
        let step = match backtrack(&f, &w, &d, e, slope, alpha_init) {
            Some(s) => s,
            None if steepest => break, // no descent possible at f64 resolution
            None => {
                d = g.iter().map(|&x| -x).collect();
                let slope = -dot(&g, &g);
                match backtrack(&f, &w, &d, e, slope, alpha_init) {
                    Some(s) => s,
                    None => break,
                }
            }
        };
        let (alpha, w_new, e_new, g_new) = step;
        alpha_prev = alpha;
        // Polak-Ribiere+ with periodic restart.
        let beta = if k % n == 0 {
            F::zero()
        } else {
            let num: F = (0..w.len()).map(|i| g_new[i] * (g_new[i] - g[i])).sum();
            (num / dot(&g, &g)).max(F::zero())
        };
        d = (0..w.len()).map(|i| -g_new[i] + beta * d[i]).collect();
        w = w_new;
        e = e_new;
        g = g_new;
        history.push(e);
    }

    Ok(OptimizeOutcome {
        weights: w,
        objective: e,
        iterations,
        converged,
        history,
    })
}

fn bfgs<F: Float>(
    f: impl Fn(&[F]) -> (F, Vec<F>),
    w0: &[F],
    opts: OptimizeOptions,
) -> Result<OptimizeOutcome<F>> {
    let n = w0.len();
    let grad_tol = cast::<F>(opts.grad_tol);
    let mut w = w0.to_vec();
    let (mut e, mut g) = f(&w);
    if !e.is_finite() {
        return Err(Error::Divergence { iteration: 0 });
    }
    // Inverse Hessian approximation, row-major.
    let mut h: Vec<F> = identity(n);
    let mut history = vec![e];
    let mut converged = false;
    let mut iterations = 0;

    for k in 1..=opts.max_iters {
        iterations = k;
        if norm(&g) < grad_tol {
            converged = true;
            break;
        }
        let mut d: Vec<F> = (0..n)
            .map(|i| -(0..n).map(|j| h[i * n + j] * g[j]).sum::<F>())
            .collect();
        let mut slope = dot(&g, &d);
        if slope >= F::zero() {
            h = identity(n);
            d = g.iter().map(|&x| -x).collect();
            slope = -dot(&g, &g);
        }
        let step = match backtrack(&f, &w, &d, e, slope, F::one()) {
            Some(s) => s,
            None => break,
        };
        let (alpha, w_new, e_new, g_new) = step;
        let s: Vec<F> = d.iter().map(|&x| alpha * x).collect();
        let y: Vec<F> = (0..n).map(|i| g_new[i] - g[i]).collect();
        let sy = dot(&s, &y);
        if sy > cast::<F>(1e-12) * norm(&s) * norm(&y) {
            bfgs_update(&mut h, &s, &y, sy, n);
        }
        w = w_new;
        e = e_new;
        g = g_new;
        history.push(e);
        let _ = k;
    }

    Ok(OptimizeOutcome {
        weights: w,
        objective: e,
        iterations,
        converged,
        history,
    })
}

fn identity<F: Float>(n: usize) -> Vec<F> {
    let mut h = vec![F::zero(); n * n];
    for i in 0..n {
        h[i * n + i] = F::one();
    }
    h
}

/// `h <- (I - s y^T / sy) h (I - y s^T / sy) + s s^T / sy`
fn bfgs_update<F: Float>(h: &mut [F], s: &[F], y: &[F], sy: F, n: usize) {
    let rho = F::one() / sy;
    let hy: Vec<F> = (0..n)
        .map(|i| (0..n).map(|j| h[i * n + j] * y[j]).sum())
        .collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            let term = -rho * (s[i] * hy[j] + hy[i] * s[j])
                + rho * (F::one() + rho * yhy) * s[i] * s[j];
            h[i * n + j] = h[i * n + j] + term;
        }
    }
}
