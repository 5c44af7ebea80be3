//! Expectation-maximization for a spherical Gaussian mixture.
//!
//! Used as the unsupervised first training stage: component means become
//! the network centres and component deviations become the Gaussian
//! widths.

use crate::error::{Error, Result};
use crate::float::{cast, Float};
use crate::numerics::{Matrix, Rng};

/// Lower bound on component deviations, guarding against collapse onto a
/// single point.
pub const WIDTH_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct EmOutcome<F> {
    /// Component means, one row per component.
    pub centres: Matrix<F>,
    /// Per-component deviations.
    pub widths: Vec<F>,
    /// Log-likelihood at the start of every iteration; non-decreasing.
    pub log_likelihood: Vec<F>,
    /// Number of empty components that were reinitialized from a random
    /// pattern.
    pub reinitialized: usize,
}

/// Fits a spherical Gaussian mixture to the rows of `inputs`.
///
/// Initialization draws `n_components` distinct rows as means (seeded), so
/// the fit is deterministic given the generator state.
pub fn fit_spherical_gmm<F: Float>(
    inputs: &Matrix<F>,
    n_components: usize,
    iters: usize,
    rng: &mut Rng,
) -> Result<EmOutcome<F>> {
    let n = inputs.rows();
    let d = inputs.cols();
    if n_components < 1 || iters < 1 {
        return Err(Error::InvalidParam(
            "need at least one component and one iteration".into(),
        ));
    }
    if n_components > n {
        return Err(Error::InvalidParam(format!(
            "{n_components} components exceed {n} patterns"
        )));
    }

    let floor = cast::<F>(WIDTH_FLOOR);
    let half = cast::<F>(0.5);
    let two = cast::<F>(2.0);

    // Pooled deviation of the data, reused as the reset width.
    let mut grand_mean = vec![F::zero(); d];
    for r in 0..n {
        for (c, g) in grand_mean.iter_mut().enumerate() {
            *g = *g + inputs.get(r, c);
        }
    }
    let n_f = cast::<F>(n as f64);
    for g in grand_mean.iter_mut() {
        *g = *g / n_f;
    }
    let mut pooled = F::zero();
    for r in 0..n {
        for (c, g) in grand_mean.iter().enumerate() {
            let diff = inputs.get(r, c) - *g;
            pooled = pooled + diff * diff;
        }
    }
    let sigma0 = (pooled / (n_f * cast::<F>(d as f64))).sqrt().max(floor);

    let seeds = rng.sample_distinct(n, n_components);
    let mut means: Vec<Vec<F>> = seeds.iter().map(|&i| inputs.row(i).to_vec()).collect();
    let mut sigmas = vec![sigma0; n_components];
    let mut mix = vec![F::one() / cast::<F>(n_components as f64); n_components];

    let mut log_likelihood = Vec::with_capacity(iters);
    let mut reinitialized = 0usize;
    let mut resp = vec![F::zero(); n * n_components];
    let log_2pi = cast::<F>((2.0 * std::f64::consts::PI).ln());

    for _ in 0..iters {
        // E-step with the usual log-sum-exp guard.
        let mut total = F::zero();
        for r in 0..n {
            let row = inputs.row(r);
            let mut logs = vec![F::zero(); n_components];
            for j in 0..n_components {
                let mut dist2 = F::zero();
                for (c, &x) in row.iter().enumerate() {
                    let diff = x - means[j][c];
                    dist2 = dist2 + diff * diff;
                }
                logs[j] = mix[j].ln()
                    - cast::<F>(d as f64) * sigmas[j].ln()
                    - half * cast::<F>(d as f64) * log_2pi
                    - dist2 / (two * sigmas[j] * sigmas[j]);
            }
            let max = logs.iter().cloned().fold(F::neg_infinity(), F::max);
            let sum_exp: F = logs.iter().map(|&l| (l - max).exp()).sum();
            let log_norm = max + sum_exp.ln();
            total = total + log_norm;
            for j in 0..n_components {
                resp[r * n_components + j] = (logs[j] - log_norm).exp();
            }
        }
        log_likelihood.push(total);

        // M-step.
        for j in 0..n_components {
            let mass: F = (0..n).map(|r| resp[r * n_components + j]).sum();
            if mass < cast(1e-12) {
                // Empty component: restart it on a random pattern.
                let pick = rng.next_below(n as u64) as usize;
                means[j] = inputs.row(pick).to_vec();
                sigmas[j] = sigma0;
                mix[j] = F::one() / n_f;
                reinitialized += 1;
                continue;
            }
            for (c, m) in means[j].iter_mut().enumerate() {
                let weighted: F = (0..n)
                    .map(|r| resp[r * n_components + j] * inputs.get(r, c))
                    .sum();
                *m = weighted / mass;
            }
            let mut spread = F::zero();
            for r in 0..n {
                let mut dist2 = F::zero();
                for (c, m) in means[j].iter().enumerate() {
                    let diff = inputs.get(r, c) - *m;
                    dist2 = dist2 + diff * diff;
                }
                spread = spread + resp[r * n_components + j] * dist2;
            }
            sigmas[j] = (spread / (mass * cast::<F>(d as f64))).sqrt().max(floor);
            mix[j] = mass / n_f;
        }
        let mix_sum: F = mix.iter().cloned().sum();
        for m in mix.iter_mut() {
            *m = *m / mix_sum;
        }
    }

    let centres = Matrix::from_vec(n_components, d, means.concat())?;
    Ok(EmOutcome {
        centres,
        widths: sigmas,
        log_likelihood,
        reinitialized,
    })
}
