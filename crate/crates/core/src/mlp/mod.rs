//! Two-weight-layer perceptron for regression.
//!
//! The forward map is
//! `y_k = f_outer( sum_j w2[j,k] * tanh( sum_i w1[i,j] * x_i + w1[0,j] ) + w2[0,k] )`
//! with a hyperbolic-tangent hidden layer and a selectable output
//! activation. Training minimizes the sum-of-squares error
//! `E = 1/2 * sum (y - t)^2` in batch with one of the three optimizers in
//! [`optimizer`]. Softmax output is supported for completeness but is
//! excluded from the default sweep: with a single output unit it collapses
//! to a constant.

mod optimizer;

pub use optimizer::{minimize, OptimizeOptions, OptimizeOutcome, OptimizerKind};

use crate::dataio::PatternSet;
use crate::error::{Error, Result};
use crate::float::{cast, Float};
use crate::numerics::{Matrix, Rng};

/// Output-layer transfer function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputActivation {
    Linear,
    Logistic,
    Softmax,
}

impl OutputActivation {
    pub fn as_str(self) -> &'static str {
        match self {
            OutputActivation::Linear => "linear",
            OutputActivation::Logistic => "logistic",
            OutputActivation::Softmax => "softmax",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(OutputActivation::Linear),
            "logistic" => Some(OutputActivation::Logistic),
            "softmax" => Some(OutputActivation::Softmax),
            _ => None,
        }
    }
}

/// MLP hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpConfig {
    pub n_inputs: usize,
    pub n_hidden: usize,
    pub output_activation: OutputActivation,
    pub optimizer: OptimizerKind,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub seed: u64,
}

impl MlpConfig {
    pub fn new(n_inputs: usize, n_hidden: usize) -> Self {
        MlpConfig {
            n_inputs,
            n_hidden,
            output_activation: OutputActivation::Linear,
            optimizer: OptimizerKind::Scg,
            max_iters: 500,
            grad_tol: 1e-6,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_inputs < 1 || self.n_hidden < 1 || self.max_iters < 1 {
            return Err(Error::InvalidParam(
                "n_inputs, n_hidden and max_iters must all be at least 1".into(),
            ));
        }
        if self.grad_tol <= 0.0 {
            return Err(Error::InvalidParam("grad_tol must be positive".into()));
        }
        Ok(())
    }
}

/// A trained perceptron.
///
/// `w1` is `(d+1) x M` with the bias in row 0; `w2` is `(M+1) x K` with the
/// bias in row 0. `training_error` is the final sum-of-squares objective.
#[derive(Debug, Clone)]
pub struct MlpModel<F> {
    pub w1: Matrix<F>,
    pub w2: Matrix<F>,
    pub config: MlpConfig,
    pub training_error: F,
}

impl<F: Float> MlpModel<F> {
    pub fn n_outputs(&self) -> usize {
        self.w2.cols()
    }

    pub fn n_parameters(&self) -> usize {
        self.w1.rows() * self.w1.cols() + self.w2.rows() * self.w2.cols()
    }
}

/// Flattened parameter order: `w1` row-major (bias row first), then `w2`
/// row-major (bias row first).
fn unflatten<F: Float>(flat: &[F], d: usize, m: usize, k: usize) -> (Vec<F>, Vec<F>) {
    let n1 = (d + 1) * m;
    (flat[..n1].to_vec(), flat[n1..n1 + (m + 1) * k].to_vec())
}

fn forward_rows<F: Float>(
    w1: &[F],
    w2: &[F],
    activation: OutputActivation,
    x: &Matrix<F>,
    m: usize,
    k: usize,
) -> (Vec<F>, Vec<F>) {
    let n = x.rows();
    let mut hidden = vec![F::zero(); n * m];
    let mut outputs = vec![F::zero(); n * k];
    for r in 0..n {
        let row = x.row(r);
        for j in 0..m {
            let mut a = w1[j]; // bias row 0
            for (i, &xi) in row.iter().enumerate() {
                a = a + w1[(i + 1) * m + j] * xi;
            }
            hidden[r * m + j] = a.tanh();
        }
        for o in 0..k {
            let mut a = w2[o]; // bias row 0
            for j in 0..m {
                a = a + w2[(j + 1) * k + o] * hidden[r * m + j];
            }
            outputs[r * k + o] = a;
        }
        apply_activation(activation, &mut outputs[r * k..(r + 1) * k]);
    }
    (outputs, hidden)
}

fn apply_activation<F: Float>(activation: OutputActivation, row: &mut [F]) {
    match activation {
        OutputActivation::Linear => {}
        OutputActivation::Logistic => {
            for v in row.iter_mut() {
                *v = F::one() / (F::one() + (-*v).exp());
            }
        }
        OutputActivation::Softmax => {
            let max = row.iter().cloned().fold(F::neg_infinity(), F::max);
            let mut sum = F::zero();
            for v in row.iter_mut() {
                *v = (*v - max).exp();
                sum = sum + *v;
            }
            for v in row.iter_mut() {
                *v = *v / sum;
            }
        }
    }
}

/// Batch forward pass. Input columns must match the configured input count.
pub fn mlp_forward<F: Float>(model: &MlpModel<F>, inputs: &Matrix<F>) -> Result<Matrix<F>> {
    let d = model.config.n_inputs;
    if inputs.cols() != d {
        return Err(Error::ShapeMismatch {
            op: "mlp_forward",
            left_rows: inputs.rows(),
            left_cols: inputs.cols(),
            right_rows: d,
            right_cols: model.config.n_hidden,
        });
    }
    let m = model.config.n_hidden;
    let k = model.w2.cols();
    let (outputs, _) = forward_rows(
        model.w1.as_slice(),
        model.w2.as_slice(),
        model.config.output_activation,
        inputs,
        m,
        k,
    );
    Matrix::from_vec(inputs.rows(), k, outputs)
}

/// Objective and gradient of the sum-of-squares error in one pass.
///
/// Plain backpropagation for the forward map above; the gradient comes
/// back flattened in the documented order.
fn loss_and_gradient<F: Float>(
    flat: &[F],
    activation: OutputActivation,
    x: &Matrix<F>,
    t: &Matrix<F>,
    d: usize,
    m: usize,
    k: usize,
) -> (F, Vec<F>) {
    let (w1, w2) = unflatten(flat, d, m, k);
    let n = x.rows();
    let (outputs, hidden) = forward_rows(&w1, &w2, activation, x, m, k);
    let mut grad = vec![F::zero(); flat.len()];
    let (g1, g2) = grad.split_at_mut((d + 1) * m);
    let half = cast::<F>(0.5);
    let mut loss = F::zero();

    let mut delta_out = vec![F::zero(); k];
    let mut delta_hidden = vec![F::zero(); m];
    for r in 0..n {
        let y = &outputs[r * k..(r + 1) * k];
        let residuals: Vec<F> = (0..k).map(|o| y[o] - t.get(r, o)).collect();
        for &res in &residuals {
            loss = loss + half * res * res;
        }
        match activation {
            OutputActivation::Linear => delta_out.copy_from_slice(&residuals),
            OutputActivation::Logistic => {
                for o in 0..k {
                    delta_out[o] = residuals[o] * y[o] * (F::one() - y[o]);
                }
            }
            OutputActivation::Softmax => {
                let weighted: F = (0..k).map(|j| residuals[j] * y[j]).sum();
                for o in 0..k {
                    delta_out[o] = y[o] * (residuals[o] - weighted);
                }
            }
        }
        let h = &hidden[r * m..(r + 1) * m];
        for o in 0..k {
            let dl = delta_out[o];
            g2[o] = g2[o] + dl; // bias row
            for j in 0..m {
                g2[(j + 1) * k + o] = g2[(j + 1) * k + o] + dl * h[j];
            }
        }
        for j in 0..m {
            let mut back = F::zero();
            for o in 0..k {
                back = back + delta_out[o] * w2[(j + 1) * k + o];
            }
            delta_hidden[j] = back * (F::one() - h[j] * h[j]);
        }
        let row = x.row(r);
        for j in 0..m {
            let dh = delta_hidden[j];
            g1[j] = g1[j] + dh; // bias row
            for (i, &xi) in row.iter().enumerate() {
                g1[(i + 1) * m + j] = g1[(i + 1) * m + j] + dh * xi;
            }
        }
    }
    (loss, grad)
}

/// Exact gradient of the training objective at the model's weights,
/// flattened in the documented order.
pub fn mlp_gradient<F: Float>(model: &MlpModel<F>, patterns: &PatternSet<F>) -> Result<Vec<F>> {
    let d = model.config.n_inputs;
    if patterns.n_inputs() != d {
        return Err(Error::ShapeMismatch {
            op: "mlp_gradient",
            left_rows: patterns.n_patterns(),
            left_cols: patterns.n_inputs(),
            right_rows: d,
            right_cols: model.config.n_hidden,
        });
    }
    let flat: Vec<F> = model
        .w1
        .as_slice()
        .iter()
        .chain(model.w2.as_slice())
        .cloned()
        .collect();
    let (_, grad) = loss_and_gradient(
        &flat,
        model.config.output_activation,
        patterns.inputs(),
        patterns.targets(),
        d,
        model.config.n_hidden,
        model.w2.cols(),
    );
    Ok(grad)
}

/// Trains a perceptron on the given patterns.
///
/// Weights start from a seeded Gaussian with standard deviation
/// `1/sqrt(fan_in)` (fan-in counting the bias), drawn in flattened order,
/// so a config and seed pin the result bit-for-bit.
pub fn mlp_train<F: Float>(config: &MlpConfig, patterns: &PatternSet<F>) -> Result<MlpModel<F>> {
    Ok(mlp_train_outcome(config, patterns)?.0)
}

/// As [`mlp_train`], also returning the optimizer trace.
pub fn mlp_train_outcome<F: Float>(
    config: &MlpConfig,
    patterns: &PatternSet<F>,
) -> Result<(MlpModel<F>, OptimizeOutcome<F>)> {
    config.validate()?;
    if patterns.n_patterns() == 0 {
        return Err(Error::InsufficientData("no training patterns".into()));
    }
    if patterns.n_inputs() != config.n_inputs {
        return Err(Error::ShapeMismatch {
            op: "mlp_train",
            left_rows: patterns.n_patterns(),
            left_cols: patterns.n_inputs(),
            right_rows: config.n_inputs,
            right_cols: config.n_hidden,
        });
    }
    let d = config.n_inputs;
    let m = config.n_hidden;
    let k = patterns.targets().cols();

    let mut rng = Rng::new(config.seed);
    let sd1 = cast::<F>(1.0 / ((d + 1) as f64).sqrt());
    let sd2 = cast::<F>(1.0 / ((m + 1) as f64).sqrt());
    let mut w0 = Vec::with_capacity((d + 1) * m + (m + 1) * k);
    for _ in 0..(d + 1) * m {
        w0.push(rng.next_normal_scalar::<F>() * sd1);
    }
    for _ in 0..(m + 1) * k {
        w0.push(rng.next_normal_scalar::<F>() * sd2);
    }

    let x = patterns.inputs();
    let t = patterns.targets();
    let activation = config.output_activation;
    let objective = |w: &[F]| loss_and_gradient(w, activation, x, t, d, m, k);

    let outcome = minimize(
        config.optimizer,
        objective,
        &w0,
        OptimizeOptions {
            max_iters: config.max_iters,
            grad_tol: config.grad_tol,
        },
    )?;

    let (w1_flat, w2_flat) = unflatten(&outcome.weights, d, m, k);
    let model = MlpModel {
        w1: Matrix::from_vec(d + 1, m, w1_flat)?,
        w2: Matrix::from_vec(m + 1, k, w2_flat)?,
        config: config.clone(),
        training_error: outcome.objective,
    };
    Ok((model, outcome))
}

/// The twelve-configuration sweep: {linear, logistic} outputs x
/// {scg, conjgrad, quasinew} x {9, 10} hidden units, labelled AZ1..AZ12.
pub fn default_mlp_sweep(n_inputs: usize, base_seed: u64) -> Vec<(String, MlpConfig)> {
    let mut sweep = Vec::with_capacity(12);
    let activations = [OutputActivation::Linear, OutputActivation::Logistic];
    let optimizers = [
        OptimizerKind::Scg,
        OptimizerKind::ConjGrad,
        OptimizerKind::QuasiNewton,
    ];
    let mut label = 1u64;
    for &activation in &activations {
        for &optimizer in &optimizers {
            for &hidden in &[9usize, 10] {
                let mut config = MlpConfig::new(n_inputs, hidden);
                config.output_activation = activation;
                config.optimizer = optimizer;
                config.seed = Rng::derive_seed(base_seed, label);
                sweep.push((format!("AZ{label}"), config));
                label += 1;
            }
        }
    }
    sweep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::percentage_error;
    use crate::testkit::finite_difference_gradient;

    fn model_with_weights(
        d: usize,
        m: usize,
        k: usize,
        w1: Vec<f64>,
        w2: Vec<f64>,
        activation: OutputActivation,
    ) -> MlpModel<f64> {
        let mut config = MlpConfig::new(d, m);
        config.output_activation = activation;
        MlpModel {
            w1: Matrix::from_vec(d + 1, m, w1).unwrap(),
            w2: Matrix::from_vec(m + 1, k, w2).unwrap(),
            config,
            training_error: 0.0,
        }
    }

    fn line_patterns(n: usize) -> PatternSet<f64> {
        // y = 0.3 x + 0.1 sampled on [0, 1].
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.3 * x + 0.1).collect();
        PatternSet::from_matrices(Matrix::from_vec(n, 1, xs).unwrap(), Matrix::column(&ys))
            .unwrap()
    }

    #[test]
    fn zero_weights_linear_output_is_zero() {
        let model =
            model_with_weights(3, 4, 1, vec![0.0; 16], vec![0.0; 5], OutputActivation::Linear);
        let x = Matrix::from_vec(2, 3, vec![1.0, -2.0, 0.5, 3.0, 4.0, 5.0]).unwrap();
        let y = mlp_forward(&model, &x).unwrap();
        assert_eq!(y.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn zero_weights_logistic_output_is_half() {
        let model =
            model_with_weights(2, 3, 1, vec![0.0; 9], vec![0.0; 4], OutputActivation::Logistic);
        let x = Matrix::from_vec(1, 2, vec![0.7, -0.3]).unwrap();
        let y = mlp_forward(&model, &x).unwrap();
        assert_eq!(y.get(0, 0), 0.5);
    }

    #[test]
    fn single_unit_network_composes_tanh() {
        // w1 = [bias 0, weight 1], w2 = [bias 0, weight 1]: y = tanh(x).
        let model = model_with_weights(
            1,
            1,
            1,
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            OutputActivation::Linear,
        );
        for x in [-2.0, -0.5, 0.0, 0.3, 1.7] {
            let inputs = Matrix::from_vec(1, 1, vec![x]).unwrap();
            let y = mlp_forward(&model, &inputs).unwrap();
            assert!((y.get(0, 0) - x.tanh()).abs() < 1e-15);
        }
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let mut rng = Rng::new(17);
        let (d, m, k) = (3, 5, 4);
        let w1: Vec<f64> = (0..(d + 1) * m).map(|_| rng.next_normal()).collect();
        let w2: Vec<f64> = (0..(m + 1) * k).map(|_| rng.next_normal()).collect();
        let model = model_with_weights(d, m, k, w1, w2, OutputActivation::Softmax);
        let x =
            Matrix::from_vec(6, d, (0..6 * d).map(|_| rng.next_normal() * 3.0).collect()).unwrap();
        let y = mlp_forward(&model, &x).unwrap();
        for r in 0..y.rows() {
            let sum: f64 = y.row(r).iter().sum();
            assert!((sum - 1.0).abs() < 1e-12, "row {r} sums to {sum}");
        }
    }

    #[test]
    fn forward_rejects_wrong_input_width() {
        let model =
            model_with_weights(3, 2, 1, vec![0.0; 8], vec![0.0; 3], OutputActivation::Linear);
        let x = Matrix::from_vec(1, 2, vec![1.0, 2.0]).unwrap();
        assert!(mlp_forward(&model, &x).is_err());
    }

    #[test]
    fn gradient_vanishes_at_a_perfect_fit() {
        // Zero hidden weights and output bias 0.25 reproduce constant targets.
        let model = model_with_weights(
            2,
            3,
            1,
            vec![0.0; 9],
            vec![0.25, 0.0, 0.0, 0.0],
            OutputActivation::Linear,
        );
        let x = Matrix::from_vec(4, 2, vec![0.1, 0.9, 0.4, 0.2, 0.8, 0.8, 0.3, 0.6]).unwrap();
        let t = Matrix::column(&[0.25, 0.25, 0.25, 0.25]);
        let patterns = PatternSet::from_matrices(x, t).unwrap();
        let grad = mlp_gradient(&model, &patterns).unwrap();
        assert!(grad.iter().all(|&g| g.abs() < 1e-15));
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        for seed in 0..10u64 {
            let mut rng = Rng::new(seed);
            let d = 1 + rng.next_below(5) as usize;
            let m = 1 + rng.next_below(10) as usize;
            let n = 5 + rng.next_below(46) as usize;
            let activation = match seed % 3 {
                0 => OutputActivation::Linear,
                1 => OutputActivation::Logistic,
                _ => OutputActivation::Softmax,
            };
            let x =
                Matrix::from_vec(n, d, (0..n * d).map(|_| rng.next_normal()).collect()).unwrap();
            let t = Matrix::column(&(0..n).map(|_| rng.next_f64()).collect::<Vec<_>>());
            let flat: Vec<f64> = (0..(d + 1) * m + (m + 1))
                .map(|_| rng.next_normal() * 0.5)
                .collect();
            let value = |w: &[f64]| loss_and_gradient(w, activation, &x, &t, d, m, 1).0;
            let (_, analytic) = loss_and_gradient(&flat, activation, &x, &t, d, m, 1);
            let numeric = finite_difference_gradient(value, &flat, 1e-6);
            let diff: f64 = analytic
                .iter()
                .zip(&numeric)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let scale = analytic.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-12);
            assert!(
                diff / scale < 1e-6,
                "seed {seed}: relative error {}",
                diff / scale
            );
        }
    }

    #[test]
    fn doubling_residuals_doubles_the_gradient() {
        let mut rng = Rng::new(5);
        let (d, m, n) = (2, 4, 12);
        let x = Matrix::from_vec(n, d, (0..n * d).map(|_| rng.next_normal()).collect()).unwrap();
        let t: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let w1: Vec<f64> = (0..(d + 1) * m).map(|_| rng.next_normal()).collect();
        let w2: Vec<f64> = (0..(m + 1)).map(|_| rng.next_normal()).collect();
        let model = model_with_weights(d, m, 1, w1, w2, OutputActivation::Linear);
        let y = mlp_forward(&model, &x).unwrap();
        // Targets moved to 2t - y double every residual y - t.
        let t2: Vec<f64> = (0..n).map(|i| 2.0 * t[i] - y.get(i, 0)).collect();
        let p1 = PatternSet::from_matrices(x.clone(), Matrix::column(&t)).unwrap();
        let p2 = PatternSet::from_matrices(x, Matrix::column(&t2)).unwrap();
        let g1 = mlp_gradient(&model, &p1).unwrap();
        let g2 = mlp_gradient(&model, &p2).unwrap();
        for (a, b) in g1.iter().zip(&g2) {
            assert!((2.0 * a - b).abs() < 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn every_optimizer_fits_a_line_to_under_one_percent() {
        let patterns = line_patterns(50);
        for optimizer in [
            OptimizerKind::Scg,
            OptimizerKind::ConjGrad,
            OptimizerKind::QuasiNewton,
        ] {
            let mut config = MlpConfig::new(1, 5);
            config.optimizer = optimizer;
            config.seed = 9;
            let model = mlp_train(&config, &patterns).unwrap();
            let predictions = mlp_forward(&model, patterns.inputs()).unwrap();
            let mape =
                percentage_error(&predictions.col_vec(0), &patterns.targets().col_vec(0)).unwrap();
            assert!(mape < 1.0, "{optimizer:?} reached {mape}% MAPE");
        }
    }

    #[test]
    fn same_config_and_seed_reproduce_weights_exactly() {
        let patterns = line_patterns(30);
        let mut config = MlpConfig::new(1, 7);
        config.seed = 1234;
        let a = mlp_train(&config, &patterns).unwrap();
        let b = mlp_train(&config, &patterns).unwrap();
        assert_eq!(a.w1, b.w1);
        assert_eq!(a.w2, b.w2);
        assert_eq!(a.training_error, b.training_error);
    }

    #[test]
    fn scg_objective_history_is_non_increasing() {
        let patterns = line_patterns(40);
        let mut config = MlpConfig::new(1, 6);
        config.seed = 7;
        let (_, outcome) = mlp_train_outcome(&config, &patterns).unwrap();
        for pair in outcome.history.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
    }

    #[test]
    fn optimizers_agree_on_the_reachable_objective() {
        let patterns = line_patterns(40);
        let mut objectives = Vec::new();
        for optimizer in [
            OptimizerKind::Scg,
            OptimizerKind::ConjGrad,
            OptimizerKind::QuasiNewton,
        ] {
            let mut config = MlpConfig::new(1, 4);
            config.optimizer = optimizer;
            config.seed = 21;
            config.max_iters = 2000;
            config.grad_tol = 1e-10;
            let model = mlp_train(&config, &patterns).unwrap();
            objectives.push(model.training_error);
        }
        let best = objectives.iter().cloned().fold(f64::INFINITY, f64::min);
        for (i, obj) in objectives.iter().enumerate() {
            assert!(
                *obj <= 1.01 * best + 1e-12,
                "optimizer {i} reached {obj}, best {best}"
            );
        }
    }

    #[test]
    fn divergent_targets_error_names_the_iteration() {
        let x = Matrix::from_vec(2, 1, vec![0.5, 0.6]).unwrap();
        let t = Matrix::column(&[1e200, -1e200]);
        let patterns = PatternSet::from_matrices(x, t).unwrap();
        let config = MlpConfig::new(1, 2);
        let err = mlp_train(&config, &patterns).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }), "{err}");
    }

    #[test]
    fn default_sweep_matches_labelling() {
        let sweep = default_mlp_sweep(5, 42);
        assert_eq!(sweep.len(), 12);
        assert_eq!(sweep[0].0, "AZ1");
        let az2 = &sweep[1];
        assert_eq!(az2.0, "AZ2");
        assert_eq!(az2.1.output_activation, OutputActivation::Linear);
        assert_eq!(az2.1.n_hidden, 10);
        assert_eq!(az2.1.optimizer, OptimizerKind::Scg);
        let az11 = &sweep[10];
        assert_eq!(az11.0, "AZ11");
        assert_eq!(az11.1.output_activation, OutputActivation::Logistic);
        assert_eq!(az11.1.n_hidden, 9);
        assert_eq!(az11.1.optimizer, OptimizerKind::QuasiNewton);
    }
}
