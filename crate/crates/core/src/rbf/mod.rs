//! Radial basis function network with two-stage training.
//!
//! Stage one places the centres with a few EM iterations over a spherical
//! Gaussian mixture (or adopts centres from an earlier network); stage two
//! solves for the output weights through the pseudo-inverse of the design
//! matrix. The network output is
//! `y(x) = sum_j w_j * phi_j(||x - centre_j||) + bias`.

mod em;

pub use em::{fit_spherical_gmm, EmOutcome, WIDTH_FLOOR};

use crate::dataio::PatternSet;
use crate::error::{Error, Result};
use crate::eval::percentage_error;
use crate::float::{cast, Float};
use crate::numerics::{pseudo_inverse, Matrix, Rng};

/// Hidden-unit basis function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RbfActivation {
    /// `exp(-r^2 / (2 width^2))`
    Gaussian,
    /// Thin plate spline `r^2 ln r`, zero at the origin.
    ThinPlateSpline,
    /// `r^4 ln r`, zero at the origin.
    R4LogR,
}

impl RbfActivation {
    pub fn as_str(self) -> &'static str {
        match self {
            RbfActivation::Gaussian => "gaussian",
            RbfActivation::ThinPlateSpline => "tps",
            RbfActivation::R4LogR => "r4logr",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "gaussian" => Some(RbfActivation::Gaussian),
            "tps" => Some(RbfActivation::ThinPlateSpline),
            "r4logr" => Some(RbfActivation::R4LogR),
            _ => None,
        }
    }

    pub fn uses_width(self) -> bool {
        matches!(self, RbfActivation::Gaussian)
    }
}

/// RBF hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RbfConfig {
    pub n_inputs: usize,
    pub n_hidden: usize,
    pub activation: RbfActivation,
    pub em_iters: usize,
    pub seed: u64,
}

impl RbfConfig {
    pub fn new(n_inputs: usize, n_hidden: usize) -> Self {
        RbfConfig {
            n_inputs,
            n_hidden,
            activation: RbfActivation::Gaussian,
            em_iters: 10,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_inputs < 1 || self.n_hidden < 1 || self.em_iters < 1 {
            return Err(Error::InvalidParam(
                "n_inputs, n_hidden and em_iters must all be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// A trained RBF network.
///
/// `weights` is `(M+1) x 1` with the bias last, matching the design
/// matrix's trailing all-ones column. `widths` carries the per-centre
/// deviations; only Gaussian activations read them. `training_error` is
/// the training-set percentage error in megaliters.
#[derive(Debug, Clone)]
pub struct RbfModel<F> {
    pub centres: Matrix<F>,
    pub widths: Vec<F>,
    pub weights: Matrix<F>,
    pub config: RbfConfig,
    pub training_error: F,
}

impl<F: Float> RbfModel<F> {
    pub fn n_parameters(&self) -> usize {
        self.centres.rows() * self.centres.cols() + self.widths.len() + self.weights.rows()
    }
}

/// Basis value at distance `r`. Gaussian activations require a width; the
/// distance-power activations take the analytic limit 0 at `r = 0`.
pub fn rbf_basis<F: Float>(activation: RbfActivation, r: F, width: Option<F>) -> F {
    debug_assert!(r >= F::zero(), "distance must be nonnegative");
    match activation {
        RbfActivation::Gaussian => {
            let w = width.expect("gaussian basis requires a width");
            (-(r * r) / (cast::<F>(2.0) * w * w)).exp()
        }
        RbfActivation::ThinPlateSpline => {
            if r == F::zero() {
                F::zero()
            } else {
                r * r * r.ln()
            }
        }
        RbfActivation::R4LogR => {
            if r == F::zero() {
                F::zero()
            } else {
                r * r * r * r * r.ln()
            }
        }
    }
}

/// Stage one: EM centre placement over the pattern inputs.
pub fn rbf_place_centres_em<F: Float>(
    patterns: &PatternSet<F>,
    config: &RbfConfig,
) -> Result<EmOutcome<F>> {
    config.validate()?;
    let mut rng = Rng::new(config.seed);
    fit_spherical_gmm(patterns.inputs(), config.n_hidden, config.em_iters, &mut rng)
}

fn euclidean<F: Float>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<F>()
        .sqrt()
}

/// Design matrix: `n x (M+1)`, basis activations with a trailing all-ones
/// bias column.
pub fn design_matrix<F: Float>(
    inputs: &Matrix<F>,
    centres: &Matrix<F>,
    widths: &[F],
    activation: RbfActivation,
) -> Result<Matrix<F>> {
    let n = inputs.rows();
    let m = centres.rows();
    let mut entries = Vec::with_capacity(n * (m + 1));
    for r in 0..n {
        let x = inputs.row(r);
        for j in 0..m {
            let dist = euclidean(x, centres.row(j));
            let width = widths.get(j).copied();
            entries.push(rbf_basis(activation, dist, width));
        }
        entries.push(F::one());
    }
    Matrix::from_vec(n, m + 1, entries)
}

/// Two-stage training: EM centres (unless reused) then least-squares
/// output weights via the pseudo-inverse of the design matrix.
///
/// `reuse_centres` lets later activation variants share the centres (and
/// widths) of an earlier Gaussian network rather than re-running EM.
pub fn rbf_train<F: Float>(
    config: &RbfConfig,
    patterns: &PatternSet<F>,
    reuse_centres: Option<(&Matrix<F>, &[F])>,
) -> Result<RbfModel<F>> {
    config.validate()?;
    if patterns.n_patterns() == 0 {
        return Err(Error::InsufficientData("no training patterns".into()));
    }
    if patterns.n_inputs() != config.n_inputs {
        return Err(Error::ShapeMismatch {
            op: "rbf_train",
            left_rows: patterns.n_patterns(),
            left_cols: patterns.n_inputs(),
            right_rows: config.n_inputs,
            right_cols: config.n_hidden,
        });
    }

    let (centres, widths) = match reuse_centres {
        Some((c, w)) => {
            if c.rows() != config.n_hidden || c.cols() != config.n_inputs {
                return Err(Error::ShapeMismatch {
                    op: "rbf_train (reused centres)",
                    left_rows: c.rows(),
                    left_cols: c.cols(),
                    right_rows: config.n_hidden,
                    right_cols: config.n_inputs,
                });
            }
            (c.clone(), w.to_vec())
        }
        None => {
            let em = rbf_place_centres_em(patterns, config)?;
            (em.centres, em.widths)
        }
    };

    let phi = design_matrix(patterns.inputs(), &centres, &widths, config.activation)?;
    let weights = pseudo_inverse(&phi, cast(crate::numerics::DEFAULT_RCOND))?
        .matmul(patterns.targets())?;

    let fitted = phi.matmul(&weights)?;
    let predictions = patterns.denormalize_predictions(&fitted.col_vec(0));
    let actuals = patterns.denormalized_targets();
    let training_error = percentage_error(&predictions, &actuals)?;

    Ok(RbfModel {
        centres,
        widths,
        weights,
        config: config.clone(),
        training_error,
    })
}

/// Network output for a batch of inputs.
pub fn rbf_forward<F: Float>(model: &RbfModel<F>, inputs: &Matrix<F>) -> Result<Matrix<F>> {
    if inputs.cols() != model.config.n_inputs {
        return Err(Error::ShapeMismatch {
            op: "rbf_forward",
            left_rows: inputs.rows(),
            left_cols: inputs.cols(),
            right_rows: model.config.n_inputs,
            right_cols: model.config.n_hidden,
        });
    }
    let phi = design_matrix(inputs, &model.centres, &model.widths, model.config.activation)?;
    phi.matmul(&model.weights)
}

/// The six-configuration sweep: {gaussian, tps, r4logr} x {9, 10} hidden
/// units, labelled AX1..AX6. Seed stream indices continue after the twelve
/// MLP labels.
pub fn default_rbf_sweep(n_inputs: usize, base_seed: u64) -> Vec<(String, RbfConfig)> {
    let activations = [
        RbfActivation::Gaussian,
        RbfActivation::ThinPlateSpline,
        RbfActivation::R4LogR,
    ];
    let mut sweep = Vec::with_capacity(6);
    let mut label = 1u64;
    for &activation in &activations {
        for &hidden in &[9usize, 10] {
            let mut config = RbfConfig::new(n_inputs, hidden);
            config.activation = activation;
            config.seed = Rng::derive_seed(base_seed, 12 + label);
            sweep.push((format!("AX{label}"), config));
            label += 1;
        }
    }
    sweep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_at_zero_distance_is_one() {
        assert_eq!(rbf_basis(RbfActivation::Gaussian, 0.0f64, Some(1.0)), 1.0);
    }

    #[test]
    fn thin_plate_spline_vanishes_at_unit_radius() {
        assert_eq!(rbf_basis(RbfActivation::ThinPlateSpline, 1.0f64, None), 0.0);
    }

    #[test]
    fn r4logr_at_e_is_e_to_the_fourth() {
        let e = std::f64::consts::E;
        let got = rbf_basis(RbfActivation::R4LogR, e, None);
        assert!((got - e.powi(4)).abs() < 1e-10, "{got}");
    }

    #[test]
    fn distance_power_bases_are_zero_at_the_origin() {
        assert_eq!(rbf_basis(RbfActivation::ThinPlateSpline, 0.0f64, None), 0.0);
        assert_eq!(rbf_basis(RbfActivation::R4LogR, 0.0f64, None), 0.0);
    }

    fn random_patterns(rng: &mut Rng, n: usize, d: usize) -> PatternSet<f64> {
        let x = Matrix::from_vec(n, d, (0..n * d).map(|_| rng.next_f64()).collect()).unwrap();
        let t: Vec<f64> = (0..n).map(|_| 1.0 + rng.next_f64()).collect();
        PatternSet::from_matrices(x, Matrix::column(&t)).unwrap()
    }

    #[test]
    fn constant_targets_load_onto_the_bias() {
        let mut rng = Rng::new(14);
        let n = 30;
        let x = Matrix::from_vec(n, 2, (0..n * 2).map(|_| rng.next_f64()).collect()).unwrap();
        let t = Matrix::column(&vec![5.0; n]);
        let patterns = PatternSet::from_matrices(x, t).unwrap();
        for activation in [
            RbfActivation::Gaussian,
            RbfActivation::ThinPlateSpline,
            RbfActivation::R4LogR,
        ] {
            let mut config = RbfConfig::new(2, 4);
            config.activation = activation;
            config.seed = 3;
            let model = rbf_train(&config, &patterns, None).unwrap();
            let m = model.centres.rows();
            for j in 0..m {
                assert!(
                    model.weights.get(j, 0).abs() < 1e-8,
                    "{activation:?}: basis weight {j} = {}",
                    model.weights.get(j, 0)
                );
            }
            assert!((model.weights.get(m, 0) - 5.0).abs() < 1e-8, "{activation:?}");
            assert!(model.training_error < 1e-8);
        }
    }

    #[test]
    fn interpolation_regime_fits_every_point() {
        let mut rng = Rng::new(4);
        let patterns = random_patterns(&mut rng, 12, 2);
        let mut config = RbfConfig::new(2, 12);
        config.seed = 11;
        let model = rbf_train(&config, &patterns, None).unwrap();
        let fitted = rbf_forward(&model, patterns.inputs()).unwrap();
        for r in 0..patterns.n_patterns() {
            let diff = (fitted.get(r, 0) - patterns.targets().get(r, 0)).abs();
            assert!(diff < 1e-6, "pattern {r}: residual {diff}");
        }
    }

    #[test]
    fn same_seed_gives_identical_models() {
        let mut rng = Rng::new(15);
        let patterns = random_patterns(&mut rng, 25, 3);
        let mut config = RbfConfig::new(3, 5);
        config.seed = 44;
        let a = rbf_train(&config, &patterns, None).unwrap();
        let b = rbf_train(&config, &patterns, None).unwrap();
        assert_eq!(a.centres, b.centres);
        assert_eq!(a.widths, b.widths);
        assert_eq!(a.weights, b.weights);
    }

    #[test]
    fn reused_centres_are_shared_bit_for_bit() {
        let mut rng = Rng::new(16);
        let patterns = random_patterns(&mut rng, 25, 3);
        let mut gaussian = RbfConfig::new(3, 6);
        gaussian.seed = 2;
        let base = rbf_train(&gaussian, &patterns, None).unwrap();
        let mut tps = RbfConfig::new(3, 6);
        tps.activation = RbfActivation::ThinPlateSpline;
        let reused = rbf_train(&tps, &patterns, Some((&base.centres, &base.widths))).unwrap();
        assert_eq!(base.centres, reused.centres);
        assert_eq!(base.widths, reused.widths);
    }

    #[test]
    fn second_stage_residual_is_orthogonal_to_the_design_columns() {
        let mut rng = Rng::new(23);
        let patterns = random_patterns(&mut rng, 40, 3);
        let mut config = RbfConfig::new(3, 7);
        config.seed = 5;
        let model = rbf_train(&config, &patterns, None).unwrap();
        let phi = design_matrix(
            patterns.inputs(),
            &model.centres,
            &model.widths,
            config.activation,
        )
        .unwrap();
        let residual = phi
            .matmul(&model.weights)
            .unwrap()
            .sub(patterns.targets())
            .unwrap();
        let projections = phi.transpose().matmul(&residual).unwrap();
        assert!(
            projections.max_abs() < 1e-8,
            "residual not orthogonal: {}",
            projections.max_abs()
        );
    }

    #[test]
    fn forward_matches_the_design_matrix_product() {
        let mut rng = Rng::new(9);
        let patterns = random_patterns(&mut rng, 20, 2);
        let mut config = RbfConfig::new(2, 5);
        config.seed = 1;
        let model = rbf_train(&config, &patterns, None).unwrap();
        let queries =
            Matrix::from_vec(8, 2, (0..16).map(|_| rng.next_f64()).collect()).unwrap();
        let direct = rbf_forward(&model, &queries).unwrap();
        let phi =
            design_matrix(&queries, &model.centres, &model.widths, config.activation).unwrap();
        let via_product = phi.matmul(&model.weights).unwrap();
        let diff = direct.sub(&via_product).unwrap().max_abs();
        assert!(diff < 1e-12);
    }

    #[test]
    fn zero_weights_and_bias_give_a_constant() {
        let centres = Matrix::from_vec(2, 1, vec![0.2, 0.8]).unwrap();
        let model = RbfModel {
            centres,
            widths: vec![1.0, 1.0],
            weights: Matrix::from_vec(3, 1, vec![0.0, 0.0, 7.5]).unwrap(),
            config: RbfConfig::new(1, 2),
            training_error: 0.0,
        };
        let x = Matrix::from_vec(4, 1, vec![0.1, 0.3, 0.6, 0.9]).unwrap();
        let y = rbf_forward(&model, &x).unwrap();
        assert!(y.col_vec(0).iter().all(|&v| (v - 7.5).abs() < 1e-15));
    }

    #[test]
    fn single_gaussian_centre_at_origin_responds_with_one() {
        let model = RbfModel {
            centres: Matrix::from_vec(1, 2, vec![0.0, 0.0]).unwrap(),
            widths: vec![1.0],
            weights: Matrix::from_vec(2, 1, vec![1.0, 0.0]).unwrap(),
            config: RbfConfig::new(2, 1),
            training_error: 0.0,
        };
        let x = Matrix::from_vec(1, 2, vec![0.0, 0.0]).unwrap();
        let y = rbf_forward(&model, &x).unwrap();
        assert_eq!(y.get(0, 0), 1.0);
    }

    #[test]
    fn forward_rejects_wrong_width() {
        let model = RbfModel {
            centres: Matrix::from_vec(1, 2, vec![0.0, 0.0]).unwrap(),
            widths: vec![1.0],
            weights: Matrix::from_vec(2, 1, vec![1.0, 0.0]).unwrap(),
            config: RbfConfig::new(2, 1),
            training_error: 0.0,
        };
        let x = Matrix::from_vec(1, 3, vec![0.0, 0.0, 0.0]).unwrap();
        assert!(rbf_forward(&model, &x).is_err());
    }

    #[test]
    fn default_sweep_matches_labelling() {
        let sweep = default_rbf_sweep(5, 42);
        assert_eq!(sweep.len(), 6);
        let labels: Vec<&str> = sweep.iter().map(|(l, _)| l.as_str()).collect();
        assert_eq!(labels, ["AX1", "AX2", "AX3", "AX4", "AX5", "AX6"]);
        assert_eq!(sweep[0].1.activation, RbfActivation::Gaussian);
        assert_eq!(sweep[0].1.n_hidden, 9);
        assert_eq!(sweep[3].1.activation, RbfActivation::ThinPlateSpline);
        assert_eq!(sweep[3].1.n_hidden, 10);
        assert_eq!(sweep[5].1.activation, RbfActivation::R4LogR);
        assert_eq!(sweep[5].1.n_hidden, 10);
    }
}
