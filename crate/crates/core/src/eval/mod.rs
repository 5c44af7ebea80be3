//! Metrics, input-count selection and the model tournament.
//!
//! Validation quality is judged on two axes: the mean absolute percentage
//! error of the predictions ([`percentage_error`]) and the share of
//! predictions within a fixed megaliter tolerance of the actual demand
//! ([`tolerance_accuracy`]). [`pick_genius`] turns those into a total
//! order over models and [`run_tournament`] stages the full comparison.

mod experiment;
mod tournament;

pub use experiment::{
    run_ann_experiment, run_svr_experiment, select_input_count, AnnSweepSettings, ExperimentRun,
    InputCountRow, InputSelection, SvrSweepSettings,
};
pub use tournament::{pick_genius, run_tournament, GeniusEntry, OverallGenius, TournamentResult};

use crate::dataio::DemandSeries;
use crate::error::{Error, Result};
use crate::float::{cast, Float};

/// Per-model evaluation summary.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport<F> {
    pub model_label: String,
    /// Mean absolute percentage error, in percent.
    pub error_pct: F,
    /// Share of predictions within the tolerance, in percent.
    pub accuracy_pct: F,
    /// Wall-clock training time. Reported but never compared: it would
    /// make otherwise deterministic rankings depend on machine load.
    pub elapsed_seconds: f64,
    pub training_error: F,
}

/// How the accuracy tolerance is derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToleranceRule {
    /// A fixed tolerance in megaliters.
    Fixed,
    /// Tolerance as a fraction of the mean demand.
    FractionOfMean,
}

/// Acceptable absolute deviation for the accuracy metric, in megaliters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<F> {
    pub tau: F,
    pub rule: ToleranceRule,
}

impl<F: Float> Tolerance<F> {
    pub fn fixed(tau: F) -> Result<Self> {
        if tau <= F::zero() {
            return Err(Error::InvalidParam("tolerance must be positive".into()));
        }
        Ok(Tolerance {
            tau,
            rule: ToleranceRule::Fixed,
        })
    }
}

/// Mean absolute percentage error, in percent.
///
/// Predictions and actuals are expected in megaliters (denormalized); a
/// zero actual leaves the relative error undefined and is rejected.
pub fn percentage_error<F: Float>(predictions: &[F], actuals: &[F]) -> Result<F> {
    if predictions.len() != actuals.len() || predictions.is_empty() {
        return Err(Error::InvalidParam(format!(
            "percentage_error needs equal nonzero lengths, got {} and {}",
            predictions.len(),
            actuals.len()
        )));
    }
    if actuals.iter().any(|a| *a == F::zero()) {
        return Err(Error::InvalidParam(
            "percentage error undefined for a zero actual value".into(),
        ));
    }
    let hundred = cast::<F>(100.0);
    let sum: F = predictions
        .iter()
        .zip(actuals)
        .map(|(&p, &a)| hundred * ((p - a) / a).abs())
        .sum();
    Ok(sum / cast(predictions.len() as f64))
}

/// Percentage of predictions within `tau` megaliters of the actual value.
/// The boundary counts: a deviation of exactly `tau` is accurate.
pub fn tolerance_accuracy<F: Float>(predictions: &[F], actuals: &[F], tol: &Tolerance<F>) -> F {
    if predictions.is_empty() {
        return F::zero();
    }
    let within = predictions
        .iter()
        .zip(actuals)
        .filter(|(&p, &a)| (p - a).abs() <= tol.tau)
        .count();
    cast::<F>(100.0) * cast::<F>(within as f64) / cast::<F>(predictions.len() as f64)
}

/// Tolerance as `fraction` of the series' mean demand.
pub fn derive_tolerance<F: Float>(series: &DemandSeries<F>, fraction: f64) -> Result<Tolerance<F>> {
    if series.is_empty() {
        return Err(Error::EmptySeries);
    }
    if fraction <= 0.0 || fraction >= 1.0 {
        return Err(Error::InvalidParam(format!(
            "tolerance fraction must lie in (0, 1), got {fraction}"
        )));
    }
    Ok(Tolerance {
        tau: cast::<F>(fraction) * series.mean_demand(),
        rule: ToleranceRule::FractionOfMean,
    })
}

/// Default tolerance fraction used on data without a stated tolerance.
pub const DEFAULT_TOLERANCE_FRACTION: f64 = 0.19;
