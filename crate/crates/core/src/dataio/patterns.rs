//! Lagged supervised patterns and the chronological three-way split.

use chrono::{Datelike, NaiveDate};

use super::scaler::Scaler;
use super::series::DemandSeries;
use crate::error::{Error, Result};
use crate::float::{cast, Float};
use crate::numerics::Matrix;

/// Split fractions matching a 1470 / 1005 / 995 division of 3470 patterns.
pub const DEFAULT_SPLIT_FRACTIONS: [f64; 3] =
    [1470.0 / 3470.0, 1005.0 / 3470.0, 995.0 / 3470.0];

/// Per-column scalers for a pattern set: one per input column plus one for
/// the target column.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternScalers<F> {
    pub inputs: Vec<Scaler<F>>,
    pub target: Scaler<F>,
}

/// Supervised regression patterns.
///
/// Each row pairs `lag_count` consecutive previous demands (oldest first),
/// optionally followed by the target year's population estimate, with the
/// next day's demand as target. Patterns start out raw; the split step
/// normalizes them with scalers fitted on the training portion, carried in
/// `scalers`.
#[derive(Debug, Clone)]
pub struct PatternSet<F> {
    inputs: Matrix<F>,
    targets: Matrix<F>,
    target_dates: Vec<NaiveDate>,
    lag_count: usize,
    includes_population: bool,
    scalers: Option<PatternScalers<F>>,
}

impl<F: Float> PatternSet<F> {
    /// Wraps prepared matrices as a raw pattern set, with synthetic
    /// sequential target dates. Intended for experiments and tests that
    /// bypass the demand-series pipeline.
    pub fn from_matrices(inputs: Matrix<F>, targets: Matrix<F>) -> Result<Self> {
        if inputs.rows() != targets.rows() {
            return Err(Error::ShapeMismatch {
                op: "PatternSet::from_matrices",
                left_rows: inputs.rows(),
                left_cols: inputs.cols(),
                right_rows: targets.rows(),
                right_cols: targets.cols(),
            });
        }
        if inputs.rows() == 0 {
            return Err(Error::InsufficientData("empty pattern set".into()));
        }
        let epoch = NaiveDate::from_ymd_opt(1997, 1, 4).expect("valid date");
        let target_dates = (0..inputs.rows())
            .map(|i| epoch + chrono::Days::new(i as u64))
            .collect();
        let lag_count = inputs.cols();
        Ok(PatternSet {
            inputs,
            targets,
            target_dates,
            lag_count,
            includes_population: false,
            scalers: None,
        })
    }

    pub fn n_patterns(&self) -> usize {
        self.inputs.rows()
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.cols()
    }

    pub fn inputs(&self) -> &Matrix<F> {
        &self.inputs
    }

    pub fn targets(&self) -> &Matrix<F> {
        &self.targets
    }

    pub fn target_dates(&self) -> &[NaiveDate] {
        &self.target_dates
    }

    pub fn lag_count(&self) -> usize {
        self.lag_count
    }

    pub fn includes_population(&self) -> bool {
        self.includes_population
    }

    pub fn scalers(&self) -> Option<&PatternScalers<F>> {
        self.scalers.as_ref()
    }

    pub fn is_normalized(&self) -> bool {
        self.scalers.is_some()
    }

    /// Targets in original units (megaliters), undoing normalization when
    /// a target scaler is present.
    pub fn denormalized_targets(&self) -> Vec<F> {
        let raw = self.targets.col_vec(0);
        match &self.scalers {
            Some(s) => raw.iter().map(|&v| s.target.invert(v)).collect(),
            None => raw,
        }
    }

    /// Maps model outputs in the normalized target space back to
    /// megaliters. Identity for raw pattern sets.
    pub fn denormalize_predictions(&self, predictions: &[F]) -> Vec<F> {
        match &self.scalers {
            Some(s) => predictions.iter().map(|&v| s.target.invert(v)).collect(),
            None => predictions.to_vec(),
        }
    }
}

/// Builds sliding-window patterns from a demand series.
///
/// Windows that span a calendar gap (a discarded missing day) are skipped
/// rather than imputed. The output is raw: normalization happens in
/// [`split_chronological`] so the scalers can be fitted on the training
/// split only.
pub fn build_patterns<F: Float>(
    series: &DemandSeries<F>,
    lag_count: usize,
    include_population: bool,
) -> Result<PatternSet<F>> {
    if lag_count < 1 {
        return Err(Error::InvalidParam("lag_count must be at least 1".into()));
    }
    let obs = series.observations();
    if obs.len() <= lag_count {
        return Err(Error::InsufficientData(format!(
            "need more than {lag_count} observations, have {}",
            obs.len()
        )));
    }

    let n_inputs = lag_count + usize::from(include_population);
    let mut rows: Vec<F> = Vec::new();
    let mut targets: Vec<F> = Vec::new();
    let mut target_dates = Vec::new();
    for t in lag_count..obs.len() {
        let (target_date, target_demand) = obs[t];
        let window_start = obs[t - lag_count].0;
        // Consecutive daily window iff the span covers exactly lag_count days.
        if (target_date - window_start).num_days() != lag_count as i64 {
            continue;
        }
        for k in 0..lag_count {
            rows.push(obs[t - lag_count + k].1);
        }
        if include_population {
            let population = series
                .population_for_year(target_date.year())
                .expect("series invariant: every observation year has a population");
            rows.push(cast(population as f64));
        }
        targets.push(target_demand);
        target_dates.push(target_date);
    }
    if targets.is_empty() {
        return Err(Error::InsufficientData(
            "no gap-free lag windows in the series".into(),
        ));
    }

    Ok(PatternSet {
        inputs: Matrix::from_vec(targets.len(), n_inputs, rows)?,
        targets: Matrix::column(&targets),
        target_dates,
        lag_count,
        includes_population: include_population,
        scalers: None,
    })
}

/// Three chronologically contiguous pattern sets, in temporal order.
#[derive(Debug, Clone)]
pub struct SplitSet<F> {
    pub train: PatternSet<F>,
    pub validation: PatternSet<F>,
    pub test: PatternSet<F>,
}

/// Splits patterns chronologically into train/validation/test and
/// normalizes every column with scalers fitted on the training rows only.
pub fn split_chronological<F: Float>(
    patterns: &PatternSet<F>,
    fractions: [f64; 3],
) -> Result<SplitSet<F>> {
    if fractions.iter().any(|&f| f <= 0.0 || f >= 1.0) {
        return Err(Error::InvalidParam(format!(
            "split fractions must each lie in (0, 1), got {fractions:?}"
        )));
    }
    let total: f64 = fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParam(format!(
            "split fractions must sum to 1, got {total}"
        )));
    }
    let n = patterns.n_patterns();
    let n_train = (n as f64 * fractions[0]).round() as usize;
    let n_val = (n as f64 * fractions[1]).round() as usize;
    if n_train == 0 || n_val == 0 || n_train + n_val >= n {
        return Err(Error::EmptySplit(format!(
            "{n} patterns cannot fill splits {fractions:?}"
        )));
    }
    let n_test = n - n_train - n_val;

    let slice = |start: usize, len: usize| -> (Matrix<F>, Matrix<F>, Vec<NaiveDate>) {
        let mut rows = Vec::with_capacity(len * patterns.n_inputs());
        let mut targets = Vec::with_capacity(len);
        for r in start..start + len {
            rows.extend_from_slice(patterns.inputs.row(r));
            targets.push(patterns.targets.get(r, 0));
        }
        (
            Matrix::from_vec(len, patterns.n_inputs(), rows).expect("slice of finite matrix"),
            Matrix::column(&targets),
            patterns.target_dates[start..start + len].to_vec(),
        )
    };

    let (train_x, train_y, train_dates) = slice(0, n_train);
    let (val_x, val_y, val_dates) = slice(n_train, n_val);
    let (test_x, test_y, test_dates) = slice(n_train + n_val, n_test);

    // Fit per-column scalers on the training split only.
    let input_scalers: Vec<Scaler<F>> = (0..patterns.n_inputs())
        .map(|c| Scaler::fit(&train_x.col_vec(c)))
        .collect::<Result<_>>()?;
    let target_scaler = Scaler::fit(&train_y.col_vec(0))?;
    let scalers = PatternScalers {
        inputs: input_scalers,
        target: target_scaler,
    };

    let apply = |x: &Matrix<F>, y: &Matrix<F>, dates: Vec<NaiveDate>| -> Result<PatternSet<F>> {
        let mut scaled = Vec::with_capacity(x.rows() * x.cols());
        for r in 0..x.rows() {
            for c in 0..x.cols() {
                scaled.push(scalers.inputs[c].apply(x.get(r, c)));
            }
        }
        let scaled_targets: Vec<F> = y.col_vec(0).iter().map(|&v| scalers.target.apply(v)).collect();
        Ok(PatternSet {
            inputs: Matrix::from_vec(x.rows(), x.cols(), scaled)?,
            targets: Matrix::column(&scaled_targets),
            target_dates: dates,
            lag_count: patterns.lag_count,
            includes_population: patterns.includes_population,
            scalers: Some(scalers.clone()),
        })
    };

    Ok(SplitSet {
        train: apply(&train_x, &train_y, train_dates)?,
        validation: apply(&val_x, &val_y, val_dates)?,
        test: apply(&test_x, &test_y, test_dates)?,
    })
}
