//! Demand-series ingestion, normalization, pattern building and splitting.
//!
//! The pipeline is: load (or synthesize) a [`DemandSeries`], turn it into
//! lagged supervised patterns with [`build_patterns`], then carve the
//! patterns into chronological train/validation/test sets with
//! [`split_chronological`], which also fits the min-max scalers on the
//! training split and applies them to all three.

mod patterns;
mod scaler;
mod series;
mod synth;

pub use patterns::{
    build_patterns, split_chronological, PatternScalers, PatternSet, SplitSet,
    DEFAULT_SPLIT_FRACTIONS,
};
pub use scaler::{denormalize, normalize, Scaler};
pub use series::{load_csv, write_demand_csv, write_population_csv, DemandSeries};
pub use synth::{synthesize_series, SynthParams};
