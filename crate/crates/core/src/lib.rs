//! Daily water-demand forecasting models and a model-selection tournament.
//!
//! The crate trains three model families on lagged daily-demand patterns —
//! multi-layer perceptrons ([`mlp`]), radial basis function networks
//! ([`rbf`]) and epsilon-insensitive support vector regression ([`svr`]) —
//! and ranks them by validation accuracy and percentage error ([`eval`]).
//! The best SVR model (the *Support Vector Genius*), the best neural model
//! (the *Artificial Neural Genius*) and the winner between the two on the
//! held-out test set (the *Overall Genius*) fall out of
//! [`eval::run_tournament`].
//!
//! All numerical code is generic over the scalar type through [`Float`];
//! the aliases at the crate root fix it to `f64`, which is what the CLI and
//! the experiment runners use. Every stochastic step is driven by the
//! seeded generator in [`numerics::Rng`], so a run is reproducible from its
//! seed alone.
//!
//! ```
//! use hydrocast::dataio::{self, SynthParams};
//! use hydrocast::numerics::Rng;
//!
//! let series = dataio::synthesize_series::<f64>(&mut Rng::new(7), &SynthParams::default()).unwrap();
//! let patterns = dataio::build_patterns(&series, 4, true).unwrap();
//! assert_eq!(patterns.n_inputs(), 5);
//! ```

pub mod dataio;
pub mod error;
pub mod eval;
pub mod float;
pub mod mlp;
pub mod model_io;
pub mod numerics;
pub mod rbf;
pub mod svr;
pub mod testkit;

pub use error::{Error, Result};
pub use float::Float;

// Default 64-bit instantiations of the generic core types.
// pub type Matrix = numerics::Matrix<f64>;
// pub type Scaler = dataio::Scaler<f64>;
// pub type DemandSeries = dataio::DemandSeries<f64>;
// pub type PatternSet = dataio::PatternSet<f64>;
// pub type SplitSet = dataio::SplitSet<f64>;
// pub type MlpModel = mlp::MlpModel<f64>;
// pub type RbfModel = rbf::RbfModel<f64>;
// pub type SvrModel = svr::SvrModel<f64>;
// pub type EvalReport = eval::EvalReport<f64>;
// pub type TournamentResult = eval::TournamentResult<f64>;
// pub type TrainedModel = model_io::TrainedModel<f64>;
