//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: left is {left_rows}x{left_cols}, right is {right_rows}x{right_cols}")]
    ShapeMismatch {
        op: &'static str,
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("non-finite value produced by {context}")]
    NonFinite { context: String },

    #[error("singular value decomposition did not converge (condition estimate {condition:.3e})")]
    SvdNoConvergence { condition: f64 },

    #[error("{path}:{line}: {message}")]
    Csv {
        path: String,
        line: usize,
        message: String,
    },

    #[error("degenerate column: x_max == x_min ({value})")]
    DegenerateColumn { value: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("empty split: {0}")]
    EmptySplit(String),

    #[error("empty series")]
    EmptySeries,

    #[error("training diverged at iteration {iteration}: objective is non-finite")]
    Divergence { iteration: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("model format error: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
