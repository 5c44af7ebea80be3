//! Dense vector/matrix arithmetic, least squares and seeded randomness.
//!
//! Everything else in the crate sits on top of these three pieces: a
//! row-major [`Matrix`], a Jacobi-SVD based [`pseudo_inverse`] /
//! [`solve_least_squares`], and the deterministic [`Rng`].

mod matrix;
mod rng;
mod svd;

pub use matrix::Matrix;
pub use rng::Rng;
pub use svd::{pseudo_inverse, solve_least_squares, svd, Svd, DEFAULT_RCOND};
