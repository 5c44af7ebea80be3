//! Scalar abstraction for the numerical core.

use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar the whole crate is generic over.
///
/// `f32` and `f64` implement it. The experiment defaults use `f64`: line
/// searches and kernel matrices in this problem are ill-conditioned enough
/// that 32-bit runs are only useful for smoke tests.
pub trait Float:
    num_traits::Float
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Debug
    + Display
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
}

impl Float for f32 {}
impl Float for f64 {}

/// Converts an `f64` constant into the working scalar type.
#[inline]
pub fn cast<F: Float>(v: f64) -> F {
    F::from_f64(v).expect("f64 constant representable in scalar type")
}

/// Converts the working scalar into `f64` for reporting.
#[inline]
pub fn to_f64<F: Float>(v: F) -> f64 {
    v.to_f64().expect("scalar convertible to f64")
}
