//! Min-max scaling of a single column.

use crate::error::{Error, Result};
use crate::float::{to_f64, Float};

/// Min-max bounds of one feature column.
///
/// Maps `x` to `(x - x_min) / (x_max - x_min)`, so the column minimum
/// lands on 0 and the maximum on 1. Values outside the fitted range map
/// outside `[0, 1]`, which is expected when a scaler fitted on the training
/// split is applied to later data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaler<F> {
    pub x_min: F,
    pub x_max: F,
}

impl<F: Float> Scaler<F> {
    /// Fits the bounds of `values`. Fails on a degenerate column.
    pub fn fit(values: &[F]) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InsufficientData(
                "scaler needs at least two values".into(),
            ));
        }
        let x_min = values.iter().cloned().fold(F::infinity(), F::min);
        let x_max = values.iter().cloned().fold(F::neg_infinity(), F::max);
        if x_max <= x_min {
            return Err(Error::DegenerateColumn {
                value: to_f64(x_min),
            });
        }
        Ok(Scaler { x_min, x_max })
    }

    #[inline]
    pub fn apply(&self, v: F) -> F {
        (v - self.x_min) / (self.x_max - self.x_min)
    }

    #[inline]
    pub fn invert(&self, scaled: F) -> F {
        self.x_min + scaled * (self.x_max - self.x_min)
    }
}

/// Scales a column to `[0, 1]`; fits bounds from the data when no scaler
/// is given. Returns the scaled values together with the scaler used.
pub fn normalize<F: Float>(values: &[F], scaler: Option<&Scaler<F>>) -> Result<(Vec<F>, Scaler<F>)> {
    let scaler = match scaler {
        Some(s) => {
            if s.x_max <= s.x_min {
                return Err(Error::DegenerateColumn {
                    value: to_f64(s.x_min),
                });
            }
            *s
        }
        None => Scaler::fit(values)?,
    };
    Ok((values.iter().map(|&v| scaler.apply(v)).collect(), scaler))
}

/// Inverse of [`normalize`] for a known scaler.
pub fn denormalize<F: Float>(scaled: &[F], scaler: &Scaler<F>) -> Vec<F> {
    scaled.iter().map(|&v| scaler.invert(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bounds_map_to_zero_and_one() {
        let values = [4.0f64, 10.0, 7.0];
        let (scaled, scaler) = normalize(&values, None).unwrap();
        assert_eq!(scaled[0], 0.0); // x = x_min
        assert_eq!(scaled[1], 1.0); // x = x_max
        assert_eq!(scaled[2], 0.5); // midpoint
        assert_eq!(scaler.x_min, 4.0);
        assert_eq!(scaler.x_max, 10.0);
    }

    #[test]
    fn degenerate_column_rejected() {
        let values = [3.0f64, 3.0, 3.0];
        assert!(matches!(
            normalize(&values, None),
            Err(crate::Error::DegenerateColumn { .. })
        ));
    }

    #[test]
    fn denormalize_hits_bounds() {
        let scaler = Scaler {
            x_min: 2.0f64,
            x_max: 8.0,
        };
        assert_eq!(denormalize(&[0.0], &scaler), vec![2.0]);
        assert_eq!(denormalize(&[1.0], &scaler), vec![8.0]);
    }

    #[test]
    fn reusing_a_scaler_can_exceed_unit_interval() {
        let scaler = Scaler {
            x_min: 0.0f64,
            x_max: 10.0,
        };
        let (scaled, _) = normalize(&[12.0], Some(&scaler)).unwrap();
        assert!(scaled[0] > 1.0);
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(
            mut values in proptest::collection::vec(-1e6f64..1e6, 2..50)
        ) {
            values[0] -= 1.0; // guarantee two distinct entries
            let (scaled, scaler) = normalize(&values, None).unwrap();
            let back = denormalize(&scaled, &scaler);
            for (orig, rt) in values.iter().zip(&back) {
                let tol = 1e-12 * orig.abs().max(1.0);
                prop_assert!((orig - rt).abs() <= tol, "{orig} vs {rt}");
            }
        }
    }
}
