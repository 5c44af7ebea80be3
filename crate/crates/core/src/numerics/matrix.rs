//! Row-major dense matrix.

use crate::error::{Error, Result};
use crate::float::Float;

/// Dense matrix with entries stored in row-major order.
///
/// Values are immutable after construction as far as the public API is
/// concerned; construction validates that every entry is finite and the
/// arithmetic operations keep it that way or report [`Error::NonFinite`].
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    entries: Vec<F>,
}

impl<F: Float> Matrix<F> {
    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<F>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidParam(format!(
                "matrix data length {} does not match {rows}x{cols}",
                entries.len()
            )));
        }
        let m = Matrix {
            rows,
            cols,
            entries,
        };
        m.check_finite("Matrix::from_vec")?;
        Ok(m)
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<F>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::InvalidParam("ragged rows".into()));
        }
        Self::from_vec(n_rows, n_cols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            entries: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = F::one();
        }
        m
    }

    /// Single-column matrix from a slice.
    pub fn column(values: &[F]) -> Self {
        Matrix {
            rows: values.len(),
            cols: 1,
            entries: values.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> F {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub(crate) fn set(&mut self, r: usize, c: usize, v: F) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col_vec(&self, c: usize) -> Vec<F> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn as_slice(&self) -> &[F] {
        &self.entries
    }

    pub fn transpose(&self) -> Matrix<F> {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.entries[c * self.rows + r] = self.get(r, c);
            }
        }
        out
    }

    /// Standard matrix product.
    pub fn matmul(&self, other: &Matrix<F>) -> Result<Matrix<F>> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                op: "matmul",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let lhs_row = self.row(r);
            for k in 0..self.cols {
                let lv = lhs_row[k];
                if lv == F::zero() {
                    continue;
                }
                let rhs_row = other.row(k);
                let out_row = &mut out.entries[r * other.cols..(r + 1) * other.cols];
                for c in 0..other.cols {
                    out_row[c] = out_row[c] + lv * rhs_row[c];
                }
            }
        }
        out.check_finite("matmul")?;
        Ok(out)
    }

    /// Element-wise difference.
    pub fn sub(&self, other: &Matrix<F>) -> Result<Matrix<F>> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                op: "sub",
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| a - b)
            .collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            entries,
        })
    }

    /// Largest absolute entry; zero for an empty matrix.
    pub fn max_abs(&self) -> F {
        self.entries
            .iter()
            .fold(F::zero(), |acc, &v| acc.max(v.abs()))
    }

    pub(crate) fn check_finite(&self, context: &str) -> Result<()> {
        if self.entries.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite {
                context: context.to_string(),
            })
        }
    }
}
