use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Dense row-major block: projection matrices, recursion iterates and embeddings.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseBlock<T> {
    n_rows: usize,
    n_cols: usize,
    values: Vec<T>,
}

impl<T: Scalar> DenseBlock<T> {
    pub fn new(n_rows: usize, n_cols: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch {
                op: "DenseBlock::new",
                expected: n_rows * n_cols,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("dense block entries must be finite"));
        }
        Ok(Self { n_rows, n_cols, values })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            values: vec![T::zero(); n_rows * n_cols],
        }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch {
                op: "DenseBlock::from_rows",
                expected: n_cols,
                found: bad.len(),
            });
        }
        Self::new(rows.len(), n_cols, rows.concat())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.n_cols + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        // chunks_exact(0) panics, so an empty-width block yields empty rows explicitly.
        let width = self.n_cols.max(1);
        let empty = self.n_cols == 0;
        (0..self.n_rows).map(move |i| {
            if empty {
                &self.values[0..0]
            } else {
                &self.values[i * width..(i + 1) * width]
            }
        })
    }

    /// Copy of the listed columns, in the order given.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if let Some(&c) = cols.iter().find(|&&c| c >= self.n_cols) {
            return Err(invalid(format!("column {c} out of range for width {}", self.n_cols)));
        }
        let mut values = Vec::with_capacity(self.n_rows * cols.len());
        for row in self.rows() {
            values.extend(cols.iter().map(|&c| row[c]));
        }
        Ok(Self {
            n_rows: self.n_rows,
            n_cols: cols.len(),
            values,
        })
    }

    /// Copy of the row range `start..end`.
    pub fn slice_rows(&self, start: usize, end: usize) -> Self {
        Self {
            n_rows: end - start,
            n_cols: self.n_cols,
            values: self.values[start * self.n_cols..end * self.n_cols].to_vec(),
        }
    }

    pub fn frobenius_norm(&self) -> T {
        self.values.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            values: self.values.iter().map(|&v| v * factor).collect(),
        }
    }

    /// `self - other`, elementwise.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if (self.n_rows, self.n_cols) != (other.n_rows, other.n_cols) {
            return Err(Error::DimensionMismatch {
                op: "DenseBlock elementwise",
                expected: self.n_rows * self.n_cols,
                found: other.n_rows * other.n_cols,
            });
        }
        Ok(Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn cast<U: Scalar>(&self) -> DenseBlock<U> {
        DenseBlock {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            values: self.values.iter().map(|v| U::of(v.as_f64())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_bad_length() {
        assert!(DenseBlock::new(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DenseBlock::new(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn select_and_slice() {
        let b = DenseBlock::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        let s = b.select_columns(&[2, 0]).unwrap();
        assert_eq!(s.values(), &[3.0, 1.0, 6.0, 4.0]);
        assert_eq!(b.slice_rows(1, 2).values(), &[4.0, 5.0, 6.0]);
        assert!(b.select_columns(&[3]).is_err());
    }
}
