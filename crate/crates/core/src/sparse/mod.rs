//! Compressed sparse row storage, dense row-major blocks and the
//! multi-vector product that dominates embedding cost.
//!
//! Everything here is immutable once built. [`SparseMatrix::spmv_multi`]
//! parallelizes over output rows, and each row is accumulated in stored
//! column order, so the result does not depend on the worker count.

mod build;
mod dense;
mod graph;
pub mod io;

pub use build::{dilate, kernel_matrix, normalized_adjacency, rescale_spectrum, KernelKind, KernelSpec};
pub use dense::DenseBlock;
pub use graph::Graph;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Minimum rows handed to a single rayon task by the SpMV kernels.
const ROWS_PER_TASK: usize = 128;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix<T> {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<T>,
}

impl<T: Scalar> SparseMatrix<T> {
    /// Builds a matrix from raw CSR arrays, checking every structural invariant.
    pub fn from_csr(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<T>,
    ) -> Result<Self> {
        if row_offsets.len() != n_rows + 1 {
            return Err(Error::DimensionMismatch {
                op: "from_csr row_offsets",
                expected: n_rows + 1,
                found: row_offsets.len(),
            });
        }
        if col_indices.len() != values.len() {
            return Err(Error::DimensionMismatch {
                op: "from_csr values",
                expected: col_indices.len(),
                found: values.len(),
            });
        }
        if row_offsets[0] != 0 || row_offsets[n_rows] != col_indices.len() {
            return Err(invalid("row_offsets must start at 0 and end at nnz"));
        }
        for i in 0..n_rows {
            let (lo, hi) = (row_offsets[i], row_offsets[i + 1]);
            if lo > hi {
                return Err(invalid(format!("row_offsets decrease at row {i}")));
            }
            let cols = &col_indices[lo..hi];
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(invalid(format!("column indices of row {i} not strictly increasing")));
            }
            if cols.last().is_some_and(|&c| c >= n_cols) {
                return Err(invalid(format!("column index out of range in row {i}")));
            }
        }
        if let Some(k) = values.iter().position(|v| *v == T::zero() || !v.is_finite()) {
            return Err(invalid(format!("stored value {k} is zero or non-finite")));
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed,
    /// entries that end up exactly zero are dropped.
    pub fn from_triplets<I>(n_rows: usize, n_cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, T)>,
    {
        let mut entries: Vec<(usize, usize, T)> = triplets.into_iter().collect();
        for &(r, c, v) in &entries {
            if r >= n_rows || c >= n_cols {
                return Err(invalid(format!("entry ({r}, {c}) outside a {n_rows}x{n_cols} matrix")));
            }
            if !v.is_finite() {
                return Err(invalid(format!("non-finite value at ({r}, {c})")));
            }
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));

        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut iter = entries.into_iter().peekable();
        while let Some((r, c, mut v)) = iter.next() {
            while let Some(&(r2, c2, v2)) = iter.peek() {
                if (r2, c2) != (r, c) {
                    break;
                }
                v = v + v2;
                iter.next();
            }
            if v != T::zero() {
                col_indices.push(c);
                values.push(v);
                row_offsets[r + 1] += 1;
            }
        }
        for i in 0..n_rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![T::one(); n])
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_triplets(n, n, diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
            .expect("diagonal entries are in range")
    }

    /// Dense row-major input, zeros skipped.
    pub fn from_dense(n_rows: usize, n_cols: usize, dense: &[T]) -> Result<Self> {
        if dense.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch {
                op: "from_dense",
                expected: n_rows * n_cols,
                found: dense.len(),
            });
        }
        Self::from_triplets(
            n_rows,
            n_cols,
            dense
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != T::zero())
                .map(|(k, &v)| (k / n_cols, k % n_cols, v)),
        )
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Column indices and values stored in row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let (lo, hi) = (self.row_offsets[i], self.row_offsets[i + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(T::zero(), |k| vals[k])
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for j in 0..self.n_cols {
            counts[j + 1] += counts[j];
        }
        let row_offsets = counts.clone();
        let mut next = counts;
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![T::zero(); self.nnz()];
        // Rows are visited in increasing order, so each transposed row comes out sorted.
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let slot = next[c];
                col_indices[slot] = i;
                values[slot] = v;
                next[c] += 1;
            }
        }
        Self {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_offsets,
            col_indices,
            values,
        }
    }

    /// Bit-exact symmetry check.
    pub fn is_symmetric(&self) -> bool {
        self.n_rows == self.n_cols && *self == self.transpose()
    }

    /// Multiplies every stored value by `factor`, dropping entries that underflow to zero.
    pub fn scaled(&self, factor: T) -> Self {
        Self::from_triplets(
            self.n_rows,
            self.n_cols,
            self.triplets().map(|(r, c, v)| (r, c, v * factor)),
        )
        .expect("scaling keeps indices in range")
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&c, &v)| (i, c, v))
        })
    }

    /// Dense row-major copy; intended for desk-scale checks only.
    pub fn to_dense(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.n_rows * self.n_cols];
        for (r, c, v) in self.triplets() {
            out[r * self.n_cols + c] = v;
        }
        out
    }

    /// `Y = S X` for a block of right-hand sides.
    pub fn spmv_multi(&self, x: &DenseBlock<T>) -> Result<DenseBlock<T>> {
        let mut out = DenseBlock::zeros(self.n_rows, x.n_cols());
        self.spmv_multi_into(x, &mut out)?;
        Ok(out)
    }

    /// In-place form of [`spmv_multi`](Self::spmv_multi); `out` is overwritten.
    pub fn spmv_multi_into(&self, x: &DenseBlock<T>, out: &mut DenseBlock<T>) -> Result<()> {
        if x.n_rows() != self.n_cols {
            return Err(Error::DimensionMismatch {
                op: "spmv_multi",
                expected: self.n_cols,
                found: x.n_rows(),
            });
        }
        if out.n_rows() != self.n_rows || out.n_cols() != x.n_cols() {
            return Err(Error::DimensionMismatch {
                op: "spmv_multi output",
                expected: self.n_rows * x.n_cols(),
                found: out.n_rows() * out.n_cols(),
            });
        }
        let d = x.n_cols();
        if d == 0 || self.n_rows == 0 {
            return Ok(());
        }
        let xv = x.values();
        out.values_mut()
            .par_chunks_mut(d)
            .with_min_len(ROWS_PER_TASK)
            .enumerate()
            .for_each(|(i, out_row)| {
                out_row.fill(T::zero());
                let (cols, vals) = self.row(i);
                for (&c, &v) in cols.iter().zip(vals) {
                    let x_row = &xv[c * d..(c + 1) * d];
                    for (o, &xe) in out_row.iter_mut().zip(x_row) {
                        *o = *o + v * xe;
                    }
                }
            });
        Ok(())
    }

    /// Single-vector product.
    pub fn spmv(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                op: "spmv",
                expected: self.n_cols,
                found: x.len(),
            });
        }
        Ok((0..self.n_rows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).fold(T::zero(), |acc, (&c, &v)| acc + v * x[c])
            })
            .collect())
    }

    pub fn cast<U: Scalar>(&self) -> SparseMatrix<U> {
        SparseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_offsets: self.row_offsets.clone(),
            col_indices: self.col_indices.clone(),
            values: self.values.iter().map(|v| U::of(v.as_f64())).collect(),
        }
    }
}
