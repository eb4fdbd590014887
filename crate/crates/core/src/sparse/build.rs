//! Derived matrices: dilation of a rectangular matrix, normalized adjacency,
//! kernel matrices over point clouds and affine spectrum normalization.

use crate::error::{invalid, Result};
use crate::poly::AffineMap;
use crate::scalar::Scalar;

use super::{Graph, SparseMatrix};

/// Gaussian kernel entries below this are not stored.
pub const GAUSSIAN_DROP_TOLERANCE: f64 = 1e-12;

/// Symmetric `(m+n) x (m+n)` matrix `[0 A^T; A 0]`. Indices `0..n` stand for the
/// columns of `A`, indices `n..n+m` for its rows.
pub fn dilate<T: Scalar>(a: &SparseMatrix<T>) -> Result<SparseMatrix<T>> {
    let (m, n) = (a.n_rows(), a.n_cols());
    if m == 0 || n == 0 {
        return Err(invalid("cannot dilate an empty matrix"));
    }
    let at = a.transpose();
    let size = m + n;
    let mut row_offsets = Vec::with_capacity(size + 1);
    let mut col_indices = Vec::with_capacity(2 * a.nnz());
    let mut values = Vec::with_capacity(2 * a.nnz());
    row_offsets.push(0);
    for j in 0..n {
        let (cols, vals) = at.row(j);
        col_indices.extend(cols.iter().map(|&i| n + i));
        values.extend_from_slice(vals);
        row_offsets.push(col_indices.len());
    }
    for i in 0..m {
        let (cols, vals) = a.row(i);
        col_indices.extend_from_slice(cols);
        values.extend_from_slice(vals);
        row_offsets.push(col_indices.len());
    }
    SparseMatrix::from_csr(size, size, row_offsets, col_indices, values)
}

/// Normalized adjacency of the simple undirected graph on `n` vertices spanned by `edges`.
pub fn normalized_adjacency<T: Scalar>(edges: &[(usize, usize)], n: usize) -> Result<SparseMatrix<T>> {
    Ok(Graph::from_edges(n, edges.iter().copied())?.normalized_adjacency())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    /// `exp(-|x_p - x_q|^2 / (2 alpha^2))`
    Gaussian,
    /// `1{|x_p - x_q| < alpha}`
    Indicator,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec<T> {
    pub kind: KernelKind,
    pub bandwidth: T,
}

impl<T: Scalar> KernelSpec<T> {
    pub fn new(kind: KernelKind, bandwidth: T) -> Result<Self> {
        if !(bandwidth > T::zero()) || !bandwidth.is_finite() {
            return Err(invalid(format!("kernel bandwidth must be positive, got {bandwidth}")));
        }
        Ok(Self { kind, bandwidth })
    }
}

/// Dense-cost kernel matrix over `points`. Quadratic in the number of points.
pub fn kernel_matrix<T: Scalar>(points: &[Vec<T>], spec: KernelSpec<T>) -> Result<SparseMatrix<T>> {
    if points.is_empty() {
        return Err(invalid("kernel matrix needs at least one point"));
    }
    if !(spec.bandwidth > T::zero()) {
        return Err(invalid(format!(
            "kernel bandwidth must be positive, got {}",
            spec.bandwidth
        )));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(invalid("all points must have the same dimension"));
    }
    let alpha = spec.bandwidth;
    let two_alpha_sq = T::of(2.0) * alpha * alpha;
    let drop = T::of(GAUSSIAN_DROP_TOLERANCE);
    let l = points.len();
    let mut triplets = Vec::new();
    for p in 0..l {
        for q in p..l {
            let dist_sq: T = points[p].iter().zip(&points[q]).map(|(&a, &b)| (a - b) * (a - b)).sum();
            let value = match spec.kind {
                KernelKind::Gaussian => {
                    let v = (-dist_sq / two_alpha_sq).exp();
                    if v < drop {
                        continue;
                    }
                    v
                }
                KernelKind::Indicator => {
                    if dist_sq.sqrt() < alpha {
                        T::one()
                    } else {
                        continue;
                    }
                }
            };
            triplets.push((p, q, value));
            if p != q {
                triplets.push((q, p, value));
            }
        }
    }
    SparseMatrix::from_triplets(l, l, triplets)
}

/// Maps a spectrum contained in `[sigma_min, sigma_max]` onto `[-1, 1]`:
/// `S' = 2 S / (max - min) - (max + min) / (max - min) I`.
///
/// The returned map `t` takes the normalized variable back to the original one, so a
/// weighting function `f` defined on the original spectrum becomes `f(t(x))`.
pub fn rescale_spectrum<T: Scalar>(
    s: &SparseMatrix<T>,
    sigma_min: T,
    sigma_max: T,
) -> Result<(SparseMatrix<T>, AffineMap<T>)> {
    if s.n_rows() != s.n_cols() {
        return Err(invalid("spectrum rescaling needs a square matrix"));
    }
    if !(sigma_max > sigma_min) {
        return Err(invalid(format!(
            "spectrum bounds must satisfy min < max, got [{sigma_min}, {sigma_max}]"
        )));
    }
    let width = sigma_max - sigma_min;
    let two = T::of(2.0);
    let scale = two / width;
    let shift = (sigma_max + sigma_min) / width;
    let n = s.n_rows();
    let scaled = s.triplets().map(|(r, c, v)| (r, c, v * scale));
    let diagonal = (0..n).filter(|_| shift != T::zero()).map(|i| (i, i, -shift));
    let rescaled = SparseMatrix::from_triplets(n, n, scaled.chain(diagonal))?;
    let map = AffineMap::new(width / two, (sigma_max + sigma_min) / two);
    Ok((rescaled, map))
}
