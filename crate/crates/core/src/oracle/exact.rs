use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::poly::SpectralFunction;
use crate::sparse::{DenseBlock, SparseMatrix};

pub const DEFAULT_ORACLE_CAP: usize = 3000;

/// Largest accepted `|S v - lambda v|` for any computed eigenpair.
const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Full eigendecomposition of a small symmetric matrix and the rows of `f(S)`.
#[derive(Clone, Debug)]
pub struct ExactEmbedding {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered like `eigenvalues`.
    pub eigenvectors: DenseBlock<f64>,
    /// `f(lambda_l)` for each eigenvalue.
    pub weights: Vec<f64>,
    /// `f(S) = V diag(f(lambda)) V^T`; its rows have the same pairwise geometry as
    /// the eigenvector embedding.
    pub function_matrix: DenseBlock<f64>,
}

impl ExactEmbedding {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Rows of `f(S)`.
    pub fn rows(&self) -> &DenseBlock<f64> {
        &self.function_matrix
    }

    /// `E = [f(l_1) v_1 ... f(l_k) v_k]` restricted to eigenpairs with `f(l) != 0`.
    pub fn spectral_rows(&self) -> DenseBlock<f64> {
        let n = self.n();
        let keep: Vec<usize> = (0..n).filter(|&l| self.weights[l] != 0.0).collect();
        let values = (0..n)
            .flat_map(|i| keep.iter().map(move |&l| (i, l)))
            .map(|(i, l)| self.weights[l] * self.eigenvectors.get(i, l))
            .collect();
        DenseBlock::new(n, keep.len(), values).expect("finite eigenvectors")
    }

    /// Leading `k` eigenvectors as an `n x k` block.
    pub fn leading_eigenvectors(&self, k: usize) -> DenseBlock<f64> {
        let cols: Vec<usize> = (0..k.min(self.n())).collect();
        self.eigenvectors.select_columns(&cols).expect("columns in range")
    }
}

pub fn exact_embedding(s: &DenseBlock<f64>, f: &SpectralFunction<f64>) -> Result<ExactEmbedding> {
    exact_embedding_with_cap(s, f, DEFAULT_ORACLE_CAP)
}

pub fn exact_embedding_with_cap(s: &DenseBlock<f64>, f: &SpectralFunction<f64>, cap: usize) -> Result<ExactEmbedding> {
    let n = s.n_rows();
    if n != s.n_cols() {
        return Err(invalid("exact embedding needs a square symmetric matrix"));
    }
    if n > cap {
        return Err(Error::OracleCapExceeded { n, cap });
    }
    let m = DMatrix::from_row_slice(n, n, s.values());
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let eigenvalues: Vec<f64> = order.iter().map(|&l| eig.eigenvalues[l]).collect();
    let v = DMatrix::from_fn(n, n, |i, c| eig.eigenvectors[(i, order[c])]);

    let residual = (&m * &v - &v * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(eigenvalues.clone())))
        .column_iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::OracleResidual {
            residual,
            tolerance: RESIDUAL_TOLERANCE,
        });
    }

    let weights: Vec<f64> = eigenvalues.iter().map(|&l| f.eval(l)).collect();
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(invalid(format!("{f} is not finite on the spectrum")));
    }
    let scaled = DMatrix::from_fn(n, n, |i, c| v[(i, c)] * weights[c]);
    let fs = &scaled * v.transpose();

    let to_block = |mat: &DMatrix<f64>| {
        let values = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| mat[(i, j)])
            .collect();
        DenseBlock::new(n, n, values)
    };
    Ok(ExactEmbedding {
        eigenvalues,
        eigenvectors: to_block(&v)?,
        weights,
        function_matrix: to_block(&fs)?,
    })
}

impl SparseMatrix<f64> {
    /// Dense copy for the oracle path.
    pub fn to_dense_block(&self) -> DenseBlock<f64> {
        DenseBlock::new(self.n_rows(), self.n_cols(), self.to_dense()).expect("sparse values are finite")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::gaussian_matrix;

    type F = SpectralFunction<f64>;

    fn random_symmetric(n: usize, seed: u64) -> DenseBlock<f64> {
        let g = gaussian_matrix(n, n, seed);
        let values = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (g.get(i, j) + g.get(j, i)) / (2.0 * n as f64).sqrt())
            .collect();
        DenseBlock::new(n, n, values).unwrap()
    }

    #[test]
    fn diagonal_indicator() {
        let s = DenseBlock::new(2, 2, vec![0.9, 0.0, 0.0, 0.1]).unwrap();
        let e = exact_embedding(&s, &F::IndicatorAbove(0.5)).unwrap();
        assert_eq!(e.eigenvalues, vec![0.9, 0.1]);
        let fs = e.rows().values();
        for (got, want) in fs.iter().zip([1.0, 0.0, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_function_reproduces_matrix() {
        let s = DenseBlock::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = exact_embedding(&s, &F::Identity).unwrap();
        for (got, want) in e.rows().values().iter().zip(s.values()) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn decomposition_is_self_consistent() {
        let s = random_symmetric(50, 4);
        let f = F::commute_time(0.05).unwrap();
        let e = exact_embedding(&s, &f).unwrap();
        // f(S) assembled explicitly from the eigenpairs
        let mut err = 0.0;
        for i in 0..50 {
            for j in 0..50 {
                let direct: f64 = (0..50)
                    .map(|l| e.weights[l] * e.eigenvectors.get(i, l) * e.eigenvectors.get(j, l))
                    .sum();
                err += (direct - e.rows().get(i, j)).powi(2);
            }
        }
        assert!(err.sqrt() <= 1e-8);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rotation_does_not_change_distances() {
        let s = random_symmetric(30, 8);
        let e = exact_embedding(&s, &F::IndicatorAbove(0.0)).unwrap();
        let spectral = e.spectral_rows();
        let dist = |b: &DenseBlock<f64>, i: usize, j: usize| {
            b.row(i)
                .iter()
                .zip(b.row(j))
                .map(|(a, c)| (a - c).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        for i in 0..30 {
            for j in 0..30 {
                assert!((dist(&spectral, i, j) - dist(e.rows(), i, j)).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let s = DenseBlock::<f64>::zeros(5, 5);
        assert!(matches!(
            exact_embedding_with_cap(&s, &F::Identity, 4),
            Err(Error::OracleCapExceeded { n: 5, cap: 4 })
        ));
    }
}
