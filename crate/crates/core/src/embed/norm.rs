use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::Scalar;
use crate::sparse::{DenseBlock, SparseMatrix};

use super::EmbedConfig;

/// Stream reserved for norm-estimation starting vectors, away from projection columns.
const NORM_STREAM: u64 = 1 << 62;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    /// Largest `|x^T S x| / x^T x` seen over all vectors and iterations; a lower bound on `|S|`.
    pub rayleigh_max: f64,
    /// `rayleigh_max * norm_safety`, the value used for rescaling.
    pub estimate: f64,
    pub vectors: usize,
    pub iterations: usize,
    pub spmv_count: u64,
}

/// Power iteration on `ceil(factor * ln n)` Gaussian starting vectors, batched into
/// one block so each iteration is a single multi-vector product.
pub fn estimate_spectral_norm<T: Scalar>(s: &SparseMatrix<T>, cfg: &EmbedConfig) -> Result<NormEstimate> {
    let n = s.n_rows();
    if n != s.n_cols() {
        return Err(invalid("norm estimation needs a square (symmetric) matrix"));
    }
    let k = ((cfg.norm_vectors_factor * (n.max(1) as f64).ln()).ceil() as usize).max(1);
    if n == 0 || s.nnz() == 0 {
        return Ok(NormEstimate {
            rayleigh_max: 0.0,
            estimate: 0.0,
            vectors: k,
            iterations: 0,
            spmv_count: 0,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(NORM_STREAM);
    let start: Vec<T> = (0..n * k).map(|_| T::of(StandardNormal.sample(&mut rng))).collect();
    let mut x = DenseBlock::new(n, k, start)?;
    normalize_columns(&mut x);
    let mut y = DenseBlock::zeros(n, k);

    let mut best = T::zero();
    for _ in 0..cfg.norm_iters {
        s.spmv_multi_into(&x, &mut y)?;
        let mut xy = vec![T::zero(); k];
        let mut xx = vec![T::zero(); k];
        for (xr, yr) in x.rows().zip(y.rows()) {
            for c in 0..k {
                xy[c] = xy[c] + xr[c] * yr[c];
                xx[c] = xx[c] + xr[c] * xr[c];
            }
        }
        for c in 0..k {
            if xx[c] > T::zero() {
                best = best.max((xy[c] / xx[c]).abs());
            }
        }
        std::mem::swap(&mut x, &mut y);
        normalize_columns(&mut x);
    }
    let rayleigh_max = best.as_f64();
    log::debug!("norm estimate: max Rayleigh quotient {rayleigh_max:e} over {k} vectors");
    Ok(NormEstimate {
        rayleigh_max,
        estimate: rayleigh_max * cfg.norm_safety,
        vectors: k,
        iterations: cfg.norm_iters,
        spmv_count: cfg.norm_iters as u64,
    })
}

fn normalize_columns<T: Scalar>(x: &mut DenseBlock<T>) {
    let k = x.n_cols();
    let mut norms = vec![T::zero(); k];
    for row in x.rows() {
        for (acc, &v) in norms.iter_mut().zip(row) {
            *acc = *acc + v * v;
        }
    }
    let inv: Vec<T> = norms
        .into_iter()
        .map(|s| if s > T::zero() { T::one() / s.sqrt() } else { T::zero() })
        .collect();
    for row in x.values_mut().chunks_mut(k) {
        for (v, &f) in row.iter_mut().zip(&inv) {
            *v = *v * f;
        }
    }
}
