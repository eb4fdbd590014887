//! Seeded synthetic inputs: planted-partition graphs and random symmetric
//! matrices for tests, benchmarks and acceptance runs.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::sparse::{DenseBlock, Graph, SparseMatrix};

/// `(i, j)` with `i < j` for the `p`-th pair of `0..n` in row-major upper-triangle order.
pub(crate) fn pair_from_index(n: usize, p: usize) -> (usize, usize) {
    // pairs before row i: i * (2n - i - 1) / 2
    let start = |i: usize| i * (2 * n - i - 1) / 2;
    let nf = n as f64;
    let disc = (2.0 * nf - 1.0) * (2.0 * nf - 1.0) - 8.0 * p as f64;
    let mut i = (((2.0 * nf - 1.0) - disc.max(0.0).sqrt()) / 2.0).floor().max(0.0) as usize;
    i = i.min(n.saturating_sub(2));
    while i > 0 && start(i) > p {
        i -= 1;
    }
    while i + 1 < n - 1 && start(i + 1) <= p {
        i += 1;
    }
    (i, i + 1 + p - start(i))
}

/// Calls `emit(k)` for each index of `0..total` kept independently with probability `p`,
/// skipping geometrically so the cost is proportional to the number kept.
fn bernoulli_indices<R: Rng>(rng: &mut R, total: usize, p: f64, mut emit: impl FnMut(usize)) {
    if p <= 0.0 || total == 0 {
        return;
    }
    if p >= 1.0 {
        (0..total).for_each(emit);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut k: usize = 0;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>(); // (0, 1]
        let skip = (u.ln() / log_q).floor();
        if !skip.is_finite() || skip >= (total - k) as f64 {
            return;
        }
        k += skip as usize;
        emit(k);
        k += 1;
        if k >= total {
            return;
        }
    }
}

/// Planted partition: `blocks` groups of near-equal size, edge probability `p_in`
/// inside a group and `p_out` across. Returns the graph and the planted labels.
pub fn stochastic_block_model(
    n: usize,
    blocks: usize,
    p_in: f64,
    p_out: f64,
    seed: u64,
) -> Result<(Graph, Vec<usize>)> {
    if blocks == 0 || blocks > n {
        return Err(invalid(format!(
            "need 1 <= blocks <= n, got {blocks} blocks for n = {n}"
        )));
    }
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) {
        return Err(invalid("edge probabilities must lie in [0, 1]"));
    }
    let bounds: Vec<usize> = (0..=blocks).map(|b| b * n / blocks).collect();
    let labels: Vec<usize> = (0..blocks)
        .flat_map(|b| std::iter::repeat_n(b, bounds[b + 1] - bounds[b]))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..blocks {
        let (lo_a, size_a) = (bounds[a], bounds[a + 1] - bounds[a]);
        let within = size_a * size_a.saturating_sub(1) / 2;
        bernoulli_indices(&mut rng, within, p_in, |k| {
            let (i, j) = pair_from_index(size_a, k);
            edges.push((lo_a + i, lo_a + j));
        });
        for b in a + 1..blocks {
            let (lo_b, size_b) = (bounds[b], bounds[b + 1] - bounds[b]);
            bernoulli_indices(&mut rng, size_a * size_b, p_out, |k| {
                edges.push((lo_a + k / size_b, lo_b + k % size_b));
            });
        }
    }
    Ok((Graph::from_edges(n, edges)?, labels))
}

pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    Ok(stochastic_block_model(n, 1, p, 0.0, seed)?.0)
}

/// Symmetric sparse matrix: each upper-triangle position (diagonal included) is
/// filled with probability `density` by a uniform value in `(-1, 1)`.
pub fn random_sparse_symmetric(n: usize, density: f64, seed: u64) -> Result<SparseMatrix<f64>> {
    if !(0.0..=1.0).contains(&density) {
        return Err(invalid("density must lie in [0, 1]"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triplets = Vec::new();
    let total = n * (n + 1) / 2;
    let mut positions = Vec::new();
    bernoulli_indices(&mut rng, total, density, |k| positions.push(k));
    for k in positions {
        // index over pairs i <= j of 0..n equals pair index over 0..n+1 with j shifted
        let (i, j) = pair_from_index(n + 1, k);
        let (i, j) = (i, j - 1);
        let v: f64 = rng.random_range(-1.0..1.0);
        if v == 0.0 {
            continue;
        }
        triplets.push((i, j, v));
        if i != j {
            triplets.push((j, i, v));
        }
    }
    SparseMatrix::from_triplets(n, n, triplets)
}

/// Dense matrix with standard normal entries.
pub fn gaussian_matrix(n_rows: usize, n_cols: usize, seed: u64) -> DenseBlock<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..n_rows * n_cols).map(|_| StandardNormal.sample(&mut rng)).collect();
    DenseBlock::new(n_rows, n_cols, values).expect("gaussian entries are finite")
}

/// Symmetric `Q diag(eigenvalues) Q^T` with a Haar-random orthogonal `Q`.
pub fn symmetric_with_spectrum(eigenvalues: &[f64], seed: u64) -> DenseBlock<f64> {
    let n = eigenvalues.len();
    let g = gaussian_matrix(n, n, seed);
    let qr = DMatrix::from_row_slice(n, n, g.values()).qr();
    let (q, r) = qr.unpack();
    // sign-fix so Q is Haar distributed
    let mut q = q;
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    let m = &q * DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(eigenvalues)) * q.transpose();
    let sym = (&m + m.transpose()) * 0.5;
    let values = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| sym[(i, j)])
        .collect();
    DenseBlock::new(n, n, values).expect("finite spectrum gives finite matrix")
}
