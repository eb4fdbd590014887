use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::scalar::Scalar;
use crate::sparse::DenseBlock;

/// `n x d` matrix with independent entries `+-1/sqrt(d)`.
///
/// Column `j` is drawn from its own ChaCha stream (`seed`, stream `j`), one bit
/// per row, so entry `(i, j)`'s sign is a pure function of `(seed, i, j)`: any
/// subset of columns, or any worker count, reproduces the same values.
pub fn sample_projection<T: Scalar>(n: usize, d: usize, seed: u64) -> DenseBlock<T> {
    let scale = T::one() / T::of(d as f64).sqrt();
    let words = n.div_ceil(64);
    let columns: Vec<Vec<u64>> = (0..d)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            (0..words).map(|_| rng.next_u64()).collect()
        })
        .collect();
    let mut values = Vec::with_capacity(n * d);
    for i in 0..n {
        let (word, bit) = (i / 64, i % 64);
        values.extend(
            columns
                .iter()
                .map(|col| if (col[word] >> bit) & 1 == 1 { scale } else { -scale }),
        );
    }
    DenseBlock::new(n, d, values).expect("projection entries are finite")
}
