use crate::error::{invalid, Result};
use crate::scalar::Scalar;

use super::SparseMatrix;

/// Simple undirected graph in canonical form: edges stored once as `(u, v)`
/// with `u < v`, sorted, no duplicates, no self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Canonicalizes an arbitrary edge list. Self-loops are dropped and
    /// repeated or reversed edges collapse to one.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut canon = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(invalid(format!("edge ({u}, {v}) references a vertex outside 0..{n}")));
            }
            if u != v {
                canon.push((u.min(v), u.max(v)));
            }
        }
        canon.sort_unstable();
        canon.dedup();
        Ok(Self { n, edges: canon })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// 0/1 symmetric adjacency matrix.
    pub fn adjacency<T: Scalar>(&self) -> SparseMatrix<T> {
        SparseMatrix::from_triplets(
            self.n,
            self.n,
            self.edges
                .iter()
                .flat_map(|&(u, v)| [(u, v, T::one()), (v, u, T::one())]),
        )
        .expect("canonical edges are in range")
    }

    /// `D^{-1/2} A D^{-1/2}`. Isolated vertices keep an all-zero row and column.
    pub fn normalized_adjacency<T: Scalar>(&self) -> SparseMatrix<T> {
        let inv_sqrt: Vec<f64> = self
            .degrees()
            .into_iter()
            .map(|d| if d == 0 { 0.0 } else { 1.0 / (d as f64).sqrt() })
            .collect();
        SparseMatrix::from_triplets(
            self.n,
            self.n,
            self.edges.iter().flat_map(|&(u, v)| {
                // The product is commutative, so both mirrored entries are bit-identical.
                let w = T::of(inv_sqrt[u] * inv_sqrt[v]);
                [(u, v, w), (v, u, w)]
            }),
        )
        .expect("canonical edges are in range")
    }
}
