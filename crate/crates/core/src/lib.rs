//! Compressive spectral embeddings of large sparse matrices.
//!
//! Rows of `f(S)` for a symmetric `S` with `|S| <= 1` are embedded into `d`
//! dimensions as `f_L(S) Omega`, where `f_L` is an order-`L` Legendre
//! expansion of the weighting function and `Omega` a random sign matrix.
//! Pairwise distances of the result track those of the exact eigenvector
//! embedding `[f(l_1) v_1 ... f(l_n) v_n]` without an eigendecomposition.
//! Each column of the output costs `L` sparse products.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below name the common `f64` instantiations.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cluster;
pub mod embed;
pub mod error;
pub mod format;
pub mod oracle;
pub mod poly;
pub mod scalar;
pub mod sparse;
pub mod synth;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type SparseMatrix64 = sparse::SparseMatrix<f64>;
pub type SparseMatrix32 = sparse::SparseMatrix<f32>;
pub type DenseBlock64 = sparse::DenseBlock<f64>;
pub type DenseBlock32 = sparse::DenseBlock<f32>;
pub type SpectralFunction64 = poly::SpectralFunction<f64>;
pub type SpectralFunction32 = poly::SpectralFunction<f32>;
pub type LegendreExpansion64 = poly::LegendreExpansion<f64>;
pub type EmbeddingMatrix64 = embed::EmbeddingMatrix<f64>;
pub type EmbeddingMatrix32 = embed::EmbeddingMatrix<f32>;
