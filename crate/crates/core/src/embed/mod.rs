//! The compressive embedding pipeline.
//!
//! * [`jl_dimension`] and [`default_dimension`] pick the embedding width.
//! * [`sample_projection`] draws the random sign matrix.
//! * [`estimate_spectral_norm`] finds the scale that brings a spectrum into `[-1, 1]`.
//! * [`fast_embed_eig`], [`fast_embed_cascaded`] and [`fast_embed_general`] run the
//!   Legendre recursion on symmetric and rectangular inputs.

mod config;
mod engine;
mod norm;
mod projection;

pub use config::{default_dimension, jl_dimension, EmbedConfig};
pub use engine::{
    apply_expansion, dilation_function, fast_embed_cascaded, fast_embed_eig, fast_embed_general, plan_cascade,
    CascadePlan, EmbeddingMatrix, GeneralEmbedding, Provenance, RunStats,
};
pub use norm::{estimate_spectral_norm, NormEstimate};
pub use projection::sample_projection;
