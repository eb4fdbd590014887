//! Desk-scale ground truth: exact spectral embeddings from a dense
//! eigendecomposition, cosine similarities between embedding rows, the
//! distortion-percentile comparison of an approximate embedding against the
//! exact one, and an audit of the two-sided distance guarantee.

mod audit;
mod correlation;
mod exact;

pub use audit::{theorem1_audit, AuditReport};
pub use correlation::{
    distortion_percentiles, normalized_correlation, percentile, CalibrationBin, Correlation, DistortionReport,
    PercentileValue, ReportMode, CALIBRATION_BIN_WIDTH, DEFAULT_PAIR_SAMPLE, REPORTED_PERCENTILES,
};
pub use exact::{exact_embedding, exact_embedding_with_cap, ExactEmbedding, DEFAULT_ORACLE_CAP};
