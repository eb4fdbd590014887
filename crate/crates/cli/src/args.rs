use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "csemb",
    version,
    about = "Compressive spectral embeddings of sparse matrices"
)]
pub struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true, env = "CSEMB_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a compressive embedding and write it with a metadata file.
    Embed(EmbedArgs),
    /// Compare an embedding against the exact one over sampled vertex pairs.
    Eval(EvalArgs),
    /// Write the rows of f(S) from a dense eigendecomposition.
    Exact(ExactArgs),
    /// K-means on embedding rows, scored by graph modularity.
    Cluster(ClusterArgs),
    /// Estimate the spectral norm of the prepared matrix.
    Norm(NormArgs),
    /// Re-run an embed command from its metadata file.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFormat {
    Edgelist,
    Mtx,
    Points,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    /// D^{-1/2} A D^{-1/2} of an edge list.
    NormalizedAdjacency,
    /// 0/1 adjacency of an edge list.
    Adjacency,
    /// The symmetric Matrix Market matrix as stored.
    Raw,
    /// [0 A^T; A 0] of a rectangular matrix.
    Dilation,
    /// exp(-|x_p - x_q|^2 / alpha^2) on a point cloud.
    KernelGaussian,
    /// 1{|x_p - x_q| < alpha} on a point cloud.
    KernelIndicator,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rescale {
    /// Normalized adjacency as is, every other matrix divided by its norm estimate.
    Auto,
    Always,
    Never,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weight {
    Legendre,
    Chebyshev,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct InputArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "edgelist")]
    pub format: InputFormat,
    #[arg(long, value_enum, default_value = "normalized-adjacency")]
    pub matrix: MatrixKind,
    /// Kernel bandwidth alpha.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Vertex count for edge lists (default: largest id + 1).
    #[arg(long)]
    pub vertices: Option<usize>,
    #[arg(long, value_enum, default_value = "auto")]
    pub rescale: Rescale,
    /// Divide the matrix by this value instead of estimating its norm.
    #[arg(long)]
    pub scale: Option<f64>,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct PolyArgs {
    /// indicator:C, commute[:CLIP], identity, const:C, poly:c0,c1,... or table:PATH
    #[arg(long)]
    pub function: String,
    /// Total polynomial order (sparse products).
    #[arg(long = "L", default_value_t = 180)]
    pub order: usize,
    /// Cascade factor; must divide L.
    #[arg(long = "b", default_value_t = 2)]
    pub cascade: usize,
    /// Embedding dimension (default: ceil(6 ln n)).
    #[arg(long = "d")]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "legendre")]
    pub weight: Weight,
}

#[derive(Clone, Debug, Args, Serialize, Deserialize)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub poly: PolyArgs,
    /// Binary embedding file (rows of A for a dilation).
    #[arg(long)]
    pub output: PathBuf,
    /// Also write the embedding as CSV.
    #[arg(long)]
    pub output_csv: Option<PathBuf>,
    /// Column embedding of a dilation.
    #[arg(long)]
    pub output_col: Option<PathBuf>,
    /// Metadata JSON (default: OUTPUT.json).
    #[arg(long)]
    pub metadata: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct EvalArgs {
    /// Approximate embedding (binary).
    #[arg(long)]
    pub approx: PathBuf,
    /// Exact embedding rows (binary), e.g. from `csemb exact`.
    #[arg(long)]
    pub exact: Option<PathBuf>,
    /// Compute the exact side from this matrix instead.
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long)]
    pub pairs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub percentiles_csv: Option<PathBuf>,
    #[arg(long)]
    pub calibration_csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub function: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
    /// Eigenvalues and f(eigenvalues) as CSV.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct ClusterArgs {
    /// Edge list of the graph to cluster.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub vertices: Option<usize>,
    /// Cluster these rows instead of computing an embedding.
    #[arg(long)]
    pub embedding: Option<PathBuf>,
    #[arg(long)]
    pub function: Option<String>,
    #[arg(long = "L", default_value_t = 180)]
    pub order: usize,
    #[arg(long = "b", default_value_t = 2)]
    pub cascade: usize,
    #[arg(long = "d")]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub k: usize,
    #[arg(long, default_value_t = 25)]
    pub runs: usize,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    /// CSV of (vertex_id, cluster_id) from the median run.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct NormArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the estimate here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct ReplayArgs {
    /// Metadata JSON written by `csemb embed`.
    #[arg(long)]
    pub metadata: PathBuf,
    /// Write the replayed embedding here instead of the recorded path.
    #[arg(long)]
    pub output: Option<PathBuf>,
}
