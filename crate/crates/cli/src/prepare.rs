use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use csemb::embed::{estimate_spectral_norm, EmbedConfig, NormEstimate};
use csemb::sparse::io::{read_edge_list, read_matrix_market, read_points_csv};
use csemb::sparse::{dilate, kernel_matrix, Graph, KernelKind, KernelSpec};
use csemb::SparseMatrix64;
use serde::Serialize;

use crate::args::{InputArgs, InputFormat, MatrixKind, Rescale};
use crate::failure::{CliError, CliResult};

/// The symmetric operator to embed, after optional rescaling.
pub struct Prepared {
    pub matrix: SparseMatrix64,
    /// The rectangular matrix behind a dilation, rescaled like `matrix`.
    pub general: Option<SparseMatrix64>,
    pub norm: Option<NormEstimate>,
    /// Every entry was divided by this value.
    pub scale: f64,
}

#[derive(Debug, Serialize)]
pub struct MatrixSummary {
    pub kind: MatrixKind,
    pub n_rows: usize,
    pub n_cols: usize,
    pub nnz: usize,
}

impl Prepared {
    pub fn summary(&self, kind: MatrixKind) -> MatrixSummary {
        let m = self.general.as_ref().unwrap_or(&self.matrix);
        MatrixSummary {
            kind,
            n_rows: m.n_rows(),
            n_cols: m.n_cols(),
            nnz: m.nnz(),
        }
    }
}

pub fn open(path: &Path) -> CliResult<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, e))
}

pub fn load_graph(path: &Path, vertices: Option<usize>) -> CliResult<Graph> {
    read_edge_list(open(path)?, vertices).map_err(CliError::loading)
}

pub fn prepare(input: &InputArgs, cfg: &EmbedConfig) -> CliResult<Prepared> {
    let path = input
        .input
        .as_deref()
        .ok_or_else(|| CliError::usage("--input is required"))?;
    let mut general = None;
    let matrix = match (input.format, input.matrix) {
        (InputFormat::Edgelist, MatrixKind::NormalizedAdjacency | MatrixKind::Adjacency) => {
            let g = load_graph(path, input.vertices)?;
            if input.matrix == MatrixKind::Adjacency {
                g.adjacency()
            } else {
                g.normalized_adjacency()
            }
        }
        (InputFormat::Mtx, MatrixKind::Raw) => {
            let m: SparseMatrix64 = read_matrix_market(open(path)?).map_err(CliError::loading)?;
            if !m.is_symmetric() {
                return Err(CliError::input(
                    "matrix is not symmetric; use --matrix dilation for rectangular or unsymmetric input",
                ));
            }
            m
        }
        (InputFormat::Mtx, MatrixKind::Dilation) => {
            let a: SparseMatrix64 = read_matrix_market(open(path)?).map_err(CliError::loading)?;
            let s = dilate(&a).map_err(CliError::loading)?;
            general = Some(a);
            s
        }
        (InputFormat::Points, MatrixKind::KernelGaussian | MatrixKind::KernelIndicator) => {
            let alpha = input
                .bandwidth
                .ok_or_else(|| CliError::usage("kernel matrices need --bandwidth"))?;
            let kind = if input.matrix == MatrixKind::KernelGaussian {
                KernelKind::Gaussian
            } else {
                KernelKind::Indicator
            };
            let spec = KernelSpec::new(kind, alpha)?;
            let points = read_points_csv(open(path)?).map_err(CliError::loading)?;
            kernel_matrix(&points, spec).map_err(CliError::loading)?
        }
        (format, kind) => {
            return Err(CliError::usage(format!(
                "--matrix {} cannot be built from --format {}",
                value_name(kind),
                value_name(format)
            )))
        }
    };

    let rescale = match input.rescale {
        Rescale::Auto => input.matrix != MatrixKind::NormalizedAdjacency,
        Rescale::Always => true,
        Rescale::Never => false,
    };
    let (norm, scale) = match (input.scale, rescale) {
        (Some(s), _) if !(s > 0.0 && s.is_finite()) => {
            return Err(CliError::usage(format!("--scale must be positive, got {s}")))
        }
        (Some(s), _) => (None, s),
        (None, true) => {
            let est = estimate_spectral_norm(&matrix, cfg)?;
            log::info!(
                "spectral norm estimate {:.6} ({} products)",
                est.estimate,
                est.spmv_count
            );
            let s = if est.estimate > 0.0 { est.estimate } else { 1.0 };
            (Some(est), s)
        }
        (None, false) => (None, 1.0),
    };
    let (matrix, general) = if scale == 1.0 {
        (matrix, general)
    } else {
        (matrix.scaled(1.0 / scale), general.map(|a| a.scaled(1.0 / scale)))
    };
    Ok(Prepared {
        matrix,
        general,
        norm,
        scale,
    })
}

fn value_name(v: impl clap::ValueEnum) -> String {
    v.to_possible_value()
        .map(|p| p.get_name().to_string())
        .unwrap_or_default()
}
