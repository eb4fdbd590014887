use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use csemb::cluster::{cluster_embedding, ExperimentSummary};
use csemb::embed::{
    default_dimension, dilation_function, fast_embed_cascaded, fast_embed_general, plan_cascade, sample_projection,
    EmbedConfig, NormEstimate,
};
use csemb::format::{read_embedding, write_embedding, write_embedding_csv};
use csemb::oracle::{distortion_percentiles, exact_embedding, ReportMode};
use csemb::poly::{CoefficientWeight, QuadratureSpec};
use csemb::{DenseBlock64, SpectralFunction64};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::{ClusterArgs, EmbedArgs, EvalArgs, ExactArgs, MatrixKind, NormArgs, ReplayArgs, Rescale, Weight};
use crate::failure::{CliError, CliResult};
use crate::prepare::{load_graph, open, prepare, MatrixSummary};

fn config(order: usize, cascade: usize, dim: usize, seed: u64, weight: Weight) -> CliResult<EmbedConfig> {
    let cfg = EmbedConfig {
        order,
        cascade,
        dim,
        seed,
        quadrature: QuadratureSpec {
            weight: match weight {
                Weight::Legendre => CoefficientWeight::Legendre,
                Weight::Chebyshev => CoefficientWeight::Chebyshev,
            },
            ..QuadratureSpec::default()
        },
        ..EmbedConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn read_block(path: &Path) -> CliResult<DenseBlock64> {
    read_embedding(&mut open(path)?).map_err(|e| match e {
        csemb::Error::Parse { msg, .. } => CliError::input(format!("{}: {msg}", path.display())),
        other => other.into(),
    })
}

/// Writer that hashes everything passing through it.
struct Hashing<W> {
    inner: W,
    hasher: Sha256,
}

impl<W: Write> Write for Hashing<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.hasher.update(&buf[..n]);
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

/// Writes a binary embedding and returns the sha256 of the file.
fn write_binary(path: &Path, block: &DenseBlock64) -> CliResult<String> {
    let mut out = Hashing {
        inner: create(path)?,
        hasher: Sha256::new(),
    };
    write_embedding(&mut out, block)?;
    out.flush().map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(out.hasher.finalize()))
}

fn write_csv(path: &Path, block: &DenseBlock64) -> CliResult<()> {
    let mut out = create(path)?;
    write_embedding_csv(&mut out, block, None)?;
    out.flush().map_err(|e| CliError::io(path, e))
}

/// Prints a report to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
}

fn absolute(path: &Path) -> PathBuf {
    std::path::absolute(path).unwrap_or_else(|_| path.to_path_buf())
}

#[derive(Serialize)]
struct CoefficientDigest {
    stage_order: usize,
    stages: usize,
    sha256: String,
}

#[derive(Serialize)]
struct EmbedMetadata<'a> {
    tool: &'static str,
    version: &'static str,
    args: &'a EmbedArgs,
    function: String,
    matrix: MatrixSummary,
    n_rows: usize,
    dim: usize,
    norm: Option<NormEstimate>,
    scale: f64,
    spmv_count: u64,
    wall_time_secs: f64,
    coefficients: CoefficientDigest,
    output_sha256: String,
    output_col_sha256: Option<String>,
}

#[derive(Deserialize)]
struct RecordedRun {
    args: EmbedArgs,
}

pub fn embed(args: &EmbedArgs) -> CliResult<()> {
    let start = Instant::now();
    let poly = &args.poly;
    let f = SpectralFunction64::parse(&poly.function)?;
    let mut cfg = config(poly.order, poly.cascade, poly.dim.unwrap_or(1), poly.seed, poly.weight)?;
    let prepared = prepare(&args.input, &cfg)?;
    let n = prepared.matrix.n_rows();
    cfg.dim = poly.dim.unwrap_or_else(|| default_dimension(n));
    cfg.validate()?;

    let dilation = args.input.matrix == MatrixKind::Dilation;
    let applied = if dilation {
        dilation_function(&f, cfg.cascade)
    } else {
        f.clone()
    };
    let plan = plan_cascade(&applied, &cfg)?;
    let mut hasher = Sha256::new();
    for c in plan.stage.coeffs() {
        hasher.update(c.to_le_bytes());
    }

    let (primary, secondary, stats) = match &prepared.general {
        Some(a) => {
            let g = fast_embed_general(a, &f, &cfg)?;
            let stats = g.rows.provenance.stats.clone();
            (g.rows.data, Some(g.cols.data), stats)
        }
        None => {
            let omega = sample_projection(n, cfg.dim, cfg.seed);
            let e = fast_embed_cascaded(&prepared.matrix, &f, &cfg, &omega)?;
            (e.data, None, e.provenance.stats)
        }
    };
    if args.output_col.is_some() && secondary.is_none() {
        return Err(CliError::usage("--output-col only applies to --matrix dilation"));
    }
    let output_sha256 = write_binary(&args.output, &primary)?;
    let output_col_sha256 = match (&args.output_col, &secondary) {
        (Some(path), Some(block)) => Some(write_binary(path, block)?),
        _ => None,
    };
    if let Some(path) = &args.output_csv {
        write_csv(path, &primary)?;
    }

    let mut recorded = args.clone();
    recorded.poly.dim = Some(cfg.dim);
    recorded.input.input = recorded.input.input.as_deref().map(absolute);
    recorded.output = absolute(&args.output);
    recorded.output_col = args.output_col.as_deref().map(absolute);
    recorded.output_csv = args.output_csv.as_deref().map(absolute);
    let meta_path = args
        .metadata
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.json", args.output.display())));
    recorded.metadata = Some(absolute(&meta_path));
    let meta = EmbedMetadata {
        tool: "csemb",
        version: env!("CARGO_PKG_VERSION"),
        args: &recorded,
        function: applied.to_string(),
        matrix: prepared.summary(args.input.matrix),
        n_rows: primary.n_rows(),
        dim: cfg.dim,
        norm: prepared.norm,
        scale: prepared.scale,
        spmv_count: stats.spmv_count,
        wall_time_secs: start.elapsed().as_secs_f64(),
        coefficients: CoefficientDigest {
            stage_order: cfg.stage_order(),
            stages: cfg.cascade,
            sha256: hex::encode(hasher.finalize()),
        },
        output_sha256,
        output_col_sha256,
    };
    write_text(&meta_path, &serde_json::to_string_pretty(&meta)?)?;
    log::info!(
        "wrote {} x {} embedding to {} ({} products, {:.3} s)",
        primary.n_rows(),
        cfg.dim,
        args.output.display(),
        stats.spmv_count,
        meta.wall_time_secs
    );
    Ok(())
}

pub fn replay(args: &ReplayArgs) -> CliResult<()> {
    let text = std::fs::read_to_string(&args.metadata).map_err(|e| CliError::io(&args.metadata, e))?;
    let mut run: RecordedRun = serde_json::from_str(&text)?;
    if let Some(out) = &args.output {
        run.args.output = out.clone();
        run.args.metadata = Some(PathBuf::from(format!("{}.json", out.display())));
        run.args.output_csv = None;
        run.args.output_col = None;
    }
    embed(&run.args)
}

/// Exact rows of `f(S)`; for a dilation, the block belonging to the rows of `A`.
fn exact_rows(input: &crate::args::InputArgs, function: &str, seed: u64) -> CliResult<(DenseBlock64, Vec<(f64, f64)>)> {
    let f = SpectralFunction64::parse(function)?;
    let cfg = EmbedConfig {
        seed,
        ..EmbedConfig::default()
    };
    let prepared = prepare(input, &cfg)?;
    let applied = if prepared.general.is_some() {
        f.odd_extension()
    } else {
        f
    };
    let exact = exact_embedding(&prepared.matrix.to_dense_block(), &applied)?;
    let spectrum = exact
        .eigenvalues
        .iter()
        .copied()
        .zip(exact.weights.iter().copied())
        .collect();
    let rows = match &prepared.general {
        Some(a) => exact.rows().slice_rows(a.n_cols(), a.n_cols() + a.n_rows()),
        None => exact.function_matrix,
    };
    Ok((rows, spectrum))
}

pub fn exact(args: &ExactArgs) -> CliResult<()> {
    let (rows, spectrum) = exact_rows(&args.input, &args.function, args.seed)?;
    write_binary(&args.output, &rows)?;
    if let Some(path) = &args.spectrum {
        let mut text = String::from("eigenvalue,f\n");
        for (l, w) in spectrum {
            text.push_str(&format!("{l},{w}\n"));
        }
        write_text(path, &text)?;
    }
    Ok(())
}

pub fn eval(args: &EvalArgs) -> CliResult<()> {
    if args.exact.is_none() && args.input.input.is_none() {
        return Err(CliError::usage(
            "an exact embedding is required: pass --exact FILE or --input with --function",
        ));
    }
    let approx = read_block(&args.approx)?;
    let exact = match (&args.exact, &args.input.input) {
        (Some(path), _) => read_block(path)?,
        (None, _) => {
            let function = args
                .function
                .as_deref()
                .ok_or_else(|| CliError::usage("--function is required to compute the exact embedding"))?;
            exact_rows(&args.input, function, args.seed)?.0
        }
    };
    if exact.n_rows() != approx.n_rows() {
        return Err(CliError::input(format!(
            "exact embedding has {} rows, approximate has {}",
            exact.n_rows(),
            approx.n_rows()
        )));
    }
    let report = distortion_percentiles(&exact, &approx, args.pairs, args.seed, ReportMode::CalibrationCurve)?;
    if let Some(path) = &args.percentiles_csv {
        write_text(path, &report.percentiles_csv())?;
    }
    if let Some(path) = &args.calibration_csv {
        write_text(path, &report.calibration_csv())?;
    }
    let json = report.to_json();
    if let Some(path) = &args.json {
        write_text(path, &json)?;
    }
    emit(&json);
    Ok(())
}

#[derive(Serialize)]
struct ClusterSummary<'a> {
    n_vertices: usize,
    n_edges: usize,
    dim: usize,
    #[serde(flatten)]
    experiment: &'a ExperimentSummary,
}

pub fn cluster(args: &ClusterArgs) -> CliResult<()> {
    let graph = load_graph(&args.input, args.vertices)?;
    let n = graph.n_vertices();
    let x = match (&args.embedding, &args.function) {
        (Some(path), _) => {
            let x = read_block(path)?;
            if x.n_rows() != n {
                return Err(CliError::input(format!(
                    "embedding has {} rows, graph has {n} vertices",
                    x.n_rows()
                )));
            }
            x
        }
        (None, Some(function)) => {
            let f = SpectralFunction64::parse(function)?;
            let dim = args.dim.unwrap_or_else(|| default_dimension(n));
            let cfg = config(args.order, args.cascade, dim, args.seed, Weight::Legendre)?;
            let omega = sample_projection(n, dim, args.seed);
            fast_embed_cascaded(&graph.normalized_adjacency(), &f, &cfg, &omega)?.data
        }
        (None, None) => {
            return Err(CliError::usage(
                "pass --embedding FILE or --function to embed the graph",
            ))
        }
    };
    let summary = cluster_embedding(&x, &graph, args.k, args.runs, args.max_iters, args.seed)?;
    if let Some(path) = &args.labels {
        let mut text = String::from("vertex_id,cluster_id\n");
        for (v, c) in summary.median_labels.iter().enumerate() {
            text.push_str(&format!("{v},{c}\n"));
        }
        write_text(path, &text)?;
    }
    let json = serde_json::to_string_pretty(&ClusterSummary {
        n_vertices: n,
        n_edges: graph.n_edges(),
        dim: x.n_cols(),
        experiment: &summary,
    })?;
    if let Some(path) = &args.summary {
        write_text(path, &json)?;
    }
    emit(&json);
    Ok(())
}

#[derive(Serialize)]
struct NormReport {
    n: usize,
    nnz: usize,
    #[serde(flatten)]
    estimate: NormEstimate,
}

pub fn norm(args: &NormArgs) -> CliResult<()> {
    let mut input = args.input.clone();
    input.rescale = Rescale::Never;
    input.scale = None;
    let cfg = EmbedConfig {
        seed: args.seed,
        ..EmbedConfig::default()
    };
    let prepared = prepare(&input, &cfg)?;
    let estimate = csemb::embed::estimate_spectral_norm(&prepared.matrix, &cfg)?;
    let json = serde_json::to_string_pretty(&NormReport {
        n: prepared.matrix.n_rows(),
        nnz: prepared.matrix.nnz(),
        estimate,
    })?;
    match &args.output {
        Some(path) => write_text(path, &json),
        None => {
            emit(&json);
            Ok(())
        }
    }
}
