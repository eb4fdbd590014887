use std::fmt::Write as _;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sparse::DenseBlock;
use crate::synth::pair_from_index;

pub const REPORTED_PERCENTILES: [u32; 7] = [1, 5, 25, 50, 75, 95, 99];
pub const DEFAULT_PAIR_SAMPLE: usize = 100_000;
pub const CALIBRATION_BIN_WIDTH: f64 = 0.1;

/// Cosine similarity between two rows; zero rows give 0 and set the flag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Correlation {
    pub value: f64,
    pub zero_row: bool,
}

pub fn normalized_correlation(x: &DenseBlock<f64>, i: usize, j: usize) -> Correlation {
    cosine(x.row(i), x.row(j))
}

fn cosine(a: &[f64], b: &[f64]) -> Correlation {
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Correlation {
            value: 0.0,
            zero_row: true,
        };
    }
    // normalize first so that rescaling a row cannot change the result
    let value = a.iter().zip(b).map(|(u, v)| (u / na) * (v / nb)).sum::<f64>();
    Correlation {
        value: value.clamp(-1.0, 1.0),
        zero_row: false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportMode {
    DeviationVsExact,
    CalibrationCurve,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PercentileValue {
    pub percentile: u32,
    pub value: f64,
}

/// Percentiles of the approximate correlation among pairs whose exact
/// correlation falls within half a bin width of `center`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationBin {
    pub center: f64,
    pub count: usize,
    pub percentiles: Vec<PercentileValue>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistortionReport {
    pub mode: ReportMode,
    pub pair_sample_size: usize,
    pub zero_row_pairs: usize,
    /// Percentiles of `approx - exact` over all sampled pairs.
    pub percentiles: Vec<PercentileValue>,
    pub calibration: Vec<CalibrationBin>,
    #[serde(skip)]
    pub deviations: Vec<f64>,
}

impl DistortionReport {
    pub fn percentile(&self, p: u32) -> Option<f64> {
        self.percentiles.iter().find(|v| v.percentile == p).map(|v| v.value)
    }

    /// Share of sampled deviations with absolute value at most `bound`.
    pub fn fraction_within(&self, bound: f64) -> f64 {
        if self.deviations.is_empty() {
            return 1.0;
        }
        let hits = self.deviations.iter().filter(|d| d.abs() <= bound).count();
        hits as f64 / self.deviations.len() as f64
    }

    pub fn bin(&self, center: f64) -> Option<&CalibrationBin> {
        self.calibration
            .iter()
            .find(|b| (b.center - center).abs() < CALIBRATION_BIN_WIDTH / 4.0)
    }

    pub fn percentiles_csv(&self) -> String {
        let mut out = String::from("percentile,value\n");
        for p in &self.percentiles {
            let _ = writeln!(out, "{},{}", p.percentile, p.value);
        }
        out
    }

    pub fn calibration_csv(&self) -> String {
        let mut out = String::from("bin_center");
        for p in REPORTED_PERCENTILES {
            let _ = write!(out, ",p{p}");
        }
        out.push_str(",count\n");
        for bin in &self.calibration {
            let _ = write!(out, "{:.1}", bin.center);
            for p in &bin.percentiles {
                let _ = write!(out, ",{}", p.value);
            }
            let _ = writeln!(out, ",{}", bin.count);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Linear-interpolation percentile of sorted data.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let pos = p / 100.0 * (n - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            let t = pos - lo as f64;
            sorted[lo] + t * (sorted[hi] - sorted[lo])
        }
    }
}

fn seven(sorted: &[f64]) -> Vec<PercentileValue> {
    REPORTED_PERCENTILES
        .iter()
        .map(|&p| PercentileValue {
            percentile: p,
            value: percentile(sorted, p as f64),
        })
        .collect()
}

/// Compares row correlations of `approx` against those of `exact` over a
/// seeded uniform sample of distinct vertex pairs. `n_pairs = None` uses
/// `min(100000, n(n-1)/2)`.
pub fn distortion_percentiles(
    exact: &DenseBlock<f64>,
    approx: &DenseBlock<f64>,
    n_pairs: Option<usize>,
    seed: u64,
    mode: ReportMode,
) -> Result<DistortionReport> {
    let n = exact.n_rows();
    if approx.n_rows() != n {
        return Err(Error::DimensionMismatch {
            op: "distortion_percentiles",
            expected: n,
            found: approx.n_rows(),
        });
    }
    let total = n * n.saturating_sub(1) / 2;
    let want = n_pairs.unwrap_or(DEFAULT_PAIR_SAMPLE).min(total);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = sample(&mut rng, total, want).into_vec();
    picks.sort_unstable();

    let mut zero_row_pairs = 0;
    let mut pairs = Vec::with_capacity(want);
    for p in picks {
        let (i, j) = pair_from_index(n, p);
        let e = normalized_correlation(exact, i, j);
        let a = normalized_correlation(approx, i, j);
        if e.zero_row || a.zero_row {
            zero_row_pairs += 1;
        }
        pairs.push((e.value, a.value));
    }

    let mut deviations: Vec<f64> = pairs.iter().map(|(e, a)| a - e).collect();
    let mut sorted = deviations.clone();
    sorted.sort_by(f64::total_cmp);

    let calibration = if mode == ReportMode::CalibrationCurve {
        calibration_bins(&pairs)
    } else {
        Vec::new()
    };
    deviations.shrink_to_fit();
    Ok(DistortionReport {
        mode,
        pair_sample_size: want,
        zero_row_pairs,
        percentiles: seven(&sorted),
        calibration,
        deviations,
    })
}

fn calibration_bins(pairs: &[(f64, f64)]) -> Vec<CalibrationBin> {
    let bins = (2.0 / CALIBRATION_BIN_WIDTH).round() as i64;
    let mut buckets = vec![Vec::new(); bins as usize + 1];
    for &(e, a) in pairs {
        let k = (e / CALIBRATION_BIN_WIDTH).round() as i64 + bins / 2;
        buckets[k.clamp(0, bins) as usize].push(a);
    }
    buckets
        .into_iter()
        .enumerate()
        .filter(|(_, b)| !b.is_empty())
        .map(|(k, mut b)| {
            b.sort_by(f64::total_cmp);
            CalibrationBin {
                center: (k as i64 - bins / 2) as f64 * CALIBRATION_BIN_WIDTH,
                count: b.len(),
                percentiles: seven(&b),
            }
        })
        .collect()
}
