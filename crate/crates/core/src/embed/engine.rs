use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::poly::{legendre_coefficients, LegendreExpansion, QuadratureSpec, SpectralFunction};
use crate::scalar::Scalar;
use crate::sparse::{dilate, DenseBlock, SparseMatrix};

use super::projection::sample_projection;
use super::EmbedConfig;

/// Elements per rayon task in the recursion's vector updates.
const UPDATE_CHUNK: usize = 4096;

/// Per-run audit data.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    /// Multi-vector sparse products performed.
    pub spmv_count: u64,
    /// `max |Q(r)|` after each recursion step, across all stages.
    pub max_abs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config: Option<EmbedConfig>,
    pub function: String,
    pub stats: RunStats,
}

/// Embedding rows (one per vertex) with optional external vertex ids.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix<T> {
    pub data: DenseBlock<T>,
    pub row_labels: Option<Vec<u64>>,
    pub provenance: Provenance,
}

impl<T: Scalar> EmbeddingMatrix<T> {
    pub fn n_rows(&self) -> usize {
        self.data.n_rows()
    }

    pub fn dim(&self) -> usize {
        self.data.n_cols()
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.data.row(i)
    }

    pub fn spmv_count(&self) -> u64 {
        self.provenance.stats.spmv_count
    }
}

/// `f_L(S) Omega` by the Legendre recursion
/// `Q(r) = (2 - 1/r) S Q(r-1) - (1 - 1/r) Q(r-2)`, accumulating `a(r) Q(r)`.
///
/// Exactly `order` multi-vector products. Every update is elementwise, so each
/// output column depends only on the matching column of `omega`.
pub fn apply_expansion<T: Scalar>(
    s: &SparseMatrix<T>,
    expansion: &LegendreExpansion<T>,
    omega: &DenseBlock<T>,
    stats: &mut RunStats,
) -> Result<DenseBlock<T>> {
    let n = s.n_rows();
    if n != s.n_cols() {
        return Err(invalid("the recursion needs a square (symmetric) matrix"));
    }
    if omega.n_rows() != n {
        return Err(Error::DimensionMismatch {
            op: "apply_expansion",
            expected: n,
            found: omega.n_rows(),
        });
    }
    let d = omega.n_cols();
    let coeffs = expansion.coeffs();
    let mut acc = omega.scaled(coeffs[0]);
    let mut q_prev = DenseBlock::zeros(n, d);
    let mut q_cur = omega.clone();
    let mut product = DenseBlock::zeros(n, d);

    for (r, &a) in coeffs.iter().enumerate().skip(1) {
        s.spmv_multi_into(&q_cur, &mut product)?;
        stats.spmv_count += 1;
        let inv = T::one() / T::of(r as f64);
        let (alpha, beta) = (T::of(2.0) - inv, T::one() - inv);
        // q_prev becomes Q(r) in place.
        let max_abs = q_prev
            .values_mut()
            .par_chunks_mut(UPDATE_CHUNK)
            .zip(product.values().par_chunks(UPDATE_CHUNK))
            .zip(acc.values_mut().par_chunks_mut(UPDATE_CHUNK))
            .map(|((q, p), e)| {
                let mut local = T::zero();
                for ((qv, &pv), ev) in q.iter_mut().zip(p).zip(e.iter_mut()) {
                    *qv = alpha * pv - beta * *qv;
                    *ev = *ev + a * *qv;
                    if !qv.is_finite() {
                        local = T::infinity();
                    } else {
                        local = local.max(qv.abs());
                    }
                }
                local
            })
            .reduce(T::zero, T::max);
        let max_abs = max_abs.as_f64();
        log::trace!("recursion step {r}: max |Q| = {max_abs:e}");
        if !max_abs.is_finite() || !acc.is_finite() {
            return Err(Error::NonFinite { step: r });
        }
        stats.max_abs.push(max_abs);
        std::mem::swap(&mut q_prev, &mut q_cur);
    }
    Ok(acc)
}

/// Runs the recursion for the order-`order` Legendre approximation of `f`.
pub fn fast_embed_eig<T: Scalar>(
    s: &SparseMatrix<T>,
    f: &SpectralFunction<T>,
    order: usize,
    omega: &DenseBlock<T>,
) -> Result<EmbeddingMatrix<T>> {
    let expansion = legendre_coefficients(f, order, &QuadratureSpec::default())?;
    let mut stats = RunStats::default();
    let data = apply_expansion(s, &expansion, omega, &mut stats)?;
    Ok(EmbeddingMatrix {
        data,
        row_labels: None,
        provenance: Provenance {
            config: None,
            function: f.to_string(),
            stats,
        },
    })
}

/// `b` repetitions of an order-`L/b` approximation of `f^{1/b}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CascadePlan<T> {
    pub stage: LegendreExpansion<T>,
    pub stages: usize,
}

impl<T: Scalar> CascadePlan<T> {
    /// The effective scalar filter `g_{L/b}(x)^b`, for `|x| <= 1`.
    pub fn eval(&self, x: T) -> Result<T> {
        Ok(self.stage.eval(x)?.powi(self.stages as i32))
    }
}

pub fn plan_cascade<T: Scalar>(f: &SpectralFunction<T>, cfg: &EmbedConfig) -> Result<CascadePlan<T>> {
    cfg.validate()?;
    let root = f.clone().root(cfg.cascade as u32)?;
    let stage = legendre_coefficients(&root, cfg.stage_order(), &cfg.quadrature)?;
    Ok(CascadePlan {
        stage,
        stages: cfg.cascade,
    })
}

/// `(g_{L/b}(S))^b Omega` with `g = f^{1/b}`; stage `i + 1` consumes the output of stage `i`.
pub fn fast_embed_cascaded<T: Scalar>(
    s: &SparseMatrix<T>,
    f: &SpectralFunction<T>,
    cfg: &EmbedConfig,
    omega: &DenseBlock<T>,
) -> Result<EmbeddingMatrix<T>> {
    let plan = plan_cascade(f, cfg)?;
    let mut stats = RunStats::default();
    let mut block = apply_expansion(s, &plan.stage, omega, &mut stats)?;
    for _ in 1..plan.stages {
        block = apply_expansion(s, &plan.stage, &block, &mut stats)?;
    }
    Ok(EmbeddingMatrix {
        data: block,
        row_labels: None,
        provenance: Provenance {
            config: Some(cfg.clone()),
            function: f.to_string(),
            stats,
        },
    })
}

/// Row and column embeddings of a rectangular matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralEmbedding<T> {
    /// One row per row of `A` (the last `m` rows of the dilation).
    pub rows: EmbeddingMatrix<T>,
    /// One row per column of `A` (the first `n` rows of the dilation).
    pub cols: EmbeddingMatrix<T>,
}

/// The function applied to a dilation: the odd extension of `f` for odd
/// `cascade`, the even extension `f(|x|)` otherwise.
pub fn dilation_function<T: Scalar>(f: &SpectralFunction<T>, cascade: usize) -> SpectralFunction<T> {
    if cascade % 2 == 1 {
        f.clone().odd_extension()
    } else {
        f.clone().even_extension()
    }
}

/// Embeds the rows and columns of `A` (`|A| <= 1`) through its dilation `[0 A^T; A 0]`.
///
/// `f` only needs to be defined on `[0, 1]`. With an odd cascade factor it is
/// extended oddly; with an even one the odd extension has no real `b`-th root, so
/// the even extension `f(|x|)` is used instead. Both yield the same pairwise
/// geometry for the row and column blocks.
pub fn fast_embed_general<T: Scalar>(
    a: &SparseMatrix<T>,
    f: &SpectralFunction<T>,
    cfg: &EmbedConfig,
) -> Result<GeneralEmbedding<T>> {
    cfg.validate()?;
    let (m, n) = (a.n_rows(), a.n_cols());
    let s = dilate(a)?;
    let omega = sample_projection(m + n, cfg.dim, cfg.seed);
    let all = fast_embed_cascaded(&s, &dilation_function(f, cfg.cascade), cfg, &omega)?;
    let split = |lo: usize, hi: usize| EmbeddingMatrix {
        data: all.data.slice_rows(lo, hi),
        row_labels: None,
        provenance: all.provenance.clone(),
    };
    Ok(GeneralEmbedding {
        cols: split(0, n),
        rows: split(n, n + m),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type F = SpectralFunction<f64>;

    fn omega(n: usize, d: usize) -> DenseBlock<f64> {
        sample_projection(n, d, 3)
    }

    #[test]
    fn identity_function_on_identity_matrix() {
        let s = SparseMatrix::<f64>::identity(5);
        let om = omega(5, 4);
        let e = fast_embed_eig(&s, &F::Identity, 1, &om).unwrap();
        for (a, b) in e.data.values().iter().zip(om.values()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(e.spmv_count(), 1);
    }

    #[test]
    fn square_on_symmetric_diagonal() {
        let s = SparseMatrix::from_diagonal(&[0.5, -0.5]);
        let om = omega(2, 6);
        let e = fast_embed_eig(&s, &F::Polynomial(vec![0.0, 0.0, 1.0]), 2, &om).unwrap();
        for (a, b) in e.data.values().iter().zip(om.values()) {
            assert!((a - 0.25 * b).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_order_zero() {
        let s = SparseMatrix::from_diagonal(&[0.1, 0.7, -0.3]);
        let om = omega(3, 2);
        let e = fast_embed_eig(&s, &F::Constant(-2.0), 0, &om).unwrap();
        let diff = e.data.sub(&om.scaled(-2.0)).unwrap();
        assert!(diff.max_abs() < 1e-14);
        assert_eq!(e.spmv_count(), 0);
    }

    #[test]
    fn cascade_with_single_stage_matches_plain_run() {
        let s = SparseMatrix::from_dense(3, 3, &[0.1, 0.4, 0.0, 0.4, -0.2, 0.3, 0.0, 0.3, 0.5]).unwrap();
        let om = omega(3, 5);
        let f = F::IndicatorAbove(0.2);
        let cfg = EmbedConfig::new(30, 1, 5, 3).unwrap();
        let a = fast_embed_cascaded(&s, &f, &cfg, &om).unwrap();
        let b = fast_embed_eig(&s, &f, 30, &om).unwrap();
        assert_eq!(a.data, b.data);
    }

    #[test]
    fn cascade_constant_on_identity() {
        let s = SparseMatrix::<f64>::identity(4);
        let om = omega(4, 3);
        let cfg = EmbedConfig::new(2, 2, 3, 0).unwrap();
        let e = fast_embed_cascaded(&s, &F::Constant(4.0), &cfg, &om).unwrap();
        for (a, b) in e.data.values().iter().zip(om.values()) {
            assert!((a - 4.0 * b).abs() < 1e-14);
        }
        assert_eq!(e.spmv_count(), 2);
    }

    #[test]
    fn blow_up_is_reported() {
        let s = SparseMatrix::from_diagonal(&[1e200, 1.0]);
        let om = omega(2, 2);
        let err = fast_embed_eig(&s, &F::IndicatorAbove(0.5), 8, &om).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }), "{err}");
    }

    #[test]
    fn dimension_mismatch() {
        let s = SparseMatrix::<f64>::identity(4);
        assert!(matches!(
            fast_embed_eig(&s, &F::Identity, 2, &omega(3, 2)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn general_zero_matrix() {
        let a = SparseMatrix::<f64>::zeros(3, 2);
        let cfg = EmbedConfig::new(4, 1, 6, 1).unwrap();
        let g = fast_embed_general(&a, &F::IndicatorAbove(0.5), &cfg).unwrap();
        assert_eq!((g.rows.n_rows(), g.cols.n_rows()), (3, 2));
        assert!(g
            .rows
            .data
            .values()
            .iter()
            .chain(g.cols.data.values())
            .all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn general_scalar_swaps_projection_rows() {
        let a = SparseMatrix::from_dense(1, 1, &[1.0]).unwrap();
        let cfg = EmbedConfig::new(1, 1, 8, 11).unwrap();
        let g = fast_embed_general(&a, &F::Identity, &cfg).unwrap();
        let om = sample_projection::<f64>(2, 8, 11);
        for j in 0..8 {
            assert!((g.cols.data.get(0, j) - om.get(1, j)).abs() < 1e-14);
            assert!((g.rows.data.get(0, j) - om.get(0, j)).abs() < 1e-14);
        }
    }
}
