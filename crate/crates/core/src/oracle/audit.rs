use serde::Serialize;

use crate::embed::{fast_embed_cascaded, plan_cascade, sample_projection, EmbedConfig};
use crate::error::Result;
use crate::poly::SpectralFunction;
use crate::sparse::{DenseBlock, SparseMatrix};

use super::exact::exact_embedding;

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    /// `max_l |f(l) - f_approx(l)|` over the oracle spectrum.
    pub delta: f64,
    pub trials: usize,
    pub pairs_per_trial: usize,
    pub violations: usize,
}

impl AuditReport {
    pub fn violation_rate(&self) -> f64 {
        let total = self.trials * self.pairs_per_trial;
        if total == 0 {
            0.0
        } else {
            self.violations as f64 / total as f64
        }
    }
}

/// Checks, for every pair of rows and `trials` projections seeded
/// `cfg.seed, cfg.seed + 1, ...`, that
/// `sqrt(1-eps)(|u-v| - delta sqrt2) <= |g(u)-g(v)| <= sqrt(1+eps)(|u-v| + delta sqrt2)`
/// with `u, v` rows of the exact embedding and `delta` measured at the oracle
/// eigenvalues for the filter the engine actually applies.
pub fn theorem1_audit(
    s: &SparseMatrix<f64>,
    f: &SpectralFunction<f64>,
    cfg: &EmbedConfig,
    trials: usize,
) -> Result<AuditReport> {
    let exact = exact_embedding(&s.to_dense_block(), f)?;
    let plan = plan_cascade(f, cfg)?;
    let mut delta = 0.0f64;
    for (&l, &w) in exact.eigenvalues.iter().zip(&exact.weights) {
        delta = delta.max((w - plan.eval(l.clamp(-1.0, 1.0))?).abs());
    }
    let n = exact.n();
    let true_dist = pairwise_distances(exact.rows());
    let slack = delta * std::f64::consts::SQRT_2;
    let (lo, hi) = ((1.0 - cfg.epsilon).max(0.0).sqrt(), (1.0 + cfg.epsilon).sqrt());

    let mut violations = 0;
    for t in 0..trials {
        let seed = cfg.seed.wrapping_add(t as u64);
        let omega = sample_projection(n, cfg.dim, seed);
        let approx = fast_embed_cascaded(s, f, cfg, &omega)?;
        let got = pairwise_distances(&approx.data);
        violations += true_dist
            .iter()
            .zip(&got)
            .filter(|(&u, &g)| g < lo * (u - slack) || g > hi * (u + slack))
            .count();
    }
    Ok(AuditReport {
        delta,
        trials,
        pairs_per_trial: n * n.saturating_sub(1) / 2,
        violations,
    })
}

fn pairwise_distances(x: &DenseBlock<f64>) -> Vec<f64> {
    let n = x.n_rows();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let d2: f64 = x.row(i).iter().zip(x.row(j)).map(|(a, b)| (a - b).powi(2)).sum();
            out.push(d2.sqrt());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::rescale_spectrum;
    use crate::synth::random_sparse_symmetric;

    fn unit_matrix(n: usize, seed: u64) -> SparseMatrix<f64> {
        let s = random_sparse_symmetric(n, 0.2, seed).unwrap();
        let dense = s.to_dense_block();
        let e = exact_embedding(&dense, &SpectralFunction::Identity).unwrap();
        let top = e.eigenvalues[0].abs().max(e.eigenvalues[n - 1].abs());
        rescale_spectrum(&s, -top, top).unwrap().0
    }

    #[test]
    fn polynomial_filter_has_no_violations() {
        let s = unit_matrix(30, 1);
        let f = SpectralFunction::polynomial(vec![0.1, 0.6, 0.0, -0.3]).unwrap();
        let cfg = EmbedConfig {
            epsilon: 0.3,
            ..EmbedConfig::new(3, 1, 1500, 5).unwrap()
        };
        let r = theorem1_audit(&s, &f, &cfg, 3).unwrap();
        assert!(r.delta < 1e-10);
        assert!(r.violation_rate() <= 1.0 / 30.0);
    }

    #[test]
    fn tiny_dimension_with_tight_epsilon_violates() {
        let s = unit_matrix(30, 2);
        let f = SpectralFunction::polynomial(vec![0.0, 1.0]).unwrap();
        let cfg = EmbedConfig {
            epsilon: 0.01,
            ..EmbedConfig::new(1, 1, 2, 5).unwrap()
        };
        let r = theorem1_audit(&s, &f, &cfg, 2).unwrap();
        assert!(r.violation_rate() > 0.3);
    }
}
