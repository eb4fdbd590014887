use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::poly::QuadratureSpec;

/// Parameters of one embedding run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbedConfig {
    /// Total polynomial order `L` (number of sparse products per column).
    pub order: usize,
    /// Cascade factor `b`; each of the `b` stages uses order `L / b`.
    pub cascade: usize,
    /// Embedding dimension `d`.
    pub dim: usize,
    pub seed: u64,
    /// Target pairwise distortion for the JL bound.
    pub epsilon: f64,
    /// Failure exponent for the JL bound.
    pub beta: f64,
    /// Power iterations per starting vector in norm estimation.
    pub norm_iters: usize,
    /// Starting vectors for norm estimation are `ceil(factor * ln n)`.
    pub norm_vectors_factor: f64,
    /// Multiplier applied to the largest Rayleigh quotient.
    pub norm_safety: f64,
    pub quadrature: QuadratureSpec,
}

impl EmbedConfig {
    pub fn new(order: usize, cascade: usize, dim: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            order,
            cascade,
            dim,
            seed,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 {
            return Err(invalid("polynomial order must be at least 1"));
        }
        if self.cascade == 0 || !self.order.is_multiple_of(self.cascade) {
            return Err(Error::CascadeNotDivisor {
                order: self.order,
                factor: self.cascade,
            });
        }
        if self.dim == 0 {
            return Err(invalid("embedding dimension must be at least 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(invalid(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if !(self.beta > 0.0) {
            return Err(invalid(format!("beta must be positive, got {}", self.beta)));
        }
        if self.norm_iters == 0 || !(self.norm_vectors_factor > 0.0) || !(self.norm_safety >= 1.0) {
            return Err(invalid("norm estimation needs iters >= 1, factor > 0 and safety >= 1"));
        }
        if self.quadrature.nodes_per_panel == 0 {
            return Err(invalid("quadrature needs at least one node per panel"));
        }
        Ok(())
    }

    /// Order of each cascade stage, `L / b`.
    pub fn stage_order(&self) -> usize {
        self.order / self.cascade
    }
}

impl Default for EmbedConfig {
    fn default() -> Self {
        Self {
            order: 180,
            cascade: 2,
            dim: 80,
            seed: 0,
            epsilon: 0.5,
            beta: 1.0,
            norm_iters: 20,
            norm_vectors_factor: 6.0,
            norm_safety: 1.01,
            quadrature: QuadratureSpec::default(),
        }
    }
}

/// Smallest `d` with `d > (4 + 2 beta) ln n / (eps^2 / 2 - eps^3 / 3)`.
pub fn jl_dimension(n: usize, epsilon: f64, beta: f64) -> Result<usize> {
    if n < 2 {
        return Err(invalid("JL dimension needs at least two points"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if !(beta > 0.0) {
        return Err(invalid(format!("beta must be positive, got {beta}")));
    }
    let bound = (4.0 + 2.0 * beta) * (n as f64).ln() / (epsilon * epsilon / 2.0 - epsilon.powi(3) / 3.0);
    Ok(bound.floor() as usize + 1)
}

/// `ceil(6 ln n)`, the practical operating point; at least 1.
pub fn default_dimension(n: usize) -> usize {
    ((6.0 * (n.max(1) as f64).ln()).ceil() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jl_bound_arithmetic() {
        assert_eq!(jl_dimension(100, 0.5, 2.0).unwrap(), 443);
        assert!(jl_dimension(1_000_000, 0.5, 1.0).unwrap() > jl_dimension(1_000, 0.5, 1.0).unwrap());
        assert!(jl_dimension(1, 0.5, 1.0).is_err());
        assert!(jl_dimension(10, 1.0, 1.0).is_err());
        assert!(jl_dimension(10, 0.5, 0.0).is_err());
    }

    #[test]
    fn practical_dimension_sits_far_below_the_bound() {
        // the 6 ln n operating point on a 317080-vertex graph is 77 (runs used d = 80)
        let n = 317_080;
        assert_eq!(default_dimension(n), 77);
        let bound = jl_dimension(n, 0.5, 1.0).unwrap();
        assert!(bound > 80 * 10, "bound {bound}");
    }

    #[test]
    fn config_validation() {
        assert!(EmbedConfig::new(180, 2, 80, 1).is_ok());
        assert!(matches!(
            EmbedConfig::new(180, 7, 80, 1),
            Err(Error::CascadeNotDivisor { order: 180, factor: 7 })
        ));
        assert!(EmbedConfig::new(0, 1, 80, 1).is_err());
        assert!(EmbedConfig::new(10, 1, 0, 1).is_err());
        let cfg = EmbedConfig {
            epsilon: 1.5,
            ..EmbedConfig::default()
        };
        assert!(cfg.validate().is_err());
        assert_eq!(EmbedConfig::default().stage_order(), 90);
    }
}
