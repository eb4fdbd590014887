use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

use super::function::SpectralFunction;
use super::legendre::LegendreExpansion;
use super::quadrature::{integrate, DEFAULT_NODES_PER_PANEL};

/// Uniform grid size used for sup-norm estimates unless the caller overrides it.
pub const DEFAULT_REPORT_GRID: usize = 10_001;

/// Approximation quality of an expansion against its target function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximationReport {
    /// `max |f - f_L|` over the evaluation grid.
    pub delta_sup: f64,
    /// `1/2 int_{-1}^{1} |f - f_L|^2 dx`.
    pub delta_l2: f64,
    /// Number of grid points actually evaluated (uniform grid plus breakpoint neighbors).
    pub grid_size: usize,
}

/// Sup error over a uniform grid of `grid_size` points plus `+-1` and the
/// neighbors of every breakpoint of `f`. The squared error is integrated with
/// composite Gauss-Legendre split at the same breakpoints.
pub fn approximation_report<T: Scalar>(
    f: &SpectralFunction<T>,
    e: &LegendreExpansion<T>,
    grid_size: usize,
) -> ApproximationReport {
    let grid = f.sample_points(grid_size);
    let delta_sup = grid
        .iter()
        .map(|&x| (f.eval(x) - e.eval_unchecked(x)).abs().as_f64())
        .fold(0.0, f64::max);
    let sq = integrate(
        |x: T| {
            let r = f.eval(x) - e.eval_unchecked(x);
            r * r
        },
        &f.breakpoints(),
        2 * e.order() + 48,
        DEFAULT_NODES_PER_PANEL,
    );
    ApproximationReport {
        delta_sup,
        delta_l2: 0.5 * sq.as_f64(),
        grid_size: grid.len(),
    }
}
