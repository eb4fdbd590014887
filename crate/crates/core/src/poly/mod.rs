//! Spectral weighting functions and their Legendre expansions on `[-1, 1]`.

mod function;
mod legendre;
mod quadrature;
mod report;

pub use function::{AffineMap, SpectralFunction, DEFAULT_COMMUTE_CLIP};
pub use legendre::{expansion_eval, legendre_eval, LegendreExpansion};
pub use quadrature::{gauss_legendre, integrate, legendre_coefficients, CoefficientWeight, QuadratureSpec};
pub use report::{approximation_report, ApproximationReport, DEFAULT_REPORT_GRID};
