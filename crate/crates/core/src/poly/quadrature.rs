//! Composite Gauss-Legendre quadrature and the Legendre projection built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::function::SpectralFunction;
use super::legendre::{recursion_coefficients, LegendreExpansion};

/// Nodes per panel used unless a [`QuadratureSpec`] says otherwise.
pub const DEFAULT_NODES_PER_PANEL: usize = 64;

/// Polynomial degree one panel is asked to resolve; panels over `[-1, 1]` are
/// added until `panels * DEGREE_PER_PANEL` covers the integrand degree.
const DEGREE_PER_PANEL: usize = 24;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientWeight {
    /// Least squares under the uniform weight on `[-1, 1]`.
    #[default]
    Legendre,
    /// Least squares under `1/sqrt(1 - x^2)`: the Chebyshev-truncated series,
    /// re-expressed in the Legendre basis so the same recursion applies.
    Chebyshev,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes_per_panel: usize,
    pub weight: CoefficientWeight,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            nodes_per_panel: DEFAULT_NODES_PER_PANEL,
            weight: CoefficientWeight::Legendre,
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton iteration on `p(m, x)`).
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "quadrature needs at least one node");
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let mf = m as f64;
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
        let mut deriv = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            deriv = mf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / deriv;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

/// Panels covering `[-1, 1]`, split at `breaks` and refined so each has width at most
/// `2 / ceil(degree / DEGREE_PER_PANEL)`.
fn panels(breaks: &[f64], degree: usize) -> Vec<(f64, f64)> {
    let target = 2.0 / degree.div_ceil(DEGREE_PER_PANEL).max(1) as f64;
    let mut edges = vec![-1.0];
    edges.extend(breaks.iter().copied().filter(|&b| b > -1.0 && b < 1.0));
    edges.push(1.0);
    edges.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    edges.dedup();
    let mut out = Vec::new();
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let pieces = ((b - a) / target).ceil().max(1.0) as usize;
        let h = (b - a) / pieces as f64;
        out.extend((0..pieces).map(|k| {
            let lo = a + k as f64 * h;
            let hi = if k + 1 == pieces { b } else { lo + h };
            (lo, hi)
        }));
    }
    out
}

/// Quadrature nodes and weights in `T` for an integrand of roughly `degree`
/// that may be non-smooth at `breaks`.
fn composite_rule<T: Scalar>(breaks: &[T], degree: usize, nodes_per_panel: usize) -> Vec<(T, T)> {
    let (gx, gw) = gauss_legendre(nodes_per_panel);
    let breaks: Vec<f64> = breaks.iter().map(|b| b.as_f64()).collect();
    panels(&breaks, degree)
        .into_iter()
        .flat_map(|(a, b)| {
            let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
            gx.iter()
                .zip(&gw)
                .map(move |(&x, &w)| (T::of(mid + half * x), T::of(half * w)))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// `int_{-1}^{1} g(x) dx` by composite Gauss-Legendre.
pub fn integrate<T: Scalar>(g: impl Fn(T) -> T, breaks: &[T], degree: usize, nodes_per_panel: usize) -> T {
    composite_rule(breaks, degree, nodes_per_panel)
        .into_iter()
        .map(|(x, w)| w * g(x))
        .sum()
}

/// `a(r) = (r + 1/2) int p(r, x) f(x) dx` for `r = 0..=order`.
pub fn legendre_coefficients<T: Scalar>(
    f: &SpectralFunction<T>,
    order: usize,
    quadrature: &QuadratureSpec,
) -> Result<LegendreExpansion<T>> {
    let breaks = f.breakpoints();
    match quadrature.weight {
        CoefficientWeight::Legendre => project(
            |x| f.eval(x),
            order,
            &breaks,
            quadrature.nodes_per_panel,
            &f.to_string(),
        ),
        CoefficientWeight::Chebyshev => {
            let cheb = chebyshev_coefficients(f, order)?;
            let series = |x: T| {
                let (mut t0, mut t1) = (T::one(), x);
                let mut acc = cheb[0];
                for (k, &c) in cheb.iter().enumerate().skip(1) {
                    if k > 1 {
                        let t2 = T::of(2.0) * x * t1 - t0;
                        t0 = t1;
                        t1 = t2;
                    }
                    acc = acc + c * t1;
                }
                acc
            };
            project(series, order, &[], quadrature.nodes_per_panel, &f.to_string())
        }
    }
}

fn project<T: Scalar>(
    g: impl Fn(T) -> T,
    order: usize,
    breaks: &[T],
    nodes_per_panel: usize,
    name: &str,
) -> Result<LegendreExpansion<T>> {
    let rule = composite_rule(breaks, order + 2 * DEGREE_PER_PANEL, nodes_per_panel);
    let mut acc = vec![T::zero(); order + 1];
    for (x, w) in rule {
        let fx = g(x);
        if !fx.is_finite() {
            return Err(Error::InvalidFunction {
                spec: name.to_string(),
                reason: format!("non-finite value at quadrature node {x}"),
            });
        }
        let wf = w * fx;
        let (mut prev, mut cur) = (T::zero(), T::one());
        acc[0] = acc[0] + wf;
        for (r, slot) in acc.iter_mut().enumerate().skip(1) {
            let (alpha, beta) = recursion_coefficients::<T>(r);
            let next = alpha * x * cur - beta * prev;
            prev = cur;
            cur = next;
            *slot = *slot + wf * cur;
        }
    }
    let coeffs = acc
        .into_iter()
        .enumerate()
        .map(|(r, s)| s * T::of(r as f64 + 0.5))
        .collect();
    LegendreExpansion::new(coeffs)
}

/// Chebyshev series coefficients by Gauss-Chebyshev quadrature.
fn chebyshev_coefficients<T: Scalar>(f: &SpectralFunction<T>, order: usize) -> Result<Vec<T>> {
    let n = (8 * (order + 1)).max(1024);
    let thetas: Vec<f64> = (0..n)
        .map(|j| std::f64::consts::PI * (j as f64 + 0.5) / n as f64)
        .collect();
    let values: Vec<f64> = thetas.iter().map(|t| f.eval(T::of(t.cos())).as_f64()).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidFunction {
            spec: f.to_string(),
            reason: "non-finite value at a Chebyshev node".into(),
        });
    }
    Ok((0..=order)
        .map(|k| {
            let s: f64 = thetas.iter().zip(&values).map(|(t, v)| v * (k as f64 * t).cos()).sum();
            let c = 2.0 * s / n as f64;
            T::of(if k == 0 { c / 2.0 } else { c })
        })
        .collect())
}
