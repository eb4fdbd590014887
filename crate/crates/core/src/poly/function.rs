//! Declarative weighting functions `f(lambda)`.
//!
//! Base shapes (indicator, commute time, identity, constant, polynomial,
//! tabulated) compose with odd/even extension, pointwise `b`-th roots and an
//! affine change of variable. Composition is a small expression tree, so the
//! quadrature can ask any function where it is non-smooth.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default clip for the commute-time pole at `x = 1`.
pub const DEFAULT_COMMUTE_CLIP: f64 = 1e-3;

/// Points used when checking that a function is non-negative before an even root.
const SIGN_CHECK_GRID: usize = 10_001;

/// `t(x) = scale * x + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap<T> {
    pub scale: T,
    pub offset: T,
}

impl<T: Scalar> AffineMap<T> {
    pub fn new(scale: T, offset: T) -> Self {
        Self { scale, offset }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero())
    }

    pub fn apply(&self, x: T) -> T {
        x * self.scale + self.offset
    }

    pub fn invert(&self, y: T) -> T {
        (y - self.offset) / self.scale
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpectralFunction<T> {
    /// `1{x >= c}`
    IndicatorAbove(T),
    /// `1 / sqrt(1 - min(x, 1 - clip))`
    CommuteTime {
        clip: T,
    },
    Identity,
    Constant(T),
    /// Monomial coefficients, lowest degree first.
    Polynomial(Vec<T>),
    /// Piecewise-linear interpolation through `(xs, ys)`, constant outside the table.
    Tabulated {
        xs: Vec<T>,
        ys: Vec<T>,
    },
    /// `f(x) 1{x >= 0} - f(-x) 1{x < 0}`
    OddExtension(Box<SpectralFunction<T>>),
    /// `f(|x|)`
    EvenExtension(Box<SpectralFunction<T>>),
    /// Sign-preserving pointwise root `f^{1/power}`.
    Root {
        inner: Box<SpectralFunction<T>>,
        power: u32,
    },
    /// `f(t(x))`
    Remapped {
        inner: Box<SpectralFunction<T>>,
        map: AffineMap<T>,
    },
}

fn bad(spec: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::InvalidFunction {
        spec: spec.into(),
        reason: reason.into(),
    }
}

impl<T: Scalar> SpectralFunction<T> {
    pub fn indicator_above(c: T) -> Result<Self> {
        if !(c >= -T::one() && c <= T::one()) {
            return Err(bad(format!("indicator:{c}"), "threshold must lie in [-1, 1]"));
        }
        Ok(Self::IndicatorAbove(c))
    }

    pub fn commute_time(clip: T) -> Result<Self> {
        if !(clip > T::zero() && clip < T::one()) {
            return Err(bad(format!("commute:{clip}"), "clip must lie in (0, 1)"));
        }
        Ok(Self::CommuteTime { clip })
    }

    pub fn constant(c: T) -> Result<Self> {
        if !c.is_finite() {
            return Err(bad(format!("const:{c}"), "constant must be finite"));
        }
        Ok(Self::Constant(c))
    }

    pub fn polynomial(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(bad("poly", "needs at least one finite coefficient"));
        }
        Ok(Self::Polynomial(coeffs))
    }

    pub fn tabulated(xs: Vec<T>, ys: Vec<T>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(bad("table", "needs at least two (x, y) pairs of equal length"));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(bad("table", "x values must be strictly increasing"));
        }
        if xs[0] < -T::one() || xs[xs.len() - 1] > T::one() {
            return Err(bad("table", "x values must lie in [-1, 1]"));
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return Err(bad("table", "y values must be finite"));
        }
        Ok(Self::Tabulated { xs, ys })
    }

    /// `f'(x) = f(x) 1{x >= 0} - f(-x) 1{x < 0}`; only the values of `f` on `[0, 1]` matter.
    pub fn odd_extension(self) -> Self {
        match self {
            Self::Identity => Self::Identity,
            f => Self::OddExtension(Box::new(f)),
        }
    }

    /// `f(|x|)`
    pub fn even_extension(self) -> Self {
        Self::EvenExtension(Box::new(self))
    }

    /// Pointwise `b`-th root. Even roots require `f >= 0` on `[-1, 1]`, checked on a
    /// fine grid plus the function's breakpoints.
    pub fn root(self, power: u32) -> Result<Self> {
        if power == 0 {
            return Err(bad(self.to_string(), "root power must be at least 1"));
        }
        if power == 1 {
            return Ok(self);
        }
        if power.is_multiple_of(2) {
            if let Some(x) = self
                .sample_points(SIGN_CHECK_GRID)
                .into_iter()
                .find(|&x| self.eval(x) < T::zero())
            {
                return Err(bad(
                    self.to_string(),
                    format!("even root of a function that is negative at x = {x}"),
                ));
            }
        }
        Ok(match self {
            f @ Self::IndicatorAbove(_) => f,
            Self::Constant(c) => Self::Constant(signed_root(c, power)),
            f => Self::Root {
                inner: Box::new(f),
                power,
            },
        })
    }

    /// `f(t(x))`, the form a function takes after the matrix spectrum is rescaled by `t^{-1}`.
    pub fn remapped(self, map: AffineMap<T>) -> Self {
        Self::Remapped {
            inner: Box::new(self),
            map,
        }
    }

    pub fn eval(&self, x: T) -> T {
        match self {
            Self::IndicatorAbove(c) => {
                if x >= *c {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Self::CommuteTime { clip } => T::one() / (T::one() - x.min(T::one() - *clip)).sqrt(),
            Self::Identity => x,
            Self::Constant(c) => *c,
            Self::Polynomial(coeffs) => coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c),
            Self::Tabulated { xs, ys } => interpolate(xs, ys, x),
            Self::OddExtension(f) => {
                if x >= T::zero() {
                    f.eval(x)
                } else {
                    -f.eval(-x)
                }
            }
            Self::EvenExtension(f) => f.eval(x.abs()),
            Self::Root { inner, power } => signed_root(inner.eval(x), *power),
            Self::Remapped { inner, map } => inner.eval(map.apply(x)),
        }
    }

    /// Points in `(-1, 1)` where the function may be discontinuous or non-smooth,
    /// sorted and deduplicated. Commute-time functions also list a geometric grading
    /// toward the clip point, where the integrand is steep.
    pub fn breakpoints(&self) -> Vec<T> {
        let mut pts = Vec::new();
        self.collect_breakpoints(&mut pts);
        let one = T::one();
        pts.retain(|&x| x > -one && x < one);
        pts.sort_by(|a, b| a.partial_cmp(b).expect("breakpoints are finite"));
        pts.dedup();
        pts
    }

    fn collect_breakpoints(&self, out: &mut Vec<T>) {
        match self {
            Self::IndicatorAbove(c) => out.push(*c),
            Self::CommuteTime { clip } => {
                let mut gap = *clip;
                while T::one() - gap > -T::one() {
                    out.push(T::one() - gap);
                    gap = gap * T::of(2.0);
                }
            }
            Self::Identity | Self::Constant(_) | Self::Polynomial(_) => {}
            Self::Tabulated { xs, .. } => out.extend_from_slice(xs),
            Self::OddExtension(f) | Self::EvenExtension(f) => {
                let mut inner = Vec::new();
                f.collect_breakpoints(&mut inner);
                out.push(T::zero());
                for b in inner.into_iter().filter(|&b| b > T::zero()) {
                    out.push(b);
                    out.push(-b);
                }
            }
            Self::Root { inner, .. } => inner.collect_breakpoints(out),
            Self::Remapped { inner, map } => {
                let mut inner_pts = Vec::new();
                inner.collect_breakpoints(&mut inner_pts);
                out.extend(inner_pts.into_iter().map(|y| map.invert(y)));
            }
        }
    }

    /// Uniform grid of `n` points on `[-1, 1]` plus every breakpoint and its
    /// neighbors at distance `1e-9`.
    pub fn sample_points(&self, n: usize) -> Vec<T> {
        let n = n.max(2);
        let mut pts: Vec<T> = (0..n).map(|k| T::of(-1.0 + 2.0 * k as f64 / (n - 1) as f64)).collect();
        let eps = T::of(1e-9);
        for b in self.breakpoints() {
            pts.extend([b - eps, b, b + eps]);
        }
        pts.retain(|x| x.abs() <= T::one());
        pts.sort_by(|a, b| a.partial_cmp(b).expect("grid points are finite"));
        pts.dedup();
        pts
    }

    /// Parses the command-line grammar: `indicator:C`, `commute[:CLIP]`, `identity`,
    /// `const:C`, `poly:C0,C1,...` or `table:PATH` (two-column `x,y` CSV).
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, arg) = match spec.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (spec.trim(), None),
        };
        let number = |s: Option<&str>| -> Result<T> {
            let s = s.ok_or_else(|| bad(spec, format!("'{kind}' needs a numeric argument")))?;
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(T::of)
                .ok_or_else(|| bad(spec, format!("invalid number '{s}'")))
        };
        match kind {
            "indicator" => Self::indicator_above(number(arg)?),
            "commute" => match arg {
                None => Self::commute_time(T::of(DEFAULT_COMMUTE_CLIP)),
                a => Self::commute_time(number(a)?),
            },
            "identity" if arg.is_none() => Ok(Self::Identity),
            "const" => Self::constant(number(arg)?),
            "poly" => {
                let list = arg.ok_or_else(|| bad(spec, "'poly' needs coefficients"))?;
                let coeffs = list
                    .split(',')
                    .map(|c| number(Some(c.trim())))
                    .collect::<Result<Vec<T>>>()?;
                Self::polynomial(coeffs)
            }
            "table" => {
                let path = arg.ok_or_else(|| bad(spec, "'table' needs a file path"))?;
                Self::read_table(Path::new(path)).map_err(|e| match e {
                    Error::InvalidFunction { reason, .. } => bad(spec, reason),
                    other => bad(spec, other.to_string()),
                })
            }
            _ => Err(bad(
                spec,
                "unknown kind; valid kinds are indicator:C, commute[:CLIP], identity, const:C, poly:C0,C1,..., table:PATH",
            )),
        }
    }

    fn read_table(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parsed: Option<(f64, f64)> = line
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse().ok()?, b.trim().parse().ok()?)));
            let (x, y) =
                parsed.ok_or_else(|| bad(path.display().to_string(), format!("line {}: expected 'x,y'", k + 1)))?;
            xs.push(T::of(x));
            ys.push(T::of(y));
        }
        Self::tabulated(xs, ys)
    }
}

fn signed_root<T: Scalar>(v: T, power: u32) -> T {
    if power == 1 {
        return v;
    }
    let r = v.abs().powf(T::one() / T::of(power as f64));
    if v < T::zero() {
        -r
    } else {
        r
    }
}

fn interpolate<T: Scalar>(xs: &[T], ys: &[T], x: T) -> T {
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let k = xs.partition_point(|&v| v <= x);
    let (x0, x1, y0, y1) = (xs[k - 1], xs[k], ys[k - 1], ys[k]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

impl<T: Scalar> fmt::Display for SpectralFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::IndicatorAbove(c) => write!(f, "indicator:{c}"),
            Self::CommuteTime { clip } => write!(f, "commute:{clip}"),
            Self::Identity => write!(f, "identity"),
            Self::Constant(c) => write!(f, "const:{c}"),
            Self::Polynomial(cs) => {
                write!(f, "poly:")?;
                for (k, c) in cs.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            Self::Tabulated { xs, .. } => write!(f, "table[{} points]", xs.len()),
            Self::OddExtension(g) => write!(f, "odd({g})"),
            Self::EvenExtension(g) => write!(f, "even({g})"),
            Self::Root { inner, power } => write!(f, "root{power}({inner})"),
            Self::Remapped { inner, map } => write!(f, "{inner}@({}x{:+})", map.scale, map.offset),
        }
    }
}
