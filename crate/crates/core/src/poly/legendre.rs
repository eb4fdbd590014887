use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::Scalar;

fn check_domain<T: Scalar>(x: T) -> Result<()> {
    if x.abs() > T::one() || x.is_nan() {
        return Err(invalid(format!("Legendre argument {x} outside [-1, 1]")));
    }
    Ok(())
}

/// Coefficients of the two-step Legendre recursion at order `r >= 1`:
/// `p(r) = alpha * x * p(r-1) - beta * p(r-2)`.
#[inline]
pub(crate) fn recursion_coefficients<T: Scalar>(r: usize) -> (T, T) {
    let inv = T::one() / T::of(r as f64);
    (T::of(2.0) - inv, T::one() - inv)
}

/// Legendre polynomial `p(r, x)` evaluated by the three-term recursion.
pub fn legendre_eval<T: Scalar>(r: usize, x: T) -> Result<T> {
    check_domain(x)?;
    Ok(legendre_unchecked(r, x))
}

pub(crate) fn legendre_unchecked<T: Scalar>(r: usize, x: T) -> T {
    let (mut prev, mut cur) = (T::zero(), T::one());
    for k in 1..=r {
        let (alpha, beta) = recursion_coefficients::<T>(k);
        let next = alpha * x * cur - beta * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Order-`L` expansion `sum_r a(r) p(r, x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LegendreExpansion<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> LegendreExpansion<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("an expansion needs at least one coefficient"));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(invalid("expansion coefficients must be finite"));
        }
        Ok(Self { coeffs })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Evaluates with the same forward recursion the matrix engine uses.
    pub fn eval(&self, x: T) -> Result<T> {
        check_domain(x)?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: T) -> T {
        let (mut prev, mut cur) = (T::zero(), T::one());
        let mut acc = self.coeffs[0] * cur;
        for (r, &a) in self.coeffs.iter().enumerate().skip(1) {
            let (alpha, beta) = recursion_coefficients::<T>(r);
            let next = alpha * x * cur - beta * prev;
            prev = cur;
            cur = next;
            acc = acc + a * cur;
        }
        acc
    }
}

pub fn expansion_eval<T: Scalar>(e: &LegendreExpansion<T>, x: T) -> Result<T> {
    e.eval(x)
}
