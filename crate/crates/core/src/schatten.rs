//! Singular values and Schatten p-norms.

use crate::antilinear::AntilinearOperator;
use crate::error::{Error, Result};
use crate::matcore::{self, ComplexMatrix};

/// A Schatten exponent `p` in `(1, inf]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchattenP(f64);

impl SchattenP {
    pub const OPERATOR: SchattenP = SchattenP(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p <= 1.0 {
            return Err(Error::InvalidP(p));
        }
        Ok(Self(p))
    }

    /// Restricts to `1 < p < inf`.
    pub fn finite(p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::InvalidP(p));
        }
        Self::new(p)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// The conjugate exponent `q = p / (p - 1)`.
    pub fn conjugate(self) -> f64 {
        if self.is_infinite() {
            1.0
        } else {
            self.0 / (self.0 - 1.0)
        }
    }
}

/// Singular values `s_n(A)`, the eigenvalues of `|A|`, in descending order.
///
/// For `A(x) = M conj(x)` these coincide with the singular values of `M`.
pub fn singular_values(a: &AntilinearOperator) -> Vec<f64> {
    matcore::singular_values(a.matrix())
}

/// `(sum s^p)^(1/p)`, scaled by the largest value to avoid overflow.
pub fn norm_of_values(values: &[f64], p: SchattenP) -> f64 {
    let max = values.iter().fold(0.0f64, |m, &s| m.max(s.abs()));
    if max == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return max;
    }
    let sum: f64 = values.iter().map(|s| (s.abs() / max).powf(p.0)).sum();
    max * sum.powf(1.0 / p.0)
}

pub fn schatten_norm(a: &AntilinearOperator, p: SchattenP) -> f64 {
    norm_of_values(&singular_values(a), p)
}

/// Schatten norm of a linear operator.
pub fn schatten_norm_linear(m: &ComplexMatrix, p: SchattenP) -> f64 {
    norm_of_values(&matcore::singular_values(m), p)
}

/// Number of singular values strictly above `tol * s_max`.
pub fn numerical_rank(a: &AntilinearOperator, tol: f64) -> usize {
    rank_of_values(&singular_values(a), tol)
}

pub fn rank_of_values(values: &[f64], tol: f64) -> usize {
    let max = values.iter().fold(0.0f64, |m, &s| m.max(s));
    if max == 0.0 {
        return 0;
    }
    values.iter().filter(|&&s| s > tol * max).count()
}
