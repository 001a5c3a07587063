//! Weighted two-point power means.
//!
//! `M_{p,λ}(a, b)` for nonnegative `a, b`, weight `λ ∈ (0,1)`, and a finite
//! real exponent `p`:
//!
//! ```text
//! M_{p,λ}(a, b) = (λ a^p + (1-λ) b^p)^(1/p)   if p ≠ 0 and ab ≠ 0
//!              = 0                             if ab = 0 (every p)
//!              = a^λ b^(1-λ)                   if p = 0 and ab ≠ 0
//! ```
//!
//! The `ab = 0` branch dominates the `p = 0` branch; the two agree there, so
//! the function is total on the nonnegative quadrant. Floating evaluation
//! carries a 1e-12 relative-error contract; `p ∈ {-1, 0, 1}` admits an exact
//! rational path wherever the algebra stays rational.

use crate::rational::{from_f64, to_f64, Rational};
use num::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MeanError {
    #[error("lambda must lie strictly between 0 and 1, got {0}")]
    InvalidLambda(f64),
    #[error("exponent must be finite, got {0}")]
    InvalidExponent(f64),
    #[error("{name} must be positive, got {value}")]
    NonpositiveInput { name: &'static str, value: f64 },
}

/// Exponent and weight of a two-point mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSpec {
    p: f64,
    lambda: f64,
}

impl MeanSpec {
    pub fn new(p: f64, lambda: f64) -> Result<Self, MeanError> {
        if !p.is_finite() {
            return Err(MeanError::InvalidExponent(p));
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(MeanError::InvalidLambda(lambda));
        }
        Ok(MeanSpec { p, lambda })
    }

    /// Equal-weight mean with the given exponent.
    pub fn symmetric(p: f64) -> Result<Self, MeanError> {
        MeanSpec::new(p, 0.5)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The spec for `M_{-p,λ}`, the mean actually applied inside
    /// sup-convolution constraints.
    pub fn negated(&self) -> MeanSpec {
        MeanSpec {
            p: -self.p,
            lambda: self.lambda,
        }
    }
}

/// `M_{p,λ}(a, b)` in floating point. Total on `a, b ≥ 0`.
pub fn p_mean(spec: &MeanSpec, a: f64, b: f64) -> f64 {
    assert!(a >= 0.0 && b >= 0.0, "p_mean requires nonnegative inputs");
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    let lambda = spec.lambda;
    if spec.p == 0.0 {
        return a.powf(lambda) * b.powf(1.0 - lambda);
    }
    if a == b {
        return a;
    }
    // Factor out the max so the powered terms stay in (0, 1].
    let m = a.max(b);
    let base = lambda * (a / m).powf(spec.p) + (1.0 - lambda) * (b / m).powf(spec.p);
    m * base.powf(1.0 / spec.p)
}

/// `M_{p,λ}(a, b)` on rationals.
///
/// Exact for `p = 1` (arithmetic) and `p = -1` (harmonic) with the dyadic
/// weight of `spec`, for equal arguments (idempotence), and for a zero
/// argument. Everything else is the exact dyadic image of the `f64`
/// evaluation, inheriting its 1e-12 relative contract.
pub fn p_mean_rational(spec: &MeanSpec, a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() || b.is_zero() {
        return Rational::zero();
    }
    if a == b {
        return a.clone();
    }
    let lambda = from_f64(spec.lambda);
    if spec.p == 1.0 {
        let one_minus = from_f64(1.0 - spec.lambda);
        return &lambda * a + &one_minus * b;
    }
    if spec.p == -1.0 {
        let one_minus = from_f64(1.0 - spec.lambda);
        // (λ/a + (1-λ)/b)^-1 = ab / (λb + (1-λ)a)
        return a * b / (&lambda * b + &one_minus * a);
    }
    from_f64(p_mean(spec, to_f64(a), to_f64(b)))
}

/// Both sides of the derivative bound for the curve `t ↦ M_{-p,λ}(t, T(t))`.
///
/// `spec.p` is the positive exponent of the negated mean: the curve carries
/// `M_{-p,λ}` while the bound is `1 / M_{p,λ}(1, 1/T')`. Returns
/// `(d/dt M_{-p,λ}(t, T(t)), 1 / M_{p,λ}(1, 1/T'))` at the given point,
/// treating `T` locally as the line of slope `t_prime` through `(t, t_value)`.
/// Callers assert `lhs ≥ rhs`; both sides are returned so harnesses can log
/// margins.
pub fn mean_curve_derivative_bound(
    spec: &MeanSpec,
    t: f64,
    t_value: f64,
    t_prime: f64,
) -> Result<(f64, f64), MeanError> {
    if spec.p <= 0.0 {
        return Err(MeanError::InvalidExponent(spec.p));
    }
    for (name, value) in [("t", t), ("T(t)", t_value), ("T'(t)", t_prime)] {
        if value <= 0.0 {
            return Err(MeanError::NonpositiveInput { name, value });
        }
    }
    let p = spec.p;
    let lambda = spec.lambda;
    // M_{-p,λ}(t, T) = φ^(-1/p) with φ = λ t^-p + (1-λ) T^-p, so
    // dM/dt = (λ t^(-p-1) + (1-λ) T^(-p-1) T') · φ^(-(1+p)/p).
    let phi = lambda * t.powf(-p) + (1.0 - lambda) * t_value.powf(-p);
    let numer = lambda * t.powf(-p - 1.0) + (1.0 - lambda) * t_value.powf(-p - 1.0) * t_prime;
    let lhs = numer * phi.powf(-(1.0 + p) / p);
    let rhs = 1.0 / p_mean(spec, 1.0, 1.0 / t_prime);
    Ok((lhs, rhs))
}
