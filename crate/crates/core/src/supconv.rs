//! Minimal admissible sup-convolutions and the inequality checks built on
//! them.
//!
//! Throughout this module a `MeanSpec` carries the positive exponent `p`;
//! the pointwise constraint on `h` uses the negated mean, `h(x+y) ≥
//! M_{-p,λ}(f(x), g(y))`. The minimal admissible `h*` is computed by full
//! enumeration over `supp(f) × supp(g)`, aggregated by sum point, which is
//! exact and keeps memory linear in the output support.

use crate::functions::{FunctionError, Point, SparseFunction};
use crate::geometry::{non_degenerate, GeometryError, NonDegeneracy};
use crate::means::{p_mean, p_mean_rational, MeanSpec};
use crate::rational::{serde_ratio, to_f64, Rational};
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SupconvError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("operation requires nonempty functions")]
    EmptyFunction,
    #[error("masses must match exactly (got {f} and {g})")]
    MassMismatch { f: String, g: String },
    #[error("exponent must satisfy 0 < p < 1/d, got p={p} with d={d}")]
    ExponentOutOfRange { p: f64, d: usize },
    #[error("beta sequence is not nonincreasing")]
    BetasNotSorted,
    #[error("beta sequence entries must be positive")]
    BetaNotPositive,
    #[error("beta sequence must sum to one exactly, got {0}")]
    BetasWrongSum(String),
    #[error("first {n} betas carry mass {mass}, exceeding 1 - alpha = {cap}")]
    BetaMassCapViolated { n: usize, mass: String, cap: String },
    #[error("{name} out of range: {value}")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The pointwise-smallest `h` with `h(x+y) ≥ M_{-p,λ}(f(x), g(y))` for all
/// `x, y`: each sum point receives the largest mean over its decompositions.
/// Support equals `supp(f) + supp(g)` (positive values never produce a zero
/// mean).
pub fn min_admissible_h(
    f: &SparseFunction,
    g: &SparseFunction,
    spec: &MeanSpec,
) -> Result<SparseFunction, SupconvError> {
    if f.dim() != g.dim() {
        return Err(SupconvError::DimensionMismatch(f.dim(), g.dim()));
    }
    if f.is_empty() || g.is_empty() {
        return Err(SupconvError::EmptyFunction);
    }
    let neg = spec.negated();
    let mut h = SparseFunction::new(f.dim())?;
    for (x, fx) in f.iter() {
        for (y, gy) in g.iter() {
            let z: Point = x.iter().zip(y).map(|(a, b)| a + b).collect();
            let m = p_mean_rational(&neg, fx, gy);
            if m.is_positive() {
                h.raise_to(z, m);
            }
        }
    }
    Ok(h)
}

/// A witness that `h` fails the pointwise constraint at some pair.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityViolation {
    pub x: Point,
    pub y: Point,
    pub required: Rational,
    pub actual: Rational,
}

/// Exhaustively checks `h(x+y) ≥ M_{-p,λ}(f(x), g(y))`, returning the first
/// violating pair if any.
pub fn admissibility_violation(
    h: &SparseFunction,
    f: &SparseFunction,
    g: &SparseFunction,
    spec: &MeanSpec,
) -> Result<Option<AdmissibilityViolation>, SupconvError> {
    if f.dim() != g.dim() || f.dim() != h.dim() {
        return Err(SupconvError::DimensionMismatch(f.dim(), g.dim().max(h.dim())));
    }
    let neg = spec.negated();
    for (x, fx) in f.iter() {
        for (y, gy) in g.iter() {
            let required = p_mean_rational(&neg, fx, gy);
            let z: Point = x.iter().zip(y).map(|(a, b)| a + b).collect();
            let actual = h.value(&z).cloned().unwrap_or_else(Rational::zero);
            if actual < required {
                return Ok(Some(AdmissibilityViolation {
                    x: x.clone(),
                    y: y.clone(),
                    required,
                    actual,
                }));
            }
        }
    }
    Ok(None)
}

/// The unconditional lower bound on a sup-convolution: returns
/// `(Σ h*, M_{-p,λ}(Σf, Σg))`. Callers assert the first is at least the
/// second; no hyperplane condition is involved. Works in any dimension.
pub fn check_functional_bm(
    f: &SparseFunction,
    g: &SparseFunction,
    spec: &MeanSpec,
) -> Result<(f64, f64), SupconvError> {
    let h = min_admissible_h(f, g, spec)?;
    let lhs = to_f64(&h.mass());
    let rhs = p_mean(&spec.negated(), to_f64(&f.mass()), to_f64(&g.mass()));
    Ok((lhs, rhs))
}

/// Convexity bound for a nonincreasing probability sequence: returns
/// `(Σ_i M_{-p,1/2}(c, β_i), α · M_{-p,1/2}(cn/(1-α), 1))`. Callers assert
/// `lhs ≥ rhs`. Preconditions are validated exactly in rational arithmetic
/// and reported distinctly.
pub fn beta_convex_check(
    betas: &[Rational],
    c: f64,
    n: usize,
    alpha: &Rational,
    p: f64,
) -> Result<(f64, f64), SupconvError> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(SupconvError::ParameterOutOfRange { name: "p", value: p });
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(SupconvError::ParameterOutOfRange { name: "c", value: c });
    }
    if n == 0 {
        return Err(SupconvError::ParameterOutOfRange { name: "n", value: 0.0 });
    }
    if !(alpha > &Rational::zero() && alpha < &Rational::one()) {
        return Err(SupconvError::ParameterOutOfRange {
            name: "alpha",
            value: to_f64(alpha),
        });
    }
    if betas.iter().any(|b| !b.is_positive()) {
        return Err(SupconvError::BetaNotPositive);
    }
    if betas.windows(2).any(|w| w[0] < w[1]) {
        return Err(SupconvError::BetasNotSorted);
    }
    let total: Rational = betas.iter().sum();
    if !total.is_one() {
        return Err(SupconvError::BetasWrongSum(total.to_string()));
    }
    let head: Rational = betas.iter().take(n).sum();
    let cap = Rational::one() - alpha;
    if head > cap {
        return Err(SupconvError::BetaMassCapViolated {
            n,
            mass: head.to_string(),
            cap: cap.to_string(),
        });
    }
    let mean = MeanSpec::new(-p, 0.5).expect("p positive and finite");
    let lhs: f64 = betas.iter().map(|b| p_mean(&mean, c, to_f64(b))).sum();
    let alpha_f = to_f64(alpha);
    let rhs = alpha_f * p_mean(&mean, c * n as f64 / (1.0 - alpha_f), 1.0);
    Ok((lhs, rhs))
}

/// Verdict of a verification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    HypothesisNotMet,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail => write!(f, "fail"),
            Verdict::HypothesisNotMet => write!(f, "hypothesis-not-met"),
        }
    }
}

/// Result of the main sup-convolution verification: masses, the asserted
/// lower bound `(2^d - ε)·Σf`, the margin, and the hyperplane scan that
/// gates the verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    #[serde(with = "serde_ratio")]
    pub sum_f: Rational,
    #[serde(with = "serde_ratio")]
    pub sum_g: Rational,
    #[serde(with = "serde_ratio")]
    pub sum_h: Rational,
    /// `(2^d - ε)·Σf`.
    pub bound: f64,
    /// `Σh - bound`.
    pub margin: f64,
    pub nondegeneracy: NonDegeneracy,
    /// `pass` iff `margin ≥ 0` when the hyperplane hypothesis held;
    /// `hypothesis-not-met` otherwise regardless of the margin.
    pub verdict: Verdict,
}

/// Runs the hyperplane scan on `f`, computes the minimal admissible `h`, and
/// compares `Σh` against `(2^d - ε)·Σf`. The scan covers all primitive
/// directions with coefficients up to `direction_bound`; the inequality is
/// only asserted (verdict pass/fail) when the scan held, otherwise the
/// verdict is `hypothesis-not-met`.
pub fn verify_main_theorem(
    f: &SparseFunction,
    g: &SparseFunction,
    spec: &MeanSpec,
    epsilon: f64,
    n: usize,
    direction_bound: i64,
) -> Result<VerificationReport, SupconvError> {
    let d = f.dim();
    if !(spec.p() > 0.0 && spec.p() < 1.0 / d as f64) {
        return Err(SupconvError::ExponentOutOfRange { p: spec.p(), d });
    }
    let sum_f = f.mass();
    let sum_g = g.mass();
    if sum_f != sum_g {
        return Err(SupconvError::MassMismatch {
            f: sum_f.to_string(),
            g: sum_g.to_string(),
        });
    }
    let nondegeneracy = non_degenerate(f, spec.p(), n, direction_bound)?;
    let h = min_admissible_h(f, g, spec)?;
    let sum_h = h.mass();
    let bound = (2f64.powi(d as i32) - epsilon) * to_f64(&sum_f);
    let margin = to_f64(&sum_h) - bound;
    let verdict = if !nondegeneracy.ok {
        Verdict::HypothesisNotMet
    } else if margin >= 0.0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(VerificationReport {
        sum_f,
        sum_g,
        sum_h,
        bound,
        margin,
        nondegeneracy,
        verdict,
    })
}
