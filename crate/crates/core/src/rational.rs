//! Exact rational arithmetic helpers shared by every module.
//!
//! All masses, function values, thresholds, and hyperplane fractions are
//! `BigRational`. Quantities that are irrational by nature (fractional
//! powers) are computed in `f64` and, where they must live inside a
//! rational-valued container, stored as the exact dyadic rational of that
//! `f64`. This keeps sums and comparisons exact relative to the floating
//! approximation actually computed.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{BigRational, FromPrimitive, ToPrimitive, Zero};
use std::fmt;

/// The workspace-wide exact number type.
pub type Rational = BigRational;

/// `n/d` as a reduced rational. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

/// An integer as a rational.
pub fn rat_int(n: i64) -> Rational {
    Ratio::from_integer(BigInt::from(n))
}

/// Nearest `f64` to a rational.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().expect("rational magnitude exceeds f64 range")
}

/// The exact dyadic rational equal to a finite `f64`.
pub fn from_f64(x: f64) -> Rational {
    BigRational::from_f64(x).expect("non-finite value has no rational representation")
}

/// `q` rendered as `num/den` (or just `num` when integral).
pub fn format_ratio(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRatioError(String);

impl fmt::Display for ParseRatioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational literal: {}", self.0)
    }
}

impl std::error::Error for ParseRatioError {}

/// Parses `"3"`, `"-3"`, or `"1/4"` into an exact rational.
pub fn parse_ratio(s: &str) -> Result<Rational, ParseRatioError> {
    let s = s.trim();
    let bad = || ParseRatioError(s.to_string());
    match s.split_once('/') {
        Some((num, den)) => {
            let n: BigInt = num.trim().parse().map_err(|_| bad())?;
            let d: BigInt = den.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Ratio::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Ratio::from_integer(n))
        }
    }
}

/// Serde adapter storing a rational as a `"num/den"` string, immune to
/// integer-width and decimal-rounding loss.
pub mod serde_ratio {
    use super::{parse_ratio, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format!("{}/{}", q.numer(), q.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(de)?;
        parse_ratio(&s).map_err(D::Error::custom)
    }
}
