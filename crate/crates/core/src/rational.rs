//! Exact rational scalars.
//!
//! Every probability, reward and polynomial coefficient in this crate is a
//! [`Rational`]: an arbitrary-precision integer pair kept in canonical form
//! (reduced, positive denominator). Floats never enter the pipeline.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational number in canonical form.
pub type Rational = BigRational;

/// Shorthand for an integer-valued [`Rational`].
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Sign of a rational as -1, 0 or +1.
pub fn sign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("float literals are rejected; write `{0}` as p/q")]
    Float(String),
}

/// Parses `"p"` or `"p/q"` with optional leading minus. Rejects anything
/// containing `.`, `e` or `E` so float spellings fail loudly.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if s.contains(['.', 'e', 'E']) {
        return Err(ParseRationalError::Float(s.to_string()));
    }
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num: BigInt = num_str
        .parse()
        .map_err(|_| ParseRationalError::Invalid(s.to_string()))?;
    let den: BigInt = match den_str {
        Some(d) => d
            .parse()
            .map_err(|_| ParseRationalError::Invalid(s.to_string()))?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(ParseRationalError::ZeroDenominator(s.to_string()));
    }
    Ok(Rational::new(num, den))
}

/// Formats as `"p"` when the denominator is 1, else `"p/q"`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `-log10(1 - gamma)` as f64, for reporting thresholds near 1.
///
/// Only used for display; all certification is exact.
pub fn log10_distance_from_one(gamma: &Rational) -> f64 {
    let gap = Rational::one() - gamma;
    if gap.is_zero() || gap.is_negative() {
        return f64::INFINITY;
    }
    // numer/denom may exceed f64 range individually; go through bit lengths
    let n = gap.numer().abs().to_string();
    let d = gap.denom().to_string();
    let digits = |s: &str| -> f64 {
        let lead: String = s.chars().take(15).collect();
        let lead_val: f64 = lead.parse().unwrap_or(1.0);
        lead_val.log10() + (s.len() - lead.len()) as f64
    };
    -(digits(&n) - digits(&d))
}
