//! Rational functions of γ and their ordering in the left-neighbourhood
//! of 1.
//!
//! Two rational functions compare Equal exactly when their cross-multiplied
//! numerators are identical polynomials. Otherwise the difference τ is
//! written (1-γ)^c1 η̄ / (1-γ)^c2 δ̄ with η̄(1), δ̄(1) nonzero, and the
//! order is decided by the sign of η̄(1)·δ̄(1). Just left of 1 this agrees
//! with pointwise comparison, which is what makes symbolic planners track
//! the γ→1 behaviour without ever picking a discount factor.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::poly::Polynomial;
use crate::rational::{parse_rational, sign, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MuOrdering {
    Less,
    Equal,
    Greater,
}

impl fmt::Display for MuOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MuOrdering::Less => write!(f, "Less"),
            MuOrdering::Equal => write!(f, "Equal"),
            MuOrdering::Greater => write!(f, "Greater"),
        }
    }
}

/// num/den with den nonzero. Canonical form: the common power of (1-γ) is
/// cancelled, den is a primitive integer polynomial with positive leading
/// coefficient, and num carries the remaining scale. No other factors are
/// cancelled; μ-comparison never needs them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        let mut rf = RationalFunction { num, den };
        rf.canonicalize();
        rf
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_polynomial(Polynomial::zero())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_polynomial(Polynomial::constant(c))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.den = Polynomial::one();
            return;
        }
        // cancel the common (1-γ) power
        let (ns, nm) = self.num.strip_one_minus_gamma();
        let (ds, dm) = self.den.strip_one_minus_gamma();
        let common = nm.min(dm);
        if common > 0 {
            let one_minus = Polynomial::from_i64(&[1, -1]);
            self.num = if nm == common {
                ns
            } else {
                &ns * &one_minus.pow((nm - common) as u32)
            };
            self.den = if dm == common {
                ds
            } else {
                &ds * &one_minus.pow((dm - common) as u32)
            };
        }
        // scale so den is primitive integer with positive leading coefficient
        let mut lcm = BigInt::one();
        for c in self.den.coeffs() {
            lcm = lcm.lcm(c.denom());
        }
        let mut gcd = BigInt::zero();
        for c in self.den.coeffs() {
            gcd = gcd.gcd(&(c.numer() * (&lcm / c.denom())));
        }
        let mut factor = Rational::new(lcm, gcd);
        if self.den.leading().map(|c| c.is_negative()).unwrap_or(false) {
            factor = -factor;
        }
        if !factor.is_one() {
            self.num = self.num.scale(&factor);
            self.den = self.den.scale(&factor);
        }
    }

    /// Exact value at x, or None when the denominator vanishes there.
    pub fn eval(&self, x: &Rational) -> Option<Rational> {
        let d = self.den.eval(x);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(x) / d)
    }

    /// Sign of r(γ) throughout some left-neighbourhood of 1; 0 iff r ≐ 0.
    pub fn sign_near_one(&self) -> i8 {
        if self.num.is_zero() {
            return 0;
        }
        let (eta, _) = self.num.strip_one_minus_gamma();
        let (delta, _) = self.den.strip_one_minus_gamma();
        sign(&eta.eval_at_one()) * sign(&delta.eval_at_one())
    }

    /// Total μ-order: Equal iff the cross-multiplied numerators agree as
    /// polynomials, else Greater/Less by the sign of the difference near 1.
    pub fn mu_compare(&self, other: &RationalFunction) -> MuOrdering {
        match (self - other).sign_near_one() {
            0 => MuOrdering::Equal,
            1 => MuOrdering::Greater,
            _ => MuOrdering::Less,
        }
    }

    pub fn mu_max<'a>(
        mut items: impl Iterator<Item = (&'a RationalFunction, usize)>,
    ) -> Option<(&'a RationalFunction, usize)> {
        let mut best = items.next()?;
        for (rf, tag) in items {
            if rf.mu_compare(best.0) == MuOrdering::Greater {
                best = (rf, tag);
            }
        }
        Some(best)
    }

    /// lim γ→1 of the function, or None when the limit is infinite.
    pub fn limit_at_one(&self) -> Option<Rational> {
        if self.num.is_zero() {
            return Some(Rational::zero());
        }
        let (eta, c1) = self.num.strip_one_minus_gamma();
        let (delta, c2) = self.den.strip_one_minus_gamma();
        match c1.cmp(&c2) {
            std::cmp::Ordering::Less => None,
            std::cmp::Ordering::Greater => Some(Rational::zero()),
            std::cmp::Ordering::Equal => Some(eta.eval_at_one() / delta.eval_at_one()),
        }
    }

    /// lim x→0 of the function, or None when the limit is infinite.
    pub fn limit_at_zero(&self) -> Option<Rational> {
        if self.num.is_zero() {
            return Some(Rational::zero());
        }
        let (n, c1) = self.num.strip_gamma();
        let (d, c2) = self.den.strip_gamma();
        match c1.cmp(&c2) {
            std::cmp::Ordering::Less => None,
            std::cmp::Ordering::Greater => Some(Rational::zero()),
            std::cmp::Ordering::Equal => Some(n.coeff(0) / d.coeff(0)),
        }
    }

    /// JSON form: {"num": [coeff strings ascending], "den": [...]}.
    pub fn to_json(&self) -> Value {
        let ser = |p: &Polynomial| -> Value {
            Value::Array(
                p.coeffs()
                    .iter()
                    .map(|c| Value::String(crate::rational::format_rational(c)))
                    .collect(),
            )
        };
        json!({ "num": ser(&self.num), "den": ser(&self.den) })
    }

    pub fn from_json(v: &Value) -> Result<Self, String> {
        let poly = |v: &Value, key: &str| -> Result<Polynomial, String> {
            let arr = v
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| format!("missing coefficient array `{key}`"))?;
            let mut coeffs = Vec::with_capacity(arr.len());
            for c in arr {
                coeffs.push(parse_coeff(c)?);
            }
            Ok(Polynomial::from_coeffs(coeffs))
        };
        let num = poly(v, "num")?;
        let den = poly(v, "den")?;
        if den.is_zero() {
            return Err("zero denominator polynomial".to_string());
        }
        Ok(RationalFunction::new(num, den))
    }
}

/// Accepts a rational string "p/q", a plain integer string, or a JSON
/// integer. Floats are rejected.
pub fn parse_coeff(v: &Value) -> Result<Rational, String> {
    match v {
        Value::String(s) => parse_rational(s).map_err(|e| e.to_string()),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(BigInt::from(i)))
            } else {
                Err(format!("float literal `{n}` rejected; use \"p/q\""))
            }
        }
        other => Err(format!("expected rational string or integer, got {other}")),
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(
            &(&self.num * &rhs.den) - &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Polynomial::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}
