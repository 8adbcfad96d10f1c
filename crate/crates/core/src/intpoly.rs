//! Integer polynomials: the workhorse representation for fraction-free
//! elimination and Sturm chains, where rational coefficients would pay a
//! gcd on every addition.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::Polynomial;
use crate::rational::Rational;

/// Ascending coefficients, trailing coefficient nonzero, empty = zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub(crate) struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly {
            coeffs: vec![BigInt::one()],
        }
    }

    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map(Zero::is_zero).unwrap_or(false) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Clears denominators of a rational polynomial. The result is a
    /// primitive integer polynomial equal to the input up to a positive
    /// rational factor, so signs and roots are preserved.
    pub fn from_rational_poly(p: &Polynomial) -> Self {
        if p.is_zero() {
            return IntPoly::zero();
        }
        let mut lcm = BigInt::one();
        for c in p.coeffs() {
            lcm = lcm.lcm(c.denom());
        }
        let ints: Vec<BigInt> = p
            .coeffs()
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        IntPoly::from_coeffs(ints).primitive()
    }

    pub fn to_rational_poly(&self) -> Polynomial {
        Polynomial::from_coeffs(
            self.coeffs
                .iter()
                .map(|c| Rational::from_integer(c.clone()))
                .collect(),
        )
    }

    /// Gcd of coefficients (positive); 0 for the zero polynomial.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coeffs {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divides out the content; keeps the leading sign.
    pub fn primitive(&self) -> IntPoly {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| c / &g).collect(),
        }
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        let zero = BigInt::zero();
        for i in 0..n {
            let a = self.coeffs.get(i).unwrap_or(&zero);
            let b = rhs.coeffs.get(i).unwrap_or(&zero);
            out.push(a - b);
        }
        IntPoly::from_coeffs(out)
    }

    pub fn mul(&self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero();
        }
        IntPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Exact division in Z[x]; panics if the division does not come out
    /// exact (Bareiss guarantees it does).
    pub fn div_exact(&self, d: &IntPoly) -> IntPoly {
        assert!(!d.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return IntPoly::zero();
        }
        let dd = d.degree().unwrap();
        let lead = d.leading().unwrap();
        let mut rem = self.coeffs.clone();
        assert!(rem.len() > dd || self.is_zero(), "inexact division: degree");
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let (factor, r) = rem.last().unwrap().div_rem(lead);
            assert!(r.is_zero(), "inexact division: leading coefficient");
            if !factor.is_zero() {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    let t = dc * &factor;
                    rem[k + i] -= t;
                }
                quot[k] = factor;
            }
            debug_assert!(rem.last().unwrap().is_zero());
            rem.pop();
        }
        assert!(
            rem.iter().all(Zero::is_zero),
            "inexact division: nonzero remainder"
        );
        IntPoly::from_coeffs(quot)
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Sign of p(a/b) without building rationals: Horner on the homogenized
    /// form sum c_i a^i b^(d-i), whose sign equals sign(p(a/b)) since b > 0.
    pub fn sign_at(&self, x: &Rational) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let a = x.numer();
        let b = x.denom();
        let mut acc = self.coeffs.last().unwrap().clone();
        let mut b_pow = BigInt::one();
        for c in self.coeffs.iter().rev().skip(1) {
            b_pow *= b;
            acc = acc * a + c * &b_pow;
        }
        if acc.is_zero() {
            0
        } else if acc.is_positive() {
            1
        } else {
            -1
        }
    }

    /// Divides out (x - r) exactly for a rational root r; the scaled factor
    /// (denom(r) x - numer(r)) is used so everything stays in Z[x].
    pub fn div_rational_root(&self, r: &Rational) -> IntPoly {
        let factor = IntPoly::from_coeffs(vec![-r.numer().clone(), r.denom().clone()]);
        // self = factor * q * 1/content adjust: perform pseudo-division then
        // restore primitivity; the root being exact makes this exact up to
        // content.
        let mut rem = self.coeffs.clone();
        let dd = 1;
        let lead = factor.leading().unwrap().clone();
        let mut quot: Vec<BigInt> = vec![BigInt::zero(); rem.len().saturating_sub(1)];
        // multiply remainder through by lead once per step (pseudo-division)
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let top = rem.last().unwrap().clone();
            for c in rem.iter_mut() {
                *c *= &lead;
            }
            for q in quot.iter_mut() {
                *q *= &lead;
            }
            for (i, dc) in factor.coeffs.iter().enumerate() {
                let t = dc * &top;
                rem[k + i] -= t;
            }
            quot[k] = top;
            debug_assert!(rem.last().unwrap().is_zero());
            rem.pop();
        }
        assert!(
            rem.iter().all(Zero::is_zero),
            "div_rational_root: not a root"
        );
        IntPoly::from_coeffs(quot).primitive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn ip(coeffs: &[i64]) -> IntPoly {
        IntPoly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn primitive_divides_content() {
        let p = ip(&[6, -9, 12]);
        assert_eq!(p.content(), BigInt::from(3));
        assert_eq!(p.primitive(), ip(&[2, -3, 4]));
    }

    #[test]
    fn sign_at_matches_rational_eval() {
        let p = ip(&[-10, 25, -20, 5]);
        let q = p.to_rational_poly();
        for (n, d) in [(1i64, 2i64), (3, 4), (13, 16), (0, 1), (2, 1), (-1, 3)] {
            let x = rat(n, d);
            let expect = crate::rational::sign(&q.eval(&x));
            assert_eq!(p.sign_at(&x), expect, "at {}/{}", n, d);
        }
    }

    #[test]
    fn div_exact_round_trip() {
        let a = ip(&[1, 2, 1]);
        let b = ip(&[1, 1]);
        assert_eq!(a.div_exact(&b), ip(&[1, 1]));
    }

    #[test]
    fn div_rational_root_removes_factor() {
        // (2x - 1)(x + 3) = 2x^2 + 5x - 3, root 1/2
        let p = ip(&[-3, 5, 2]);
        let q = p.div_rational_root(&rat(1, 2));
        assert_eq!(q, ip(&[3, 1]));
    }
}
