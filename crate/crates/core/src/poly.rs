//! Univariate polynomials over the exact rationals.
//!
//! Coefficients are stored in ascending order of the power of the variable
//! (written γ throughout, though nothing here cares about the letter; the
//! limiting-matrix code reuses the same type with variable ρ). The zero
//! polynomial is the empty coefficient vector; otherwise the trailing
//! coefficient is nonzero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::rational::{sign, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::from_coeffs(vec![c])
    }

    /// The identity polynomial γ.
    pub fn gamma() -> Self {
        Polynomial::from_coeffs(vec![Rational::zero(), Rational::one()])
    }

    /// Builds from ascending coefficients, trimming trailing zeros.
    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().map(Zero::is_zero).unwrap_or(false) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Polynomial::from_coeffs(coeffs.iter().map(|&c| crate::rational::rat_int(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of γ^i (zero beyond the stored length).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_at_one(&self) -> Rational {
        self.coeffs.iter().fold(Rational::zero(), |a, c| a + c)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplies by γ^k.
    pub fn shift_up(&self, k: usize) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Polynomial { coeffs }
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        Polynomial::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer(i.into()))
                .collect(),
        )
    }

    /// Euclidean division; panics if `d` is zero.
    pub fn div_rem(&self, d: &Polynomial) -> (Polynomial, Polynomial) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let lead_inv = Rational::one() / d.leading().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Rational::zero(); self.coeffs.len().saturating_sub(dd)];
        while rem.len() > dd {
            let k = rem.len() - 1 - dd;
            let factor = rem.last().unwrap() * &lead_inv;
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
        (Polynomial::from_coeffs(quot), Polynomial::from_coeffs(rem))
    }

    /// Exact division; panics when the remainder is nonzero.
    pub fn div_exact(&self, d: &Polynomial) -> Polynomial {
        let (q, r) = self.div_rem(d);
        assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    /// Monic gcd via the Euclidean algorithm; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if let Some(lead) = a.leading() {
            let inv = Rational::one() / lead;
            a = a.scale(&inv);
        }
        a
    }

    /// Squarefree part: self / gcd(self, self').
    pub fn squarefree_part(&self) -> Polynomial {
        if self.is_zero() {
            return Polynomial::zero();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == Some(0) {
            self.clone()
        } else {
            self.div_exact(&g)
        }
    }

    /// Synthetic division by (1 - γ); returns None when the remainder is
    /// nonzero, i.e. when p(1) != 0.
    pub fn div_one_minus_gamma(&self) -> Option<Polynomial> {
        if self.is_zero() {
            return Some(Polynomial::zero());
        }
        if !self.eval_at_one().is_zero() {
            return None;
        }
        // p(x) = (1 - x) q(x) with deg q = deg p - 1:
        // q_i = -(p_{i+1} + p_{i+2} + ... + p_d)  (suffix sums)
        let d = self.coeffs.len() - 1;
        let mut q = vec![Rational::zero(); d];
        let mut suffix = Rational::zero();
        for i in (0..d).rev() {
            suffix += &self.coeffs[i + 1];
            q[i] = -suffix.clone();
        }
        Some(Polynomial::from_coeffs(q))
    }

    /// Largest m with (1-γ)^m dividing p, by repeated exact synthetic
    /// division. None for the zero polynomial, where it is undefined.
    pub fn multiplicity_at_one(&self) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        let mut m = 0;
        let mut p = self.clone();
        while let Some(q) = p.div_one_minus_gamma() {
            m += 1;
            p = q;
        }
        Some(m)
    }

    /// Divides out (1-γ)^m exactly and returns the stripped polynomial with
    /// its multiplicity. The stripped part is nonzero at 1.
    pub fn strip_one_minus_gamma(&self) -> (Polynomial, usize) {
        let mut m = 0;
        let mut p = self.clone();
        if p.is_zero() {
            return (p, 0);
        }
        while let Some(q) = p.div_one_minus_gamma() {
            m += 1;
            p = q;
        }
        (p, m)
    }

    /// Multiplicity of the root 0: number of leading zero coefficients.
    pub fn multiplicity_at_zero(&self) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        Some(self.coeffs.iter().take_while(|c| c.is_zero()).count())
    }

    /// Divides out γ^m and returns (stripped, m).
    pub fn strip_gamma(&self) -> (Polynomial, usize) {
        match self.multiplicity_at_zero() {
            None => (Polynomial::zero(), 0),
            Some(m) => (
                Polynomial {
                    coeffs: self.coeffs[m..].to_vec(),
                },
                m,
            ),
        }
    }

    /// Multiplicity of a root r: repeated exact division by (γ - r).
    pub fn multiplicity_at(&self, r: &Rational) -> usize {
        let linear = Polynomial::from_coeffs(vec![-r.clone(), Rational::one()]);
        let mut m = 0;
        let mut p = self.clone();
        while !p.is_zero() && p.eval(r).is_zero() {
            p = p.div_exact(&linear);
            m += 1;
        }
        m
    }

    /// Substitutes γ := 1 - u, returning the coefficients in u.
    pub fn compose_one_minus(&self) -> Polynomial {
        // p(1-u) by Horner on (1-u)
        let mut acc = Polynomial::zero();
        let one_minus_u = Polynomial::from_i64(&[1, -1]);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * &one_minus_u) + &Polynomial::constant(c.clone());
        }
        acc
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + rhs.coeff(i));
        }
        Polynomial::from_coeffs(out)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - rhs.coeff(i));
        }
        Polynomial::from_coeffs(out)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::from_coeffs(out)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if first {
                if sign(c) < 0 {
                    write!(f, "-")?;
                }
                first = false;
            } else if sign(c) < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let abs = if sign(c) < 0 { -c } else { c.clone() };
            match i {
                0 => write!(f, "{}", crate::rational::format_rational(&abs))?,
                _ => {
                    if !abs.is_one() {
                        write!(f, "{}*", crate::rational::format_rational(&abs))?;
                    }
                    if i == 1 {
                        write!(f, "g")?;
                    } else {
                        write!(f, "g^{}", i)?;
                    }
                }
            }
        }
        Ok(())
    }
}
