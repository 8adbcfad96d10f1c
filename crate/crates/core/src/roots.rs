//! Certified real-root isolation on [0, 1) by Sturm sequences with exact
//! rational bisection.
//!
//! Every interval returned is certified to contain exactly one distinct
//! root by exact sign-variation counting. The sign-change flag (odd
//! multiplicity) is read off the original polynomial's signs at the
//! interval endpoints, or from explicit multiplicity when bisection lands
//! on a rational root.

use num_traits::{One, ToPrimitive, Zero};

use crate::intpoly::IntPoly;
use crate::poly::Polynomial;
use crate::rational::{rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootInterval {
    /// lo <= root <= hi; lo == hi exactly when the root is rational and
    /// was hit by bisection.
    pub lo: Rational,
    pub hi: Rational,
    /// True when the polynomial changes sign across the root (odd
    /// multiplicity).
    pub sign_change: bool,
    pub exact: Option<Rational>,
}

impl RootInterval {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }
}

/// Isolated roots of one polynomial in [0, 1), ascending, with the state
/// needed to refine any of them further.
pub struct IsolatedRoots {
    pub roots: Vec<RootInterval>,
    state: IsolState,
}

struct IsolState {
    /// p with (1-γ)^m and γ^k factors stripped: same roots and sign
    /// pattern as p on (0, 1).
    reduced: IntPoly,
    /// Squarefree working polynomial; rational roots found mid-bisection
    /// get divided out so later counts stay valid.
    square_free: IntPoly,
    chain: Vec<IntPoly>,
}

impl IsolState {
    fn count_in(&self, lo: &Rational, hi: &Rational) -> usize {
        self.variations_at(lo) - self.variations_at(hi)
    }

    fn variations_at(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for p in &self.chain {
            let s = p.sign_at(x);
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    fn divide_out(&mut self, root: &Rational) {
        self.square_free = self.square_free.div_rational_root(root);
        self.chain = sturm_chain(&self.square_free);
    }

    fn exact_root(&self, root: Rational) -> RootInterval {
        let mult = int_multiplicity_at(&self.reduced, &root);
        debug_assert!(mult >= 1);
        RootInterval {
            lo: root.clone(),
            hi: root.clone(),
            sign_change: mult % 2 == 1,
            exact: Some(root),
        }
    }

    /// Narrows (lo, hi), known to contain exactly one root of
    /// `square_free`, until its width is at most `width`.
    fn refine(&self, mut lo: Rational, mut hi: Rational, width: &Rational) -> RootInterval {
        loop {
            if &(&hi - &lo) <= width {
                let s_lo = self.reduced.sign_at(&lo);
                let s_hi = self.reduced.sign_at(&hi);
                debug_assert!(s_lo != 0 && s_hi != 0);
                return RootInterval {
                    lo,
                    hi,
                    sign_change: s_lo != s_hi,
                    exact: None,
                };
            }
            let m = split_point(&lo, &hi);
            if self.square_free.sign_at(&m) == 0 {
                return self.exact_root(m);
            }
            if self.count_in(&lo, &m) == 1 {
                hi = m;
            } else {
                lo = m;
            }
        }
    }
}

impl IsolatedRoots {
    /// Refines root `idx` until its interval width is at most `width`.
    pub fn refine(&mut self, idx: usize, width: &Rational) {
        let r = &self.roots[idx];
        if r.exact.is_some() || &r.width() <= width {
            return;
        }
        self.roots[idx] = self.state.refine(r.lo.clone(), r.hi.clone(), width);
    }
}

/// Isolates every real root of `p` in [0, 1) into disjoint certified
/// intervals of width at most `width`.
///
/// Panics if `p` is the zero polynomial or `width <= 0`.
pub fn isolate_roots_below_one(p: &Polynomial, width: &Rational) -> IsolatedRoots {
    assert!(!p.is_zero(), "cannot isolate roots of the zero polynomial");
    assert!(width > &Rational::zero(), "width must be positive");

    let (p1, _mult_at_one) = p.strip_one_minus_gamma();
    let (p2, mult_at_zero) = p1.strip_gamma();
    let reduced = IntPoly::from_rational_poly(&p2);
    let square_free = IntPoly::from_rational_poly(&p2.squarefree_part());
    let chain = sturm_chain(&square_free);
    let mut state = IsolState {
        reduced,
        square_free,
        chain,
    };

    let mut roots = Vec::new();
    if mult_at_zero > 0 {
        roots.push(RootInterval {
            lo: Rational::zero(),
            hi: Rational::zero(),
            sign_change: mult_at_zero % 2 == 1,
            exact: Some(Rational::zero()),
        });
    }
    if state.square_free.degree().unwrap_or(0) >= 1 {
        isolate_rec(
            &mut state,
            Rational::zero(),
            Rational::one(),
            width,
            &mut roots,
        );
    }
    roots.sort_by(|a, b| a.lo.cmp(&b.lo));
    IsolatedRoots { roots, state }
}

/// The largest root of `p` in [0, 1) as a certified interval, with its
/// sign-change flag, or None when p has no root there.
pub fn largest_root_below_one(p: &Polynomial, width: &Rational) -> Option<RootInterval> {
    isolate_roots_below_one(p, width).roots.pop()
}

fn isolate_rec(
    state: &mut IsolState,
    lo: Rational,
    hi: Rational,
    width: &Rational,
    out: &mut Vec<RootInterval>,
) {
    let cnt = state.count_in(&lo, &hi);
    if cnt == 0 {
        return;
    }
    if cnt == 1 {
        out.push(state.refine(lo, hi, width));
        return;
    }
    let m = &(&lo + &hi) * &rat(1, 2);
    if state.square_free.sign_at(&m) == 0 {
        out.push(state.exact_root(m.clone()));
        state.divide_out(&m);
    }
    isolate_rec(state, lo, m.clone(), width, out);
    isolate_rec(state, m, hi, width, out);
}

/// Sturm chain over Z[x]: p, p', then sign-corrected pseudo-remainders
/// reduced to primitive form. Positive scaling keeps the sign-variation
/// property intact.
fn sturm_chain(p: &IntPoly) -> Vec<IntPoly> {
    let mut chain = Vec::new();
    if p.is_zero() {
        return chain;
    }
    chain.push(p.clone());
    let d = p.derivative();
    if d.is_zero() {
        return chain;
    }
    chain.push(d);
    loop {
        let n = chain.len();
        let (rem, factor_sign) = pseudo_rem(&chain[n - 2], &chain[n - 1]);
        if rem.is_zero() {
            return chain;
        }
        let next = if factor_sign > 0 { rem.neg() } else { rem };
        chain.push(next.primitive());
    }
}

/// Pseudo-remainder: returns (r, s) with r = s-signed multiple such that
/// r equals lc(b)^t * a mod b for some t >= 0, and s = sign(lc(b)^t).
fn pseudo_rem(a: &IntPoly, b: &IntPoly) -> (IntPoly, i8) {
    use num_bigint::BigInt;
    let db = b.degree().expect("pseudo_rem by zero");
    let lead = b.leading().unwrap().clone();
    let lead_negative = lead < BigInt::zero();
    let mut rem: Vec<BigInt> = a.coeffs().to_vec();
    let mut steps = 0usize;
    while rem.len() > db {
        let k = rem.len() - 1 - db;
        let top = rem.last().unwrap().clone();
        if !top.is_zero() {
            for c in rem.iter_mut() {
                *c *= &lead;
            }
            for (i, bc) in b.coeffs().iter().enumerate() {
                rem[k + i] -= bc * &top;
            }
            steps += 1;
        }
        debug_assert!(rem.last().unwrap().is_zero());
        rem.pop();
    }
    let sign = if lead_negative && steps % 2 == 1 { -1 } else { 1 };
    (IntPoly::from_coeffs(rem), sign)
}

fn int_multiplicity_at(p: &IntPoly, root: &Rational) -> usize {
    let mut m = 0;
    let mut q = p.clone();
    while !q.is_zero() && q.sign_at(root) == 0 {
        q = q.div_rational_root(root);
        m += 1;
    }
    m
}

/// Bisection split point. Once the bracket hugs 1, split geometrically in
/// (1 - γ) so thresholds like 1 - 1e-10 are pinned in a few steps instead
/// of ~35 arithmetic halvings.
fn split_point(lo: &Rational, hi: &Rational) -> Rational {
    if lo >= &rat(3, 4) {
        let a = Rational::one() - lo;
        let b = Rational::one() - hi;
        if let (Some(af), Some(bf)) = (a.to_f64(), b.to_f64()) {
            if af > 0.0 && bf > 0.0 && af.is_finite() {
                let gm = ((af.ln() + bf.ln()) / 2.0).exp();
                if let Some(r) = Rational::from_float(gm) {
                    let cand = Rational::one() - r;
                    if &cand > lo && &cand < hi {
                        return cand;
                    }
                }
            }
        }
    }
    &(lo + hi) * &rat(1, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat_int;

    fn width_default() -> Rational {
        rat(1, 1000)
    }

    #[test]
    fn linear_root_with_sign_change() {
        // 1 - 2γ has root 1/2
        let p = Polynomial::from_i64(&[1, -2]);
        let r = largest_root_below_one(&p, &width_default()).unwrap();
        assert!(r.lo <= rat(1, 2) && rat(1, 2) <= r.hi);
        assert!(r.sign_change);
        assert!(r.width() <= width_default());
    }

    #[test]
    fn no_real_roots() {
        let p = Polynomial::from_i64(&[1, 0, 1]); // γ² + 1
        assert!(largest_root_below_one(&p, &width_default()).is_none());
    }

    #[test]
    fn double_root_no_sign_change() {
        // (2γ - 1)^2 = 4γ² - 4γ + 1
        let p = Polynomial::from_i64(&[1, -4, 4]);
        let r = largest_root_below_one(&p, &width_default()).unwrap();
        assert!(r.lo <= rat(1, 2) && rat(1, 2) <= r.hi);
        assert!(!r.sign_change);
    }

    #[test]
    fn root_at_zero_and_interior() {
        // γ^3 (3γ - 2): roots 0 (mult 3, sign change) and 2/3
        let p = Polynomial::from_i64(&[0, 0, 0, -2, 3]);
        let iso = isolate_roots_below_one(&p, &width_default());
        assert_eq!(iso.roots.len(), 2);
        assert_eq!(iso.roots[0].exact, Some(Rational::zero()));
        assert!(iso.roots[0].sign_change);
        assert!(iso.roots[1].lo <= rat(2, 3) && rat(2, 3) <= iso.roots[1].hi);
    }

    #[test]
    fn root_at_one_is_excluded() {
        // (1-γ)(γ - 1/2) scaled: (1-γ)(2γ-1)
        let p = &Polynomial::from_i64(&[1, -1]) * &Polynomial::from_i64(&[-1, 2]);
        let iso = isolate_roots_below_one(&p, &width_default());
        assert_eq!(iso.roots.len(), 1);
        assert!(iso.roots[0].lo <= rat(1, 2) && rat(1, 2) <= iso.roots[0].hi);
    }

    #[test]
    fn close_roots_are_separated() {
        // roots at 499/1000 and 1/2: need separation below 1/500
        let p = &Polynomial::from_i64(&[-499, 1000]) * &Polynomial::from_i64(&[-1, 2]);
        let iso = isolate_roots_below_one(&p, &rat(1, 100_000));
        assert_eq!(iso.roots.len(), 2);
        assert!(iso.roots[0].hi < iso.roots[1].lo);
    }

    #[test]
    fn dyadic_root_hit_exactly() {
        // root 1/2 is the first midpoint: must come back exact
        let p = Polynomial::from_i64(&[1, -2]);
        let iso = isolate_roots_below_one(&p, &width_default());
        assert_eq!(iso.roots[0].exact, Some(rat(1, 2)));
    }

    #[test]
    fn refine_narrows_interval() {
        // irrational root 1/sqrt(2): 2γ² - 1
        let p = Polynomial::from_i64(&[-1, 0, 2]);
        let mut iso = isolate_roots_below_one(&p, &rat(1, 16));
        assert_eq!(iso.roots.len(), 1);
        let tight = rat(1, 1_000_000_000);
        iso.refine(0, &tight);
        assert!(iso.roots[0].width() <= tight);
        // contains 1/sqrt(2) = 0.7071067811865476
        let lo = iso.roots[0].lo.to_f64().unwrap();
        let hi = iso.roots[0].hi.to_f64().unwrap();
        assert!(lo <= 0.7071067811865476 && 0.7071067811865476 <= hi);
    }

    #[test]
    fn root_extremely_close_to_one() {
        // (10^12 (1-γ) - 1) has root 1 - 1e-12; log-splitting must reach it
        let big = 1_000_000_000_000i64;
        let p = Polynomial::from_coeffs(vec![rat_int(big - 1), rat_int(-big)]);
        let r = largest_root_below_one(&p, &rat(1, big * 100)).unwrap();
        let expect = Rational::one() - Rational::new(1.into(), big.into());
        assert!(r.lo <= expect && expect <= r.hi);
        assert!(r.sign_change);
    }

    #[test]
    fn many_roots_all_found() {
        // (2γ-1)(4γ-1)(4γ-3)(γ-2): roots 1/4, 1/2, 3/4 inside, 2 outside
        let p = [&[-1i64, 2][..], &[-1, 4], &[-3, 4], &[-2, 1]]
            .iter()
            .map(|c| Polynomial::from_i64(c))
            .fold(Polynomial::one(), |acc, q| &acc * &q);
        let iso = isolate_roots_below_one(&p, &rat(1, 64));
        assert_eq!(iso.roots.len(), 3);
        for (r, expect) in iso.roots.iter().zip([rat(1, 4), rat(1, 2), rat(3, 4)]) {
            assert!(r.lo <= expect && expect <= r.hi);
            assert!(r.sign_change);
        }
    }
}
