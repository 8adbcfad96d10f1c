//! Symbolic policy evaluation: value and action-value vectors as rational
//! functions of γ.
//!
//! The Bellman system (I - γP^π) v = r^π is solved over the
//! rational-function field by fraction-free (Bareiss) elimination on the
//! polynomial matrix: the common denominator is det(I - γP^π) and each
//! state's numerator is the determinant with that column replaced by r^π.
//! Coefficient growth stays polynomial; nothing is ever truncated.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::intpoly::IntPoly;
use crate::mdp::{Mdp, Policy};
use crate::poly::Polynomial;
use crate::ratfun::RationalFunction;
use crate::rational::Rational;

/// Per-state values v_s = num_s / den with one shared denominator.
#[derive(Debug, Clone)]
pub struct SymbolicValue {
    nums: Vec<Polynomial>,
    den: Polynomial,
}

/// Per-(state, action) q_{s,a} = num / den, sharing the value denominator.
#[derive(Debug, Clone)]
pub struct SymbolicQ {
    nums: Vec<Vec<Polynomial>>,
    den: Polynomial,
}

impl SymbolicValue {
    pub fn len(&self) -> usize {
        self.nums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nums.is_empty()
    }

    pub fn numerator(&self, s: usize) -> &Polynomial {
        &self.nums[s]
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    /// v_s as a canonical rational function.
    pub fn value(&self, s: usize) -> RationalFunction {
        RationalFunction::new(self.nums[s].clone(), self.den.clone())
    }

    /// Exact v(γ₀) for every state.
    pub fn eval_all(&self, gamma: &Rational) -> Vec<Rational> {
        let d = self.den.eval(gamma);
        assert!(!d.is_zero(), "denominator vanishes at evaluation point");
        self.nums.iter().map(|n| n.eval(gamma) / &d).collect()
    }
}

impl SymbolicQ {
    pub fn value(&self, s: usize, a: usize) -> RationalFunction {
        RationalFunction::new(self.nums[s][a].clone(), self.den.clone())
    }

    pub fn numerator(&self, s: usize, a: usize) -> &Polynomial {
        &self.nums[s][a]
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }
}

/// Solves (I - γP^π) v = r^π exactly; the shared denominator divides
/// det(I - γP^π) only up to the constant factor used to clear the input's
/// rational entries.
pub fn policy_evaluate_symbolic(m: &Mdp, policy: &Policy) -> SymbolicValue {
    assert!(m.is_valid_policy(policy), "policy invalid for this MDP");
    let n = m.num_states();
    let (matrix, rewards) = m.transition_matrix(policy);

    // rows of [I - γP | r], cleared to integer coefficients row by row
    let mut rows: Vec<Vec<IntPoly>> = Vec::with_capacity(n);
    for s in 0..n {
        let mut lcm = BigInt::one();
        for p in &matrix[s] {
            lcm = lcm.lcm(p.denom());
        }
        lcm = lcm.lcm(rewards[s].denom());
        let mut row: Vec<IntPoly> = Vec::with_capacity(n + 1);
        for (j, p) in matrix[s].iter().enumerate() {
            // entry: [s==j] - γ p
            let mut coeffs = vec![BigInt::zero(), -(p.numer() * (&lcm / p.denom()))];
            if s == j {
                coeffs[0] = lcm.clone();
            }
            row.push(IntPoly::from_coeffs(coeffs));
        }
        row.push(IntPoly::from_coeffs(vec![
            rewards[s].numer() * (&lcm / rewards[s].denom()),
        ]));
        rows.push(row);
    }

    let det = bareiss_det(columns(&rows, n, usize::MAX));
    assert!(!det.is_zero(), "det(I - γP) is identically zero");
    let mut nums = Vec::with_capacity(n);
    for s in 0..n {
        nums.push(bareiss_det(columns(&rows, n, s)));
    }

    normalize(nums, det)
}

/// q_{s,a} = R(s,a) + γ Σ_s' T(s,a,s') v_s' for every pair, over the
/// shared value denominator.
pub fn q_values_symbolic(m: &Mdp, values: &SymbolicValue) -> SymbolicQ {
    let n = m.num_states();
    let mut nums = Vec::with_capacity(n);
    for s in 0..n {
        let per_action: Vec<Polynomial> = (0..m.num_actions(s))
            .map(|a| q_numerator(m, values, s, a))
            .collect();
        nums.push(per_action);
    }
    SymbolicQ {
        nums,
        den: values.den.clone(),
    }
}

/// Single q_{s,a} - v_s as a canonical rational function.
pub fn gap(m: &Mdp, values: &SymbolicValue, s: usize, a: usize) -> RationalFunction {
    let q = q_numerator(m, values, s, a);
    RationalFunction::new(&q - &values.nums[s], values.den.clone())
}

/// Sign of q_{s,a} - v_s in the left-neighbourhood of 1, without building
/// the canonical form.
pub fn gap_sign(m: &Mdp, values: &SymbolicValue, s: usize, a: usize) -> i8 {
    gap(m, values, s, a).sign_near_one()
}

/// All (s, a) with q_{s,a} ≻ v_s, in (state, action) order. Pairs with
/// a = π(s) never qualify: their gap is identically zero.
pub fn improving_pairs(m: &Mdp, policy: &Policy) -> Vec<(usize, usize)> {
    let values = policy_evaluate_symbolic(m, policy);
    improving_pairs_with(m, &values, policy)
}

/// As [`improving_pairs`], reusing an existing evaluation.
pub fn improving_pairs_with(
    m: &Mdp,
    values: &SymbolicValue,
    policy: &Policy,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for s in 0..m.num_states() {
        for a in 0..m.num_actions(s) {
            if a == policy.action(s) {
                continue;
            }
            if gap_sign(m, values, s, a) > 0 {
                out.push((s, a));
            }
        }
    }
    out
}

fn q_numerator(m: &Mdp, values: &SymbolicValue, s: usize, a: usize) -> Polynomial {
    let mut acc = values.den.scale(m.reward(s, a));
    let mut weighted = Polynomial::zero();
    for (to, p) in m.transitions(s, a) {
        weighted = &weighted + &values.nums[*to].scale(p);
    }
    acc = &acc + &weighted.shift_up(1); // γ · Σ T v
    acc
}

/// Scales nums/den so den is a primitive integer polynomial with positive
/// leading coefficient; per-state (1-γ) cancellation is left to
/// RationalFunction construction.
fn normalize(nums: Vec<IntPoly>, den: IntPoly) -> SymbolicValue {
    let mut den_q = den.to_rational_poly();
    let mut factor = Rational::new(BigInt::one(), den.content());
    if den_q
        .leading()
        .map(num_traits::Signed::is_negative)
        .unwrap_or(false)
    {
        factor = -factor;
    }
    den_q = den_q.scale(&factor);
    let nums_q = nums
        .into_iter()
        .map(|p| p.to_rational_poly().scale(&factor))
        .collect();
    SymbolicValue {
        nums: nums_q,
        den: den_q,
    }
}

/// Column selector: `replace == usize::MAX` yields the plain system matrix;
/// otherwise column `replace` is substituted with the right-hand side.
fn columns(rows: &[Vec<IntPoly>], n: usize, replace: usize) -> Vec<Vec<IntPoly>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j == replace {
                        rows[i][n].clone()
                    } else {
                        rows[i][j].clone()
                    }
                })
                .collect()
        })
        .collect()
}

/// Fraction-free determinant: one-step Bareiss with exact divisions.
fn bareiss_det(mut m: Vec<Vec<IntPoly>>) -> IntPoly {
    let n = m.len();
    if n == 0 {
        return IntPoly::one();
    }
    let mut sign = 1i8;
    let mut prev = IntPoly::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return IntPoly::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = t.div_exact(&prev);
            }
            m[i][k] = IntPoly::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        det.neg()
    } else {
        det
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::rational::{rat, rat_int};

    fn rf_poly(coeffs: &[i64]) -> RationalFunction {
        RationalFunction::from_polynomial(Polynomial::from_i64(coeffs))
    }

    #[test]
    fn fig1a_caption_values() {
        let m = instances::fig1a();
        // π1 = (1,1,1): v(s1) = 5γ
        let v1 = policy_evaluate_symbolic(&m, &Policy(vec![0, 0, 0]));
        assert_eq!(v1.value(0), rf_poly(&[0, 5]));
        // π2: v(s1) = 5 + 5γ
        let v2 = policy_evaluate_symbolic(&m, &Policy(vec![1, 0, 0]));
        assert_eq!(v2.value(0), rf_poly(&[5, 5]));
        // π3: v(s1) = 10
        let v3 = policy_evaluate_symbolic(&m, &Policy(vec![2, 0, 0]));
        assert_eq!(v3.value(0), rf_poly(&[10]));
    }

    #[test]
    fn fig3_dashed_geometric_series() {
        let m = instances::fig3();
        let v = policy_evaluate_symbolic(&m, &Policy(vec![1, 0]));
        // (1/10)/(1-γ)
        let expect = RationalFunction::new(
            Polynomial::constant(rat(1, 10)),
            Polynomial::from_i64(&[1, -1]),
        );
        assert_eq!(v.value(0).mu_compare(&expect), crate::MuOrdering::Equal);
        // cross-check by exact numeric solve at γ = 1/2
        assert_eq!(v.eval_all(&rat(1, 2))[0], rat(1, 5));
    }

    #[test]
    fn q_values_fig1a() {
        let m = instances::fig1a();
        let pi1 = Policy(vec![0, 0, 0]);
        let v = policy_evaluate_symbolic(&m, &pi1);
        let q = q_values_symbolic(&m, &v);
        // (s1, a2): 5 + 5γ; (s1, a3): 10
        assert_eq!(q.value(0, 1), rf_poly(&[5, 5]));
        assert_eq!(q.value(0, 2), rf_poly(&[10]));
        // q at the policy's own action equals v
        for s in 0..3 {
            assert_eq!(
                q.value(s, pi1.action(s)).mu_compare(&v.value(s)),
                crate::MuOrdering::Equal
            );
        }
    }

    #[test]
    fn improving_pairs_fig1a() {
        let m = instances::fig1a();
        assert_eq!(
            improving_pairs(&m, &Policy(vec![0, 0, 0])),
            vec![(0, 1), (0, 2)]
        );
        assert_eq!(improving_pairs(&m, &Policy(vec![2, 0, 0])), vec![]);
    }

    #[test]
    fn one_state_one_action_has_no_improvements() {
        let m = Mdp::new(vec![vec![crate::mdp::MdpAction::edge(0, rat_int(3))]]);
        assert_eq!(improving_pairs(&m, &Policy(vec![0])), vec![]);
    }

    #[test]
    fn denominator_vanishes_at_one() {
        // d_π(1) = det(I - P) = 0 for every stochastic P
        for (m, pol) in [
            (instances::fig1a(), Policy(vec![0, 0, 0])),
            (instances::fig3(), Policy(vec![1, 0])),
            (instances::healthcare(5).unwrap(), Policy(vec![1, 1, 1, 1, 0])),
        ] {
            let v = policy_evaluate_symbolic(&m, &pol);
            assert!(v.denominator().eval_at_one().is_zero());
        }
    }

    #[test]
    fn bellman_identity_exact() {
        // r^π + γ P^π v - v ≐ 0 componentwise
        let m = instances::healthcare(5).unwrap();
        let pol = Policy(vec![2, 1, 0, 2, 0]);
        let v = policy_evaluate_symbolic(&m, &pol);
        let (matrix, rewards) = m.transition_matrix(&pol);
        for s in 0..m.num_states() {
            let mut rhs = v.denominator().scale(&rewards[s]);
            let mut weighted = Polynomial::zero();
            for (j, p) in matrix[s].iter().enumerate() {
                weighted = &weighted + &v.numerator(j).scale(p);
            }
            rhs = &rhs + &weighted.shift_up(1);
            assert_eq!(&rhs - &v.numerator(s).clone(), Polynomial::zero());
        }
    }

    #[test]
    fn gamma_zero_limit_is_immediate_reward() {
        let m = instances::healthcare(6).unwrap();
        let pol = Policy(vec![0, 1, 2, 0, 1, 0]);
        let v = policy_evaluate_symbolic(&m, &pol);
        for s in 0..m.num_states() {
            assert_eq!(
                v.value(s).eval(&Rational::zero()).unwrap(),
                *m.reward(s, pol.action(s))
            );
        }
    }

    #[test]
    fn point_consistency_with_exact_numeric_solve() {
        let m = instances::healthcare(4).unwrap();
        let pol = Policy(vec![2, 0, 1, 0]);
        let v = policy_evaluate_symbolic(&m, &pol);
        let gamma = rat(7, 9);
        let symbolic = v.eval_all(&gamma);
        let numeric = crate::instances::exact_numeric_values(&m, &pol, &gamma);
        assert_eq!(symbolic, numeric);
    }
}
