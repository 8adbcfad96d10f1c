//! Two-phase Bellman-Ford solver for deterministic MDPs under μ-ordering.
//!
//! Phase one tabulates d_i(s), the μ-maximal discounted value over i-edge
//! paths from s, recording the first edge of each maximiser. Phase two
//! seeds y_0(s) with the μ-minimal cycle-corrected ratio
//! (d_n(s) - γ^{n-i} d_i(s)) / (1 - γ^{n-i}) and runs n-1 further value
//! updates; the best layer per state names the action of the returned
//! policy.

use thiserror::Error;

use crate::mdp::{Mdp, Policy};
use crate::poly::Polynomial;
use crate::ratfun::{MuOrdering, RationalFunction};

/// d[i][s] (polynomials in γ) and the first-edge action choices for
/// i >= 1.
#[derive(Debug, Clone)]
pub struct PathTable {
    pub d: Vec<Vec<Polynomial>>,
    pub first_action: Vec<Vec<usize>>,
}

/// y[j][s] for j = 0..n-1, the actions chosen at each update step, and
/// the phase-one action seeding step 0.
#[derive(Debug, Clone)]
pub struct YTable {
    pub y: Vec<Vec<RationalFunction>>,
    pub chosen_action: Vec<Vec<usize>>,
    pub y0_action: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DetMdpError {
    #[error("requires a deterministic MDP (some row spreads probability)")]
    NotDeterministic,
}

/// Computes a Blackwell-optimal policy for a deterministic MDP.
pub fn detmdp2_blackwell(m: &Mdp) -> Result<Policy, DetMdpError> {
    if !m.is_deterministic() {
        return Err(DetMdpError::NotDeterministic);
    }
    let paths = phase1_paths(m);
    let (_y, policy) = phase2_collect(m, &paths);
    Ok(policy)
}

/// Phase one: d_0 = 0 and d_i(s) = μ-max_a r(s,a) + γ d_{i-1}(succ(s,a)),
/// ties to the lowest action index.
pub fn phase1_paths(m: &Mdp) -> PathTable {
    let n = m.num_states();
    let mut d: Vec<Vec<Polynomial>> = vec![vec![Polynomial::zero(); n]];
    let mut first_action: Vec<Vec<usize>> = vec![vec![0; n]];
    for _i in 1..=n {
        let prev = d.last().unwrap();
        let mut layer = Vec::with_capacity(n);
        let mut acts = Vec::with_capacity(n);
        for s in 0..n {
            let (best, best_action) = mu_max_over_actions(m, s, |succ| prev[succ].clone());
            layer.push(best);
            acts.push(best_action);
        }
        d.push(layer);
        first_action.push(acts);
    }
    PathTable { d, first_action }
}

/// Phase two: the y table and the final policy.
pub fn phase2_collect(m: &Mdp, paths: &PathTable) -> (YTable, Policy) {
    let n = m.num_states();

    // y_0(s): μ-min over i in  {0..n-1} of (d_n(s) - γ^{n-i} d_i(s)) / (1 - γ^{n-i}).
    // The i = n term of the written range is 0/0 and is excluded.
    let mut y0 = Vec::with_capacity(n);
    for s in 0..n {
        let mut best: Option<RationalFunction> = None;
        for i in 0..n {
            let e = (n - i) as u32;
            let gamma_pow = Polynomial::gamma().pow(e);
            let num = &paths.d[n][s] - &(&gamma_pow * &paths.d[i][s]);
            let den = &Polynomial::one() - &gamma_pow;
            let ratio = RationalFunction::new(num, den);
            let better = match &best {
                None => true,
                Some(b) => ratio.mu_compare(b) == MuOrdering::Less,
            };
            if better {
                best = Some(ratio);
            }
        }
        y0.push(best.expect("n >= 1"));
    }
    let y0_action = paths.first_action[n].clone();

    let mut y = vec![y0];
    let mut chosen_action: Vec<Vec<usize>> = vec![y0_action.clone()];
    for _j in 1..n {
        let prev = y.last().unwrap();
        let mut layer = Vec::with_capacity(n);
        let mut acts = Vec::with_capacity(n);
        for s in 0..n {
            let (best, best_action) = mu_max_over_actions(m, s, |succ| prev[succ].clone());
            layer.push(best);
            acts.push(best_action);
        }
        y.push(layer);
        chosen_action.push(acts);
    }

    // π(s) = action of the μ-maximal layer, ties to the lowest layer index
    let mut choice = Vec::with_capacity(n);
    for s in 0..n {
        let mut best_j = 0usize;
        for j in 1..n {
            if y[j][s].mu_compare(&y[best_j][s]) == MuOrdering::Greater {
                best_j = j;
            }
        }
        choice.push(chosen_action[best_j][s]);
    }
    let policy = Policy(choice);
    debug_assert!(m.is_valid_policy(&policy));
    (
        YTable {
            y,
            chosen_action,
            y0_action,
        },
        policy,
    )
}

/// μ-max of r(s,a) + γ·f(succ(s,a)) over actions; ties break to the
/// lowest action index. Works for polynomial and rational-function layers
/// through the Layer trait below.
fn mu_max_over_actions<T: Layer>(m: &Mdp, s: usize, prev: impl Fn(usize) -> T) -> (T, usize) {
    let mut best: Option<(T, usize)> = None;
    for a in 0..m.num_actions(s) {
        let succ = m
            .successor(s, a)
            .expect("phase update requires a deterministic MDP");
        let cand = prev(succ).bellman_step(m.reward(s, a));
        let better = match &best {
            None => true,
            Some((b, _)) => cand.mu_gt(b),
        };
        if better {
            best = Some((cand, a));
        }
    }
    best.expect("every state has at least one action")
}

trait Layer: Clone {
    /// r + γ·self
    fn bellman_step(&self, reward: &crate::rational::Rational) -> Self;
    fn mu_gt(&self, other: &Self) -> bool;
}

impl Layer for Polynomial {
    fn bellman_step(&self, reward: &crate::rational::Rational) -> Polynomial {
        &Polynomial::constant(reward.clone()) + &self.shift_up(1)
    }
    fn mu_gt(&self, other: &Polynomial) -> bool {
        (self - other)
            .multiplicity_at_one()
            .map(|_| {
                let (stripped, _) = (self - other).strip_one_minus_gamma();
                crate::rational::sign(&stripped.eval_at_one()) > 0
            })
            .unwrap_or(false)
    }
}

impl Layer for RationalFunction {
    fn bellman_step(&self, reward: &crate::rational::Rational) -> RationalFunction {
        let gamma = RationalFunction::from_polynomial(Polynomial::gamma());
        &RationalFunction::constant(reward.clone()) + &(&gamma * self)
    }
    fn mu_gt(&self, other: &RationalFunction) -> bool {
        self.mu_compare(other) == MuOrdering::Greater
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::rational::rat_int;

    #[test]
    fn rejects_stochastic_input() {
        let m = instances::healthcare(5).unwrap();
        assert_eq!(detmdp2_blackwell(&m), Err(DetMdpError::NotDeterministic));
    }

    #[test]
    fn fig1a_path_table() {
        let m = instances::fig1a();
        let paths = phase1_paths(&m);
        // d_0 = 0 everywhere
        assert!(paths.d[0].iter().all(Polynomial::is_zero));
        // d_1(s1) = 10 via the reward-10 edge
        assert_eq!(paths.d[1][0], Polynomial::from_i64(&[10]));
        assert_eq!(paths.first_action[1][0], 2);
        // d_2(s1) = 10 still dominates 5 + 5γ under μ-ordering
        assert_eq!(paths.d[2][0], Polynomial::from_i64(&[10]));
        // the 2-edge alternative through a2 is 5 + 5γ; check it loses
        let alt = Polynomial::from_i64(&[5, 5]);
        assert!(paths.d[2][0].mu_gt(&alt));
    }

    #[test]
    fn fig1a_final_policy() {
        let m = instances::fig1a();
        assert_eq!(detmdp2_blackwell(&m).unwrap(), Policy(vec![2, 0, 0]));
    }

    #[test]
    fn single_self_loop() {
        let m = crate::mdp::Mdp::new(vec![vec![crate::mdp::MdpAction::edge(0, rat_int(4))]]);
        assert_eq!(detmdp2_blackwell(&m).unwrap(), Policy(vec![0]));
    }

    #[test]
    fn single_cycle_y0_is_cycle_value() {
        // 2-cycle with rewards 3 and 1, one action everywhere: y_0 must be
        // the policy's own value function V(s) = (r_s + γ r_{s'})/(1-γ²)
        let m = crate::mdp::Mdp::new(vec![
            vec![crate::mdp::MdpAction::edge(1, rat_int(3))],
            vec![crate::mdp::MdpAction::edge(0, rat_int(1))],
        ]);
        let paths = phase1_paths(&m);
        let (y, policy) = phase2_collect(&m, &paths);
        assert_eq!(policy, Policy(vec![0, 0]));
        let expect0 = RationalFunction::new(
            Polynomial::from_i64(&[3, 1]),
            Polynomial::from_i64(&[1, 0, -1]),
        );
        assert_eq!(y.y[0][0].mu_compare(&expect0), MuOrdering::Equal);
    }

    #[test]
    fn d_at_one_is_max_total_reward_over_paths() {
        // exhaustive path enumeration at γ = 1 on fig1b
        let m = instances::fig1b();
        let n = m.num_states();
        let paths = phase1_paths(&m);
        for i in 0..=n.min(5) {
            for s in 0..n {
                let mut best: Option<crate::rational::Rational> = None;
                // enumerate all i-edge action sequences from s
                let mut stack = vec![(s, 0usize, rat_int(0))];
                while let Some((state, depth, total)) = stack.pop() {
                    if depth == i {
                        if best.as_ref().map(|b| &total > b).unwrap_or(true) {
                            best = Some(total);
                        }
                        continue;
                    }
                    for a in 0..m.num_actions(state) {
                        let succ = m.successor(state, a).unwrap();
                        stack.push((succ, depth + 1, &total + m.reward(state, a)));
                    }
                }
                assert_eq!(paths.d[i][s].eval_at_one(), best.unwrap(), "i={i} s={s}");
            }
        }
    }
}
