//! Generic policy iteration under μ-ordering with pluggable switching
//! rules: Howard, Max-Gain, Batch-Switching, Randomized-Simple.
//!
//! Each iteration evaluates the current policy symbolically, collects the
//! improving pairs J = {(s,a) : q_{s,a} ≻ v_s}, lets the rule pick a
//! switch set Θ (at most one action per state) and applies it. Strict
//! μ-improvement makes every rule terminate at a Blackwell-optimal fixed
//! point with empty J.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::mdp::{Mdp, Policy};
use crate::ratfun::{MuOrdering, RationalFunction};
use crate::symbolic::{gap, policy_evaluate_symbolic};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SwitchRule {
    /// Switches every improvable state to its μ-best action.
    Howard,
    /// Switches the single pair with the μ-largest gap.
    MaxGain,
    /// Howard restricted to the highest-index batch that is improvable.
    BatchSwitching { batch_size: usize },
    /// One uniformly random improving pair at the highest improvable
    /// state index.
    RandomizedSimple { seed: u64 },
}

pub const DEFAULT_BATCH_SIZE: usize = 2;

/// Improving pairs of one iteration with their gap functions, in
/// (state, action) order.
#[derive(Debug, Clone)]
pub struct GapTable {
    pub pairs: Vec<(usize, usize)>,
    pub gaps: Vec<RationalFunction>,
}

impl GapTable {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn gap_of(&self, idx: usize) -> &RationalFunction {
        &self.gaps[idx]
    }
}

/// One policy-iteration step: the policy it started from and the pairs it
/// switched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiStep {
    pub policy: Policy,
    pub switched: Vec<(usize, usize)>,
}

/// Full trajectory of a run; `steps.len()` is the iteration count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiTrace {
    pub steps: Vec<PiStep>,
    pub final_policy: Policy,
}

impl PiTrace {
    pub fn iterations(&self) -> usize {
        self.steps.len()
    }

    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|st| {
                json!({
                    "policy": st.policy.0,
                    "switched": st.switched.iter()
                        .map(|(s, a)| json!({"s": s, "a": a}))
                        .collect::<Vec<_>>(),
                })
            })
            .collect();
        Value::Array(steps)
    }
}

/// Runs policy iteration from π0 until no improving pair remains. The
/// returned policy is a μ-ordering fixed point, hence Blackwell-optimal.
pub fn generic_pi(m: &Mdp, pi0: &Policy, rule: &SwitchRule) -> (Policy, PiTrace) {
    assert!(m.is_valid_policy(pi0), "initial policy invalid");
    let mut rng = match rule {
        SwitchRule::RandomizedSimple { seed } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    if let SwitchRule::BatchSwitching { batch_size } = rule {
        assert!(*batch_size >= 1, "batch size must be at least 1");
    }

    let mut policy = pi0.clone();
    let mut steps = Vec::new();
    // strict μ-improvement forbids revisits, so the policy count bounds
    // the iterations; trip only on an implementation bug
    let hard_cap = m.policy_count().saturating_add(1);
    let mut iters: u128 = 0;

    loop {
        let values = policy_evaluate_symbolic(m, &policy);
        let mut pairs = Vec::new();
        let mut gaps = Vec::new();
        for s in 0..m.num_states() {
            for a in 0..m.num_actions(s) {
                if a == policy.action(s) {
                    continue;
                }
                let g = gap(m, &values, s, a);
                if g.sign_near_one() > 0 {
                    pairs.push((s, a));
                    gaps.push(g);
                }
            }
        }
        let table = GapTable { pairs, gaps };
        if table.is_empty() {
            break;
        }

        let theta = match rule {
            SwitchRule::Howard => select_howard(&table),
            SwitchRule::MaxGain => select_max_gain(&table),
            SwitchRule::BatchSwitching { batch_size } => {
                select_batch_switching(&table, m.num_states(), *batch_size)
            }
            SwitchRule::RandomizedSimple { .. } => {
                select_randomized_simple(&table, rng.as_mut().unwrap())
            }
        };
        debug_assert!(!theta.is_empty());
        steps.push(PiStep {
            policy: policy.clone(),
            switched: theta.clone(),
        });
        for (s, a) in theta {
            policy.0[s] = a;
        }

        iters += 1;
        assert!(iters < hard_cap, "policy iteration failed to terminate");
    }

    let trace = PiTrace {
        steps,
        final_policy: policy.clone(),
    };
    (policy, trace)
}

/// One pair per improvable state: the μ-maximal gap, ties to the lowest
/// action index.
pub fn select_howard(table: &GapTable) -> Vec<(usize, usize)> {
    let mut theta: Vec<(usize, usize)> = Vec::new();
    let mut best_idx: Option<usize> = None;
    let mut current_state = usize::MAX;
    for (idx, (s, _a)) in table.pairs.iter().enumerate() {
        if *s != current_state {
            if let Some(b) = best_idx {
                theta.push(table.pairs[b]);
            }
            current_state = *s;
            best_idx = Some(idx);
        } else {
            let b = best_idx.unwrap();
            // strictly greater only: ties keep the earlier (lower) action
            if table.gap_of(idx).mu_compare(table.gap_of(b)) == MuOrdering::Greater {
                best_idx = Some(idx);
            }
        }
    }
    if let Some(b) = best_idx {
        theta.push(table.pairs[b]);
    }
    theta
}

/// The single μ-argmax pair over all improving pairs; ties to the lowest
/// (state, action).
pub fn select_max_gain(table: &GapTable) -> Vec<(usize, usize)> {
    assert!(!table.is_empty());
    let mut best = 0;
    for idx in 1..table.pairs.len() {
        if table.gap_of(idx).mu_compare(table.gap_of(best)) == MuOrdering::Greater {
            best = idx;
        }
    }
    vec![table.pairs[best]]
}

/// States are pre-partitioned into contiguous index batches of
/// `batch_size` (the last may be smaller); Howard restricted to the
/// highest-index batch containing an improvable state.
pub fn select_batch_switching(
    table: &GapTable,
    n_states: usize,
    batch_size: usize,
) -> Vec<(usize, usize)> {
    assert!(batch_size >= 1);
    assert!(!table.is_empty());
    let _ = n_states;
    let top_batch = table.pairs.iter().map(|(s, _)| s / batch_size).max().unwrap();
    let lo = top_batch * batch_size;
    let hi = lo + batch_size;
    let keep: Vec<usize> = table
        .pairs
        .iter()
        .enumerate()
        .filter(|(_, (s, _))| (lo..hi).contains(s))
        .map(|(idx, _)| idx)
        .collect();
    let restricted = GapTable {
        pairs: keep.iter().map(|&i| table.pairs[i]).collect(),
        gaps: keep.iter().map(|&i| table.gaps[i].clone()).collect(),
    };
    select_howard(&restricted)
}

/// One pair drawn uniformly from the improving pairs at the highest
/// improvable state index.
pub fn select_randomized_simple(table: &GapTable, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    assert!(!table.is_empty());
    let top_state = table.pairs.iter().map(|(s, _)| *s).max().unwrap();
    let at_top: Vec<(usize, usize)> = table
        .pairs
        .iter()
        .copied()
        .filter(|(s, _)| *s == top_state)
        .collect();
    let pick = rng.gen_range(0..at_top.len());
    vec![at_top[pick]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::poly::Polynomial;

    fn table_for(m: &Mdp, policy: &Policy) -> GapTable {
        let values = policy_evaluate_symbolic(m, policy);
        let mut pairs = Vec::new();
        let mut gaps = Vec::new();
        for s in 0..m.num_states() {
            for a in 0..m.num_actions(s) {
                if a == policy.action(s) {
                    continue;
                }
                let g = gap(m, &values, s, a);
                if g.sign_near_one() > 0 {
                    pairs.push((s, a));
                    gaps.push(g);
                }
            }
        }
        GapTable { pairs, gaps }
    }

    #[test]
    fn howard_reaches_pi3_on_fig1a() {
        let m = instances::fig1a();
        let (policy, trace) = generic_pi(&m, &Policy::lowest(3), &SwitchRule::Howard);
        assert_eq!(policy, Policy(vec![2, 0, 0]));
        assert_eq!(trace.final_policy, policy);
        assert!(trace.iterations() >= 1);
    }

    #[test]
    fn fixed_point_returns_immediately() {
        let m = instances::fig1a();
        let pi3 = Policy(vec![2, 0, 0]);
        let (policy, trace) = generic_pi(&m, &pi3, &SwitchRule::MaxGain);
        assert_eq!(policy, pi3);
        assert_eq!(trace.iterations(), 0);
    }

    #[test]
    fn every_rule_solves_fig3() {
        let m = instances::fig3();
        let rules = [
            SwitchRule::Howard,
            SwitchRule::MaxGain,
            SwitchRule::BatchSwitching { batch_size: 1 },
            SwitchRule::BatchSwitching { batch_size: 2 },
            SwitchRule::RandomizedSimple { seed: 7 },
        ];
        for rule in rules {
            let (policy, _) = generic_pi(&m, &Policy(vec![0, 0]), &rule);
            assert_eq!(policy, Policy(vec![1, 0]), "rule {rule:?}");
        }
    }

    #[test]
    fn howard_selects_dominant_action_on_fig1a() {
        // gaps at π1: (s1,a2) -> 5, (s1,a3) -> 10 - 5γ; the latter wins
        // since their difference 5(1-γ) ≻ 0
        let m = instances::fig1a();
        let table = table_for(&m, &Policy::lowest(3));
        assert_eq!(select_howard(&table), vec![(0, 2)]);
        assert_eq!(select_max_gain(&table), vec![(0, 2)]);
    }

    #[test]
    fn howard_tie_breaks_to_lower_action() {
        // two actions with identical q functions at one state
        let m = Mdp::new(vec![
            vec![
                crate::mdp::MdpAction::edge(0, crate::rational::rat_int(0)),
                crate::mdp::MdpAction::edge(1, crate::rational::rat_int(5)),
                crate::mdp::MdpAction::edge(1, crate::rational::rat_int(5)),
            ],
            vec![crate::mdp::MdpAction::edge(1, crate::rational::rat_int(0))],
        ]);
        let table = table_for(&m, &Policy(vec![0, 0]));
        assert_eq!(table.pairs, vec![(0, 1), (0, 2)]);
        assert_eq!(select_howard(&table), vec![(0, 1)]);
        assert_eq!(select_max_gain(&table), vec![(0, 1)]);
    }

    #[test]
    fn batch_rules_degenerate_to_howard_and_single_state() {
        let m = instances::fig1a();
        let table = table_for(&m, &Policy::lowest(3));
        // batch_size = n: identical to Howard
        assert_eq!(
            select_batch_switching(&table, 3, 3),
            select_howard(&table)
        );
        // batch_size = 1: single highest-index improvable state
        assert_eq!(select_batch_switching(&table, 3, 1), vec![(0, 2)]);
    }

    #[test]
    fn randomized_simple_is_seed_deterministic() {
        let m = instances::fig1a();
        let table = table_for(&m, &Policy::lowest(3));
        for seed in [0u64, 1, 42] {
            let mut r1 = ChaCha8Rng::seed_from_u64(seed);
            let mut r2 = ChaCha8Rng::seed_from_u64(seed);
            assert_eq!(
                select_randomized_simple(&table, &mut r1),
                select_randomized_simple(&table, &mut r2)
            );
        }
    }

    #[test]
    fn randomized_simple_hits_both_pairs_near_half() {
        // both (s1,a2) and (s1,a3) improve at the unique improvable state;
        // over 1000 seeds each should appear with frequency 1/2 ± 5%
        let m = instances::fig1a();
        let table = table_for(&m, &Policy::lowest(3));
        let mut count_a2 = 0;
        for seed in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            if select_randomized_simple(&table, &mut rng) == vec![(0, 1)] {
                count_a2 += 1;
            }
        }
        assert!((450..=550).contains(&count_a2), "saw {count_a2}/1000");
    }

    #[test]
    fn trace_steps_match_switches() {
        let m = instances::fig1b();
        let (policy, trace) = generic_pi(&m, &Policy::lowest(6), &SwitchRule::Howard);
        let mut current = trace.steps[0].policy.clone();
        assert_eq!(current, Policy::lowest(6));
        let mut seen = vec![current.clone()];
        for step in &trace.steps {
            assert_eq!(step.policy, current);
            for &(s, a) in &step.switched {
                assert_ne!(current.0[s], a, "switch must change the action");
                current.0[s] = a;
            }
            assert!(!seen.contains(&current), "policy repeated in trace");
            seen.push(current.clone());
        }
        assert_eq!(current, policy);
    }

    #[test]
    fn gap_table_polynomials_are_exact() {
        // fig1a π1: gap(s1,a3) = 10 - 5γ
        let m = instances::fig1a();
        let table = table_for(&m, &Policy::lowest(3));
        let idx = table.pairs.iter().position(|p| *p == (0, 2)).unwrap();
        assert_eq!(
            table.gaps[idx],
            crate::ratfun::RationalFunction::from_polynomial(Polynomial::from_i64(&[10, -5]))
        );
    }
}
