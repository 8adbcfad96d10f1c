//! Recursive randomized solver over state-action pair sets.
//!
//! Given a pair set M and a policy π inside it, the solver checks whether
//! any pair of M improves on π; if so it removes a uniformly random
//! non-policy pair p, solves the reduced set (1st call), and only if p
//! improves on that answer switches p and re-solves the full set (2nd
//! call). The recursion runs on an explicit stack, and every recursive
//! call derives its RNG stream by seeding a child generator from the
//! parent's next output, so a (seed, MDP, policy) triple fixes the whole
//! transcript.

use std::collections::HashMap;
use std::rc::Rc;

use rand::Rng;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::mdp::{Mdp, Policy};
use crate::symbolic::{gap_sign, policy_evaluate_symbolic, SymbolicValue};

/// Subset of state-action pairs the recursion may use. Always covers
/// every state and contains the current policy's pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet {
    by_state: Vec<Vec<usize>>,
}

impl PairSet {
    /// All pairs of the MDP.
    pub fn full(m: &Mdp) -> PairSet {
        PairSet {
            by_state: (0..m.num_states())
                .map(|s| (0..m.num_actions(s)).collect())
                .collect(),
        }
    }

    pub fn from_pairs(n_states: usize, pairs: &[(usize, usize)]) -> PairSet {
        let mut by_state = vec![Vec::new(); n_states];
        for &(s, a) in pairs {
            by_state[s].push(a);
        }
        for actions in &mut by_state {
            actions.sort_unstable();
            actions.dedup();
        }
        PairSet { by_state }
    }

    pub fn contains(&self, s: usize, a: usize) -> bool {
        self.by_state[s].binary_search(&a).is_ok()
    }

    pub fn without(&self, s: usize, a: usize) -> PairSet {
        let mut out = self.clone();
        out.by_state[s].retain(|&x| x != a);
        out
    }

    /// Pairs in (state, action) order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.by_state
            .iter()
            .enumerate()
            .flat_map(|(s, actions)| actions.iter().map(move |&a| (s, a)))
    }

    pub fn len(&self) -> usize {
        self.by_state.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RandomFacetError {
    #[error("pair set leaves state {0} without any action")]
    UncoveredState(usize),
    #[error("policy action ({0},{1}) is outside the pair set")]
    PolicyOutsidePairSet(usize, usize),
    #[error("initial policy is invalid for this MDP")]
    InvalidPolicy,
}

/// Recursion transcript; equal transcripts certify seed determinism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RfEvent {
    /// Uniform pick of a non-policy pair at the current recursion node.
    Pick { pair: (usize, usize), pool: usize },
    /// The picked pair improved on the 1st-call answer; switched and
    /// re-solving.
    SecondCall { pair: (usize, usize) },
    /// A node returned this policy.
    Return { policy: Policy },
}

/// Runs Random-Facet on the full pair set.
pub fn random_facet_blackwell(
    m: &Mdp,
    pi0: &Policy,
    seed: u64,
) -> Result<(Policy, Vec<RfEvent>), RandomFacetError> {
    random_facet_restricted(m, &PairSet::full(m), pi0, seed)
}

/// Runs Random-Facet on an explicit pair set. The returned policy has no
/// improving pair inside the set; on the full set that is Blackwell
/// optimality.
pub fn random_facet_restricted(
    m: &Mdp,
    pairs: &PairSet,
    pi0: &Policy,
    seed: u64,
) -> Result<(Policy, Vec<RfEvent>), RandomFacetError> {
    if !m.is_valid_policy(pi0) {
        return Err(RandomFacetError::InvalidPolicy);
    }
    if pairs.by_state.len() != m.num_states() {
        return Err(RandomFacetError::InvalidPolicy);
    }
    for (s, actions) in pairs.by_state.iter().enumerate() {
        if actions.is_empty() {
            return Err(RandomFacetError::UncoveredState(s));
        }
        if actions.iter().any(|&a| a >= m.num_actions(s)) {
            return Err(RandomFacetError::UncoveredState(s));
        }
    }
    for s in 0..m.num_states() {
        if !pairs.contains(s, pi0.action(s)) {
            return Err(RandomFacetError::PolicyOutsidePairSet(s, pi0.action(s)));
        }
    }

    let mut solver = Solver {
        m,
        cache: HashMap::new(),
        transcript: Vec::new(),
    };
    let policy = solver.run(pairs.clone(), pi0.clone(), seed);
    Ok((policy, solver.transcript))
}

/// Replaces the action at p's state.
pub fn switch(p: (usize, usize), policy: &Policy) -> Policy {
    let mut out = policy.clone();
    out.0[p.0] = p.1;
    out
}

struct Solver<'a> {
    m: &'a Mdp,
    cache: HashMap<Policy, Rc<SymbolicValue>>,
    transcript: Vec<RfEvent>,
}

enum Frame {
    Solve {
        pairs: PairSet,
        policy: Policy,
        rng: ChaCha8Rng,
    },
    AfterFirst {
        pairs: PairSet,
        picked: (usize, usize),
        rng: ChaCha8Rng,
    },
    PassThrough,
}

impl<'a> Solver<'a> {
    fn values(&mut self, policy: &Policy) -> Rc<SymbolicValue> {
        if let Some(v) = self.cache.get(policy) {
            return Rc::clone(v);
        }
        let v = Rc::new(policy_evaluate_symbolic(self.m, policy));
        self.cache.insert(policy.clone(), Rc::clone(&v));
        v
    }

    /// First improving pair of `policy` within `pairs`, scanning in
    /// (state, action) order.
    fn first_improving(&mut self, pairs: &PairSet, policy: &Policy) -> Option<(usize, usize)> {
        let values = self.values(policy);
        pairs
            .iter()
            .find(|&(s, a)| a != policy.action(s) && gap_sign(self.m, &values, s, a) > 0)
    }

    fn improves(&mut self, policy: &Policy, p: (usize, usize)) -> bool {
        if policy.action(p.0) == p.1 {
            return false;
        }
        let values = self.values(policy);
        gap_sign(self.m, &values, p.0, p.1) > 0
    }

    fn run(&mut self, pairs: PairSet, policy: Policy, seed: u64) -> Policy {
        let mut stack = vec![Frame::Solve {
            pairs,
            policy,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }];
        let mut ret: Option<Policy> = None;

        while let Some(frame) = stack.pop() {
            match frame {
                Frame::Solve {
                    pairs,
                    policy,
                    mut rng,
                } => {
                    if self.first_improving(&pairs, &policy).is_none() {
                        self.transcript.push(RfEvent::Return {
                            policy: policy.clone(),
                        });
                        ret = Some(policy);
                        continue;
                    }
                    // improving pairs never sit inside the policy, so the
                    // pool of removable pairs cannot be empty here
                    let pool: Vec<(usize, usize)> = pairs
                        .iter()
                        .filter(|&(s, a)| policy.action(s) != a)
                        .collect();
                    assert!(
                        !pool.is_empty(),
                        "improving pair found but no non-policy pair exists"
                    );
                    let picked = pool[rng.gen_range(0..pool.len())];
                    self.transcript.push(RfEvent::Pick {
                        pair: picked,
                        pool: pool.len(),
                    });
                    let child_seed = rng.next_u64();
                    let reduced = pairs.without(picked.0, picked.1);
                    stack.push(Frame::AfterFirst { pairs, picked, rng });
                    stack.push(Frame::Solve {
                        pairs: reduced,
                        policy,
                        rng: ChaCha8Rng::seed_from_u64(child_seed),
                    });
                }
                Frame::AfterFirst {
                    pairs,
                    picked,
                    mut rng,
                } => {
                    let candidate = ret.take().expect("1st call returned no policy");
                    debug_assert!(
                        self.first_improving(&pairs.without(picked.0, picked.1), &candidate)
                            .is_none(),
                        "1st call answer still improvable inside the reduced set"
                    );
                    if self.improves(&candidate, picked) {
                        self.transcript.push(RfEvent::SecondCall { pair: picked });
                        let switched = switch(picked, &candidate);
                        let child_seed = rng.next_u64();
                        stack.push(Frame::PassThrough);
                        stack.push(Frame::Solve {
                            pairs,
                            policy: switched,
                            rng: ChaCha8Rng::seed_from_u64(child_seed),
                        });
                    } else {
                        self.transcript.push(RfEvent::Return {
                            policy: candidate.clone(),
                        });
                        ret = Some(candidate);
                    }
                }
                Frame::PassThrough => {}
            }
        }
        ret.expect("recursion ended without a result")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::symbolic::improving_pairs;

    #[test]
    fn fig1a_reaches_pi3_for_many_seeds() {
        let m = instances::fig1a();
        for seed in 0..25u64 {
            let (policy, _) = random_facet_blackwell(&m, &Policy::lowest(3), seed).unwrap();
            assert_eq!(policy, Policy(vec![2, 0, 0]), "seed {seed}");
        }
    }

    #[test]
    fn pair_set_equal_to_policy_returns_unchanged() {
        let m = instances::fig1a();
        let pi1 = Policy::lowest(3);
        let only_policy = PairSet::from_pairs(3, &[(0, 0), (1, 0), (2, 0)]);
        let (policy, transcript) =
            random_facet_restricted(&m, &only_policy, &pi1, 3).unwrap();
        assert_eq!(policy, pi1);
        // single Return event, no picks
        assert_eq!(transcript.len(), 1);
    }

    #[test]
    fn malformed_pair_set_is_rejected() {
        let m = instances::fig1a();
        let missing_state = PairSet::from_pairs(3, &[(0, 0), (1, 0)]);
        assert_eq!(
            random_facet_restricted(&m, &missing_state, &Policy::lowest(3), 0),
            Err(RandomFacetError::UncoveredState(2))
        );
        let excludes_policy = PairSet::from_pairs(3, &[(0, 1), (0, 2), (1, 0), (2, 0)]);
        assert_eq!(
            random_facet_restricted(&m, &excludes_policy, &Policy::lowest(3), 0),
            Err(RandomFacetError::PolicyOutsidePairSet(0, 0))
        );
    }

    #[test]
    fn switch_semantics() {
        let pi1 = Policy(vec![0, 0, 0]);
        assert_eq!(switch((0, 2), &pi1), Policy(vec![2, 0, 0]));
        // idempotent on the policy's own pair
        assert_eq!(switch((1, 0), &pi1), pi1);
        // switches at distinct states commute
        let a = switch((2, 0), &switch((0, 1), &pi1));
        let b = switch((0, 1), &switch((2, 0), &pi1));
        assert_eq!(a, b);
    }

    #[test]
    fn seed_determinism_includes_transcript() {
        let m = instances::fig1b();
        let (p1, t1) = random_facet_blackwell(&m, &Policy::lowest(6), 12345).unwrap();
        let (p2, t2) = random_facet_blackwell(&m, &Policy::lowest(6), 12345).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(t1, t2);
        let (_, t3) = random_facet_blackwell(&m, &Policy::lowest(6), 54321).unwrap();
        assert!(t1 != t3 || t1.len() == 1);
    }

    #[test]
    fn result_has_no_improving_pair() {
        let m = instances::fig1b();
        for seed in [0u64, 9, 77] {
            let (policy, _) = random_facet_blackwell(&m, &Policy::lowest(6), seed).unwrap();
            assert!(improving_pairs(&m, &policy).is_empty());
        }
    }
}
