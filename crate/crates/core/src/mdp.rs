//! MDP data model, validation, policies and the exact JSON file format.
//!
//! Transition probabilities and rewards are exact rationals; the parser
//! rejects float literals outright. Rewards may be given per action or per
//! successor edge; edge rewards are folded into the mean
//! R(s,a) = Σ_s' T(s,a,s')·r(s,a,s') at load time.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::rational::{format_rational, Rational};

/// One action at one state: sparse transition row plus mean reward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdpAction {
    pub label: Option<String>,
    /// (successor, probability), successors strictly increasing.
    pub transitions: Vec<(usize, Rational)>,
    pub reward: Rational,
}

impl MdpAction {
    pub fn new(transitions: Vec<(usize, Rational)>, reward: Rational) -> Self {
        MdpAction {
            label: None,
            transitions,
            reward,
        }
    }

    /// Deterministic edge: one successor with probability 1.
    pub fn edge(to: usize, reward: Rational) -> Self {
        MdpAction::new(vec![(to, Rational::one())], reward)
    }

    pub fn labelled(mut self, label: &str) -> Self {
        self.label = Some(label.to_string());
        self
    }
}

/// Finite MDP: per-state action lists over exact rational data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mdp {
    states: Vec<Vec<MdpAction>>,
}

/// One action index per state, 0-based within that state's action list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Policy(pub Vec<usize>);

impl Policy {
    pub fn action(&self, s: usize) -> usize {
        self.0[s]
    }

    /// Lowest-index action everywhere: the default starting policy.
    pub fn lowest(n: usize) -> Policy {
        Policy(vec![0; n])
    }

    pub fn to_json(&self) -> Value {
        json!({ "policy": self.0 })
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}]",
            self.0
                .iter()
                .map(|a| a.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// A named invariant violation at some (state, action).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub state: usize,
    pub action: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.action {
            Some(a) => write!(f, "state {} action {}: {}", self.state, a, self.message),
            None => write!(f, "state {}: {}", self.state, self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum MdpParseError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Structure(String),
    #[error("state {state} action {action}: {message}")]
    Action {
        state: usize,
        action: usize,
        message: String,
    },
}

impl Mdp {
    pub fn new(states: Vec<Vec<MdpAction>>) -> Self {
        Mdp { states }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self, s: usize) -> usize {
        self.states[s].len()
    }

    pub fn action_data(&self, s: usize, a: usize) -> &MdpAction {
        &self.states[s][a]
    }

    pub fn reward(&self, s: usize, a: usize) -> &Rational {
        &self.states[s][a].reward
    }

    pub fn transitions(&self, s: usize, a: usize) -> &[(usize, Rational)] {
        &self.states[s][a].transitions
    }

    /// All (state, action) pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.states
            .iter()
            .enumerate()
            .flat_map(|(s, acts)| (0..acts.len()).map(move |a| (s, a)))
    }

    /// Number of deterministic policies, saturating at u128::MAX.
    pub fn policy_count(&self) -> u128 {
        self.states
            .iter()
            .fold(1u128, |acc, acts| acc.saturating_mul(acts.len() as u128))
    }

    pub fn is_valid_policy(&self, policy: &Policy) -> bool {
        policy.0.len() == self.num_states()
            && policy
                .0
                .iter()
                .enumerate()
                .all(|(s, &a)| a < self.num_actions(s))
    }

    /// Checks every model invariant; Ok(()) or the full list of violations.
    pub fn validate(&self) -> Result<(), Vec<Diagnostic>> {
        let mut out = Vec::new();
        let n = self.num_states();
        if n == 0 {
            out.push(Diagnostic {
                state: 0,
                action: None,
                message: "MDP has no states".to_string(),
            });
        }
        for (s, actions) in self.states.iter().enumerate() {
            if actions.is_empty() {
                out.push(Diagnostic {
                    state: s,
                    action: None,
                    message: "state has no actions".to_string(),
                });
            }
            for (a, act) in actions.iter().enumerate() {
                let mut sum = Rational::zero();
                let mut last: Option<usize> = None;
                for (to, p) in &act.transitions {
                    if *to >= n {
                        out.push(Diagnostic {
                            state: s,
                            action: Some(a),
                            message: format!("successor {to} out of range"),
                        });
                    }
                    if last.map(|prev| *to <= prev).unwrap_or(false) {
                        out.push(Diagnostic {
                            state: s,
                            action: Some(a),
                            message: format!("duplicate or unsorted successor {to}"),
                        });
                    }
                    last = Some(*to);
                    if p.is_negative() || p > &Rational::one() {
                        out.push(Diagnostic {
                            state: s,
                            action: Some(a),
                            message: format!("probability {} outside [0,1]", format_rational(p)),
                        });
                    }
                    sum += p;
                }
                if !sum.is_one() {
                    out.push(Diagnostic {
                        state: s,
                        action: Some(a),
                        message: format!("row sum {} != 1", format_rational(&sum)),
                    });
                }
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    /// True iff every transition row puts all mass on a single successor.
    pub fn is_deterministic(&self) -> bool {
        self.states.iter().all(|actions| {
            actions
                .iter()
                .all(|act| act.transitions.len() == 1 && act.transitions[0].1.is_one())
        })
    }

    /// The single successor of (s, a) in a deterministic MDP.
    pub fn successor(&self, s: usize, a: usize) -> Option<usize> {
        let tr = &self.states[s][a].transitions;
        (tr.len() == 1 && tr[0].1.is_one()).then(|| tr[0].0)
    }

    /// Dense P^π and r^π for a policy.
    pub fn transition_matrix(&self, policy: &Policy) -> (Vec<Vec<Rational>>, Vec<Rational>) {
        assert!(self.is_valid_policy(policy), "policy invalid for this MDP");
        let n = self.num_states();
        let mut matrix = vec![vec![Rational::zero(); n]; n];
        let mut rewards = Vec::with_capacity(n);
        for s in 0..n {
            let act = &self.states[s][policy.action(s)];
            for (to, p) in &act.transitions {
                matrix[s][*to] = p.clone();
            }
            rewards.push(act.reward.clone());
        }
        (matrix, rewards)
    }

    /// Dense row T(s,a,·).
    pub fn transition_row(&self, s: usize, a: usize) -> Vec<Rational> {
        let mut row = vec![Rational::zero(); self.num_states()];
        for (to, p) in &self.states[s][a].transitions {
            row[*to] = p.clone();
        }
        row
    }

    pub fn to_json(&self) -> Value {
        let states: Vec<Value> = self
            .states
            .iter()
            .map(|actions| {
                let acts: Vec<Value> = actions
                    .iter()
                    .map(|act| {
                        let mut obj = Map::new();
                        if let Some(label) = &act.label {
                            obj.insert("label".to_string(), Value::String(label.clone()));
                        }
                        obj.insert(
                            "transitions".to_string(),
                            Value::Array(
                                act.transitions
                                    .iter()
                                    .map(|(to, p)| json!({ "to": to, "p": format_rational(p) }))
                                    .collect(),
                            ),
                        );
                        obj.insert(
                            "reward".to_string(),
                            Value::String(format_rational(&act.reward)),
                        );
                        Value::Object(obj)
                    })
                    .collect();
                json!({ "actions": acts })
            })
            .collect();
        json!({ "n": self.num_states(), "states": states })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("MDP serialization")
    }

    pub fn from_json_str(text: &str) -> Result<Mdp, MdpParseError> {
        let v: Value = serde_json::from_str(text)?;
        Mdp::from_json(&v)
    }

    pub fn from_json(v: &Value) -> Result<Mdp, MdpParseError> {
        let n = v
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| MdpParseError::Structure("missing integer field `n`".into()))?
            as usize;
        let states_json = v
            .get("states")
            .and_then(Value::as_array)
            .ok_or_else(|| MdpParseError::Structure("missing array field `states`".into()))?;
        if states_json.len() != n {
            return Err(MdpParseError::Structure(format!(
                "`n` is {n} but `states` has {} entries",
                states_json.len()
            )));
        }
        let mut states = Vec::with_capacity(n);
        for (s, sv) in states_json.iter().enumerate() {
            let actions_json = sv.get("actions").and_then(Value::as_array).ok_or_else(|| {
                MdpParseError::Structure(format!("state {s}: missing array field `actions`"))
            })?;
            let mut actions = Vec::with_capacity(actions_json.len());
            for (a, av) in actions_json.iter().enumerate() {
                actions.push(parse_action(s, a, av)?);
            }
            states.push(actions);
        }
        Ok(Mdp { states })
    }
}

fn parse_action(s: usize, a: usize, v: &Value) -> Result<MdpAction, MdpParseError> {
    let err = |message: String| MdpParseError::Action {
        state: s,
        action: a,
        message,
    };
    let label = match v.get("label") {
        None => None,
        Some(Value::String(l)) => Some(l.clone()),
        Some(other) => return Err(err(format!("label must be a string, got {other}"))),
    };
    let trans_json = v
        .get("transitions")
        .and_then(Value::as_array)
        .ok_or_else(|| err("missing array field `transitions`".into()))?;
    if trans_json.is_empty() {
        return Err(err("empty transition list".into()));
    }
    let mut transitions = Vec::with_capacity(trans_json.len());
    for tv in trans_json {
        let to = tv
            .get("to")
            .and_then(Value::as_u64)
            .ok_or_else(|| err("transition missing integer `to`".into()))? as usize;
        let p = tv
            .get("p")
            .ok_or_else(|| err("transition missing `p`".into()))
            .and_then(|pv| crate::ratfun::parse_coeff(pv).map_err(&err))?;
        transitions.push((to, p));
    }
    transitions.sort_by_key(|(to, _)| *to);
    for w in transitions.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(err(format!("duplicate successor {}", w[0].0)));
        }
    }

    let reward = match (v.get("reward"), v.get("rewards")) {
        (Some(_), Some(_)) => {
            return Err(err("give either `reward` or `rewards`, not both".into()))
        }
        (Some(rv), None) => crate::ratfun::parse_coeff(rv).map_err(err)?,
        (None, Some(Value::Array(edges))) => {
            // fold per-successor rewards into the mean: Σ T(s,a,s')·r(s,a,s')
            let mut mean = Rational::zero();
            for ev in edges {
                let to = ev
                    .get("to")
                    .and_then(Value::as_u64)
                    .ok_or_else(|| err("edge reward missing integer `to`".into()))?
                    as usize;
                let r = ev
                    .get("r")
                    .ok_or_else(|| err("edge reward missing `r`".into()))
                    .and_then(|rv| crate::ratfun::parse_coeff(rv).map_err(&err))?;
                let p = transitions
                    .iter()
                    .find(|(t, _)| *t == to)
                    .map(|(_, p)| p.clone())
                    .ok_or_else(|| err(format!("edge reward for non-successor {to}")))?;
                mean += p * r;
            }
            mean
        }
        (None, Some(other)) => return Err(err(format!("`rewards` must be an array, got {other}"))),
        (None, None) => return Err(err("missing `reward` (or `rewards`)".into())),
    };

    Ok(MdpAction {
        label,
        transitions,
        reward,
    })
}

/// Parses `{"policy":[...]}`.
pub fn policy_from_json_str(text: &str) -> Result<Policy, MdpParseError> {
    let v: Value = serde_json::from_str(text)?;
    let arr = v
        .get("policy")
        .and_then(Value::as_array)
        .ok_or_else(|| MdpParseError::Structure("missing array field `policy`".into()))?;
    let mut out = Vec::with_capacity(arr.len());
    for e in arr {
        let a = e.as_u64().ok_or_else(|| {
            MdpParseError::Structure(format!("policy entries must be integers, got {e}"))
        })?;
        out.push(a as usize);
    }
    Ok(Policy(out))
}
