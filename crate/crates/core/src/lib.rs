//! Exact computation of Blackwell-optimal policies for finite MDPs.
//!
//! The discount factor is kept symbolic: policy values and action values
//! are rational functions of γ with exact rational coefficients, compared
//! in the left-neighbourhood of 1 (μ-ordering). On top of that ordering
//! sit six planners (Howard, Max-Gain, Batch-Switching and
//! Randomized-Simple policy iteration, Random-Facet, and a two-phase
//! Bellman-Ford solver for deterministic MDPs), a Laurent-series
//! cross-check, a brute-force enumeration oracle, and threshold
//! computations certifying where the Blackwell regime begins.

pub mod rational;
pub mod poly;
pub mod ratfun;
mod intpoly;
pub mod roots;
pub mod mdp;
pub mod symbolic;
pub mod planners;
pub mod random_facet;
pub mod detmdp;
pub mod laurent;
pub mod instances;





