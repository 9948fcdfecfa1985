//! Finite-state, finite-action inverse reinforcement learning.
//!
//! The crate computes the feature rows `F_ai = (P_{a1}(i) - P_a(i)) (I - γ P_{a1})^{-1}`
//! whose inner products with a state reward encode Bellman optimality of the
//! declared action `a1`, and builds on them:
//!
//! - [`mdp`]: transition models, norms, the discounted resolvent, policy
//!   evaluation and a value-iteration oracle.
//! - [`linprog`]: a dense two-phase primal simplex with Bland's rule.
//! - [`solvers`]: the L1 hard-margin reward recovery, the Ng–Russell linear
//!   program, the three-regime classifier and the separability certificate.
//! - [`estimation`]: trajectory simulation, maximum-likelihood transition
//!   estimates and closed-form sample-complexity bounds.
//! - [`generate`]: random MDP generators and separable-instance curation.
//!
//! Everything here is `no_std` (with `alloc`); file formats, the experiment
//! harness and the CLI live in the companion `irl` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod estimation;
pub mod generate;
pub mod linprog;
pub mod matrix;
pub mod mdp;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use mdp::{FeatureRows, Mdp, Provenance, RewardVector, RowLabel, TransitionModel, ValueVector};
