//! Stochastic combinatorial multi-armed bandits with probabilistically
//! triggered arms.
//!
//! The crate provides the arm model, built-in environments (classical MAB,
//! probabilistic maximum coverage, linear rewards, influence maximization
//! under independent cascade), approximation oracles, the CUCB family of
//! policies, regret-bound evaluators, and an experiment harness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod arm_model;
pub mod combin;
pub mod environments;
pub mod error;
pub mod harness;
pub mod oracles;
pub mod policies;
pub mod rng;

pub use error::{CmabError, Result};
