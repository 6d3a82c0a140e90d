//! Digital-twin calibration and evaluation toolkit.
//!
//! A "physical" system with hidden dynamics parameters is observed only
//! through closed-loop interaction; a tunable "digital" replica of the same
//! system is searched for the parameter vector that makes both respond
//! identically to the same control strategy. Twin fidelity is scored with
//! the MSTE metric (the summed per-step state error between paired
//! rollouts), and four calibration methods are provided: a score-function
//! policy-gradient estimator and a real-coded genetic algorithm, each with
//! or without adjacent-state-difference preprocessing.
//!
//! The reference system is a small tower-defense world: stochastic bosses
//! move through a 3D box while rate-limited turrets track them under a
//! Hungarian target-assignment strategy. The hidden parameters are the two
//! turret slew-rate limits.
//!
//! Crate layout:
//! - [`types`], [`rng`], [`config`], [`error`] — shared value types,
//!   deterministic random streams, experiment configuration.
//! - [`env`] — the parametric environment abstraction and the
//!   tower-defense instantiation, including the opaque physical handle.
//! - [`strategy`] — the fixed control strategy (Hungarian assignment plus
//!   angle tracking).
//! - [`metrics`] — MSTE, parameter MSE and trajectory preprocessing.
//! - [`estimators`] — the four calibration methods.
//! - [`harness`] — paired rollouts, benchmark orchestration, run records.

// Validation guards are written as `!(x > 0.0)` on purpose: the negation
// rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod env;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod metrics;
pub mod rng;
pub mod strategy;
pub mod types;

pub use error::{Error, Result};
