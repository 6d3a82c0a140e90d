//! Twin-fidelity metrics and trajectory preprocessing.
//!
//! `mste` is the calibration objective: the sum over a paired rollout of
//! the per-step Euclidean distance between physical and digital states.
//! It is a sum, not a mean — no normalization by the horizon is applied.

use crate::error::{Error, Result};
use crate::types::{StateVector, Trajectory};

/// Adjacent-state differences of a trajectory: element `i` is
/// `states[i+1] - states[i]`, so a length-N source yields N-1 deltas.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaSequence {
    deltas: Vec<StateVector>,
}

impl DeltaSequence {
    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.deltas.first().map_or(0, |d| d.dim())
    }

    pub fn deltas(&self) -> &[StateVector] {
        &self.deltas
    }
}

/// Replaces a state sequence with its adjacent differences.
pub fn delta_preprocess(trajectory: &Trajectory) -> Result<DeltaSequence> {
    if trajectory.is_empty() {
        return Err(Error::invalid("cannot preprocess an empty trajectory"));
    }
    let states = trajectory.states();
    let deltas = states
        .windows(2)
        .map(|w| {
            let values = w[1]
                .values()
                .iter()
                .zip(w[0].values())
                .map(|(next, prev)| next - prev)
                .collect();
            // Differences of finite values are finite.
            StateVector::new(values).expect("delta of finite states is finite")
        })
        .collect();
    Ok(DeltaSequence { deltas })
}

fn sum_step_norms(a: &[StateVector], b: &[StateVector], what: &str) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "{what} lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut total = 0.0;
    for (x, y) in a.iter().zip(b) {
        if x.dim() != y.dim() {
            return Err(Error::invalid(format!(
                "{what} dims differ: {} vs {}",
                x.dim(),
                y.dim()
            )));
        }
        let sq: f64 = x
            .values()
            .iter()
            .zip(y.values())
            .map(|(p, q)| (p - q) * (p - q))
            .sum();
        total += sq.sqrt();
    }
    Ok(total)
}

/// Summed per-step Euclidean state error between two equal-length
/// trajectories. Zero iff the trajectories are identical.
pub fn mste(physical: &Trajectory, digital: &Trajectory) -> Result<f64> {
    sum_step_norms(physical.states(), digital.states(), "trajectory")
}

/// `mste` over delta sequences, used when fitness is scored on
/// preprocessed rollouts.
pub fn mste_deltas(physical: &DeltaSequence, digital: &DeltaSequence) -> Result<f64> {
    sum_step_norms(physical.deltas(), digital.deltas(), "delta sequence")
}

/// Mean squared error between a predicted and a reference parameter vector.
pub fn param_mse(predicted: &crate::types::ParamVector, truth: &crate::types::ParamVector) -> Result<f64> {
    if predicted.dim() != truth.dim() {
        return Err(Error::invalid(format!(
            "parameter dims differ: {} vs {}",
            predicted.dim(),
            truth.dim()
        )));
    }
    if predicted.dim() == 0 {
        return Err(Error::invalid("parameter vectors must be non-empty"));
    }
    let sum: f64 = predicted
        .values()
        .iter()
        .zip(truth.values())
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(sum / predicted.dim() as f64)
}
