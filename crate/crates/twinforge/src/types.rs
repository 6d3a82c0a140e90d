//! Shared value types: states, actions, parameters and trajectories.
//!
//! All are immutable once constructed and reject non-finite entries, so
//! NaN/Inf cannot propagate silently through rollouts or metrics.

use crate::error::{Error, Result};

fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("{what} contains non-finite entry {v}")));
    }
    Ok(())
}

/// One observed system state: turret `(azimuth, pitch)` pairs in radians
/// followed by boss `(x, y, z)` positions in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    values: Vec<f64>,
}

impl StateVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        ensure_finite(&values, "state vector")?;
        Ok(StateVector { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Commanded turret angles, one `(azimuth, pitch)` pair per turret, radians.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionVector {
    values: Vec<f64>,
}

impl ActionVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        ensure_finite(&values, "action vector")?;
        Ok(ActionVector { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Environment dynamics parameters. For the tower-defense world this is the
/// pair of turret slew-rate limits `[azimuth, pitch]` in radians per step.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
}

impl ParamVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        ensure_finite(&values, "parameter vector")?;
        Ok(ParamVector { values })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn all_positive(&self) -> bool {
        self.values.iter().all(|v| *v > 0.0)
    }
}

/// A fixed-length sequence of states produced by one closed-loop rollout.
/// The initial state is element 0, so a horizon-N trajectory holds N states
/// and N-1 transitions.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    states: Vec<StateVector>,
}

impl Trajectory {
    pub fn new(states: Vec<StateVector>) -> Result<Self> {
        if let Some(first) = states.first() {
            let dim = first.dim();
            if states.iter().any(|s| s.dim() != dim) {
                return Err(Error::invalid("trajectory states must share one dimension"));
            }
        }
        Ok(Trajectory { states })
    }

    pub fn empty() -> Self {
        Trajectory { states: Vec::new() }
    }

    /// Appends a state, enforcing the uniform-dimension invariant.
    pub fn push(&mut self, state: StateVector) -> Result<()> {
        if let Some(first) = self.states.first() {
            if state.dim() != first.dim() {
                return Err(Error::invalid(format!(
                    "state dim {} does not match trajectory dim {}",
                    state.dim(),
                    first.dim()
                )));
            }
        }
        self.states.push(state);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// State dimension, or 0 for an empty trajectory.
    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, |s| s.dim())
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_reject_non_finite_entries() {
        assert!(StateVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(StateVector::new(vec![f64::INFINITY]).is_err());
        assert!(ActionVector::new(vec![f64::NEG_INFINITY]).is_err());
        assert!(ParamVector::new(vec![0.2, f64::NAN]).is_err());
        assert!(StateVector::new(vec![]).is_ok());
    }

    #[test]
    fn trajectory_enforces_uniform_dimension() {
        let a = StateVector::new(vec![1.0, 2.0]).unwrap();
        let b = StateVector::new(vec![3.0]).unwrap();
        assert!(Trajectory::new(vec![a.clone(), b.clone()]).is_err());

        let mut t = Trajectory::empty();
        t.push(a).unwrap();
        assert!(t.push(b).is_err());
        assert_eq!(t.len(), 1);
        assert_eq!(t.dim(), 2);
    }

    #[test]
    fn param_positivity_check() {
        let p = ParamVector::new(vec![0.2, 0.7]).unwrap();
        assert!(p.all_positive());
        let q = ParamVector::new(vec![0.2, 0.0]).unwrap();
        assert!(!q.all_positive());
    }
}
