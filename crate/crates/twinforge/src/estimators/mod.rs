//! The four calibration methods.
//!
//! Two families share one interface: a policy-gradient estimator
//! ([`pg::run_pg_estimator`]) trains a Gaussian sampler over candidate
//! parameters, and a genetic algorithm ([`ga::run_ga_estimator`]) evolves a
//! population of them. Each family runs with or without adjacent-difference
//! preprocessing, giving the pgfp/pg/gafp/ga benchmark matrix.

pub mod ga;
pub mod gaussian_policy;
pub mod pg;

pub use ga::{evaluate_population, ga_generation, init_members, reproduce, run_ga_estimator, GaPopulation};
pub use gaussian_policy::{GaussianParameterPolicy, PolicySample};
pub use pg::{pg_update, run_pg_estimator, RewardRecord};

use crate::error::{Error, Result};
use crate::types::StateVector;

/// Fixed-length summary of a state or delta sequence: the per-dimension
/// mean, population standard deviation, minimum and maximum, laid out as
/// `[means.., stds.., mins.., maxs..]` (4 x dim entries).
pub fn features(sequence: &[StateVector]) -> Result<Vec<f64>> {
    let n = sequence.len();
    if n == 0 {
        return Err(Error::invalid("cannot summarize an empty sequence"));
    }
    let dim = sequence[0].dim();
    let mut means = vec![0.0; dim];
    let mut mins = vec![f64::INFINITY; dim];
    let mut maxs = vec![f64::NEG_INFINITY; dim];
    for state in sequence {
        for (d, &v) in state.values().iter().enumerate() {
            means[d] += v;
            if v < mins[d] {
                mins[d] = v;
            }
            if v > maxs[d] {
                maxs[d] = v;
            }
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let mut stds = vec![0.0; dim];
    for state in sequence {
        for (d, &v) in state.values().iter().enumerate() {
            let diff = v - means[d];
            stds[d] += diff * diff;
        }
    }
    for s in &mut stds {
        *s = (*s / n as f64).sqrt();
    }

    let mut out = Vec::with_capacity(4 * dim);
    out.extend_from_slice(&means);
    out.extend_from_slice(&stds);
    out.extend_from_slice(&mins);
    out.extend_from_slice(&maxs);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(rows: &[&[f64]]) -> Vec<StateVector> {
        rows.iter()
            .map(|r| StateVector::new(r.to_vec()).unwrap())
            .collect()
    }

    #[test]
    fn features_of_a_scalar_sequence() {
        let f = features(&seq(&[&[2.0], &[3.0]])).unwrap();
        assert_eq!(f, vec![2.5, 0.5, 2.0, 3.0]);
    }

    #[test]
    fn features_of_a_constant_sequence() {
        let f = features(&seq(&[&[4.0, -1.0], &[4.0, -1.0], &[4.0, -1.0]])).unwrap();
        assert_eq!(f, vec![4.0, -1.0, 0.0, 0.0, 4.0, -1.0, 4.0, -1.0]);
    }

    #[test]
    fn feature_length_is_four_per_dimension() {
        let f = features(&seq(&[&[1.0, 2.0, 3.0]])).unwrap();
        assert_eq!(f.len(), 12);
        assert!(features(&[]).is_err());
    }
}
