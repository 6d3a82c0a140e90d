//! Score-function policy-gradient calibration.
//!
//! Each iteration interacts once with the physical system, summarizes the
//! observed sequence (raw, or adjacent differences for the preprocessed
//! variant) into features, samples a batch of candidate parameters from
//! the Gaussian policy, scores each candidate by the MSTE of its digital
//! rollout against the physical one under shared noise, and ascends the
//! reward-weighted log-density gradient.

use std::time::Instant;

use crate::config::{ExperimentConfig, Method};
use crate::env::ParametricEnvironment;
use crate::error::{Error, Result};
use crate::estimators::features;
use crate::estimators::gaussian_policy::{GaussianParameterPolicy, PARAM_FLOOR};
use crate::harness::{rollout, RunRecord};
use crate::metrics::{delta_preprocess, mste, param_mse};
use crate::rng::{SeedStream, StreamRole};
use crate::strategy::HungarianStrategy;
use crate::types::ParamVector;

/// One scored candidate draw.
#[derive(Debug, Clone)]
pub struct RewardRecord {
    /// The candidate parameters the digital rollout used.
    pub theta: ParamVector,
    /// MSTE of the rollout pair that produced it.
    pub cost: f64,
    /// Negative cost.
    pub reward: f64,
    /// Log-density gradient at the raw draw, flat policy layout.
    pub score: Vec<f64>,
}

/// Reward-weighted score ascent over one batch.
///
/// Rewards are centered on the batch mean and scaled by the batch standard
/// deviation, so the step size is independent of the raw MSTE magnitude
/// (which grows with horizon and state scale). A single-record batch uses
/// its raw reward; a batch of identical rewards moves nothing.
pub fn pg_update(
    policy: &mut GaussianParameterPolicy,
    batch: &[RewardRecord],
    alpha: f64,
) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::invalid("policy update needs a non-empty batch"));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::invalid("step size must be finite and non-negative"));
    }
    for record in batch {
        if record.score.len() != policy.param_count() {
            return Err(Error::invalid("score length does not match policy parameters"));
        }
    }

    let k = batch.len();
    let weights: Vec<f64> = if k == 1 {
        vec![batch[0].reward]
    } else {
        let rewards: Vec<f64> = batch.iter().map(|r| r.reward).collect();
        let lo = rewards.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = rewards.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            // No spread, no information: exactly zero update.
            vec![0.0; k]
        } else {
            let mean = rewards.iter().sum::<f64>() / k as f64;
            let var = rewards.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / k as f64;
            let scale = var.sqrt();
            rewards.iter().map(|r| (r - mean) / scale).collect()
        }
    };

    let mut direction = vec![0.0; policy.param_count()];
    for (record, w) in batch.iter().zip(&weights) {
        if *w == 0.0 {
            continue;
        }
        for (d, s) in direction.iter_mut().zip(&record.score) {
            *d += w * s;
        }
    }
    policy.apply_step(&direction, alpha);
    Ok(())
}

/// Runs the pgfp or pg estimator and returns one record per policy update.
pub fn run_pg_estimator(
    cfg: &ExperimentConfig,
    physical: &mut dyn ParametricEnvironment,
    digital: &mut dyn ParametricEnvironment,
    strategy: &HungarianStrategy,
    true_params: &ParamVector,
) -> Result<Vec<RunRecord>> {
    if !cfg.method.is_policy_gradient() {
        return Err(Error::invalid(format!(
            "{} is not a policy-gradient method",
            cfg.method
        )));
    }
    let feature_dim = 4 * physical.state_dim();
    let mut init_stream = SeedStream::for_role(cfg.seed, 0, 0, StreamRole::PolicySampling);
    let mut policy =
        GaussianParameterPolicy::new(feature_dim, 2, &cfg.policy, &mut init_stream)?;
    let mut alpha = cfg.learning_rate;
    let mut records: Vec<RunRecord> = Vec::with_capacity(cfg.iterations as usize);

    for iteration in 1..=cfg.iterations {
        let started = Instant::now();
        let env_stream =
            SeedStream::for_role(cfg.seed, iteration as u64, 0, StreamRole::EnvironmentNoise);
        let mut sample_stream =
            SeedStream::for_role(cfg.seed, iteration as u64, 0, StreamRole::PolicySampling);

        let physical_traj = rollout(physical, strategy, cfg.horizon, env_stream)?;
        let feats = match cfg.method {
            Method::Pgfp => features(delta_preprocess(&physical_traj)?.deltas())?,
            _ => features(physical_traj.states())?,
        };

        // Candidates are drawn in antithetic pairs mirrored about the
        // policy mean: the even (curvature) part of the cost cancels within
        // a pair, which strips most sampling noise from the mean-path
        // gradient and lets updates quiet down as the mean locks in.
        let mean = policy.mean_params(&feats)?;
        let mut draws: Vec<Vec<f64>> = Vec::with_capacity(cfg.batch_size as usize);
        while draws.len() < cfg.batch_size as usize {
            let sample = policy.sample(&feats, &mut sample_stream)?;
            let mirrored: Vec<f64> = sample
                .draw
                .iter()
                .zip(mean.values())
                .map(|(z, m)| 2.0 * m - z)
                .collect();
            draws.push(sample.draw);
            if draws.len() < cfg.batch_size as usize {
                draws.push(mirrored);
            }
        }

        let mut batch = Vec::with_capacity(cfg.batch_size as usize);
        for draw in draws {
            let theta = ParamVector::new(draw.iter().map(|z| z.max(PARAM_FLOOR)).collect())?;
            digital.set_params(&theta)?;
            // The digital rollout replays the physical rollout's stream.
            let digital_traj = rollout(digital, strategy, cfg.horizon, env_stream)?;
            let cost = mste(&physical_traj, &digital_traj)?;
            let score = policy.log_density_grad(&feats, &draw)?;
            batch.push(RewardRecord {
                theta,
                cost,
                reward: -cost,
                score,
            });
        }

        pg_update(&mut policy, &batch, alpha)?;
        // Exploration stays wide while the mean finds the basin; the
        // stddev schedule only tightens the second half of the run.
        if iteration > cfg.iterations / 2 {
            policy.anneal_sigma();
        }
        alpha *= cfg.lr_decay;

        // The reported estimate is a Polyak-style running average of the
        // per-iteration policy means: same trend, less sampling jitter.
        let mu = policy.mean_params(&feats)?;
        let prediction = match records.last() {
            Some(prev) => average_step(&prev.prediction, &mu)?,
            None => mu,
        };
        let mean_mste = batch.iter().map(|r| r.cost).sum::<f64>() / batch.len() as f64;
        records.push(RunRecord {
            method: cfg.method,
            seed: cfg.seed,
            iteration,
            param_mse: param_mse(&prediction, true_params)?,
            prediction,
            mean_mste,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        });
    }

    Ok(records)
}

/// Exponential moving average with a fixed smoothing factor.
fn average_step(previous: &ParamVector, current: &ParamVector) -> Result<ParamVector> {
    const SMOOTHING: f64 = 0.15;
    ParamVector::new(
        previous
            .values()
            .iter()
            .zip(current.values())
            .map(|(p, c)| (1.0 - SMOOTHING) * p + SMOOTHING * c)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PolicyConfig;

    fn policy() -> GaussianParameterPolicy {
        let cfg = PolicyConfig {
            hidden_dim: 4,
            ..PolicyConfig::default()
        };
        let mut stream = SeedStream::new(1, 0);
        GaussianParameterPolicy::new(3, 2, &cfg, &mut stream).unwrap()
    }

    fn record(policy: &GaussianParameterPolicy, reward: f64, draw: &[f64]) -> RewardRecord {
        let feats = [0.1, 0.2, 0.3];
        RewardRecord {
            theta: ParamVector::new(draw.iter().map(|z| z.max(1e-3)).collect()).unwrap(),
            cost: -reward,
            reward,
            score: policy.log_density_grad(&feats, draw).unwrap(),
        }
    }

    #[test]
    fn equal_rewards_leave_the_policy_untouched() {
        let mut p = policy();
        let before = p.params().to_vec();
        let batch = vec![
            record(&p, -3.5, &[0.4, 0.9]),
            record(&p, -3.5, &[0.1, 0.4]),
            record(&p, -3.5, &[0.9, 0.2]),
        ];
        pg_update(&mut p, &batch, 0.05).unwrap();
        assert_eq!(p.params(), &before[..]);
    }

    #[test]
    fn zero_step_size_leaves_the_policy_untouched() {
        let mut p = policy();
        let before = p.params().to_vec();
        let batch = vec![record(&p, -1.0, &[0.4, 0.9]), record(&p, -2.0, &[0.1, 0.4])];
        pg_update(&mut p, &batch, 0.0).unwrap();
        assert_eq!(p.params(), &before[..]);
    }

    #[test]
    fn single_record_uses_the_raw_reward() {
        let mut p = policy();
        let before = p.params().to_vec();
        let rec = record(&p, -2.0, &[0.4, 0.9]);
        // Small enough step that the clip stays inactive.
        let alpha = 1e-4;
        let expected: Vec<f64> = before
            .iter()
            .zip(&rec.score)
            .map(|(v, s)| v + alpha * rec.reward * s)
            .collect();
        pg_update(&mut p, &[rec], alpha).unwrap();
        // log-sigma entries are re-clamped after the step.
        let n = p.param_count();
        for (i, (got, want)) in p.params().iter().zip(&expected).enumerate() {
            if i < n - 2 {
                assert!(
                    (got - want).abs() < 1e-15,
                    "param {i}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn empty_batch_is_rejected() {
        let mut p = policy();
        assert!(pg_update(&mut p, &[], 0.1).is_err());
    }
}
