//! Experiment orchestration: closed-loop rollouts, the method x seed
//! benchmark matrix, and run records.
//!
//! Fairness rests on two stream rules. First, a physical rollout's stream
//! is derived from `(seed, iteration)` only, so every method sees
//! bit-identical physical behavior for a given seed. Second, each digital
//! rollout replays a copy of the paired physical stream (common random
//! numbers), so trajectory differences reflect parameter differences, not
//! noise.

use crate::config::{ExperimentConfig, Method};
use crate::env::{ParametricEnvironment, PhysicalHandle, TowerEnv};
use crate::error::{Error, Result};
use crate::estimators::{run_ga_estimator, run_pg_estimator};
use crate::rng::SeedStream;
use crate::strategy::HungarianStrategy;
use crate::types::{ParamVector, Trajectory};

/// One logged estimator iteration.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub method: Method,
    pub seed: u64,
    /// 1-based iteration index.
    pub iteration: u32,
    /// The method's current point estimate of the parameters.
    pub prediction: ParamVector,
    /// Mean cost of the iteration's candidate evaluations.
    pub mean_mste: f64,
    /// Mean squared error between `prediction` and the true parameters.
    pub param_mse: f64,
    /// Wall-clock duration of the iteration. The only nondeterministic
    /// field in a record.
    pub wall_ms: f64,
}

/// All records of one method on one seed.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub method: Method,
    pub seed: u64,
    pub records: Vec<RunRecord>,
}

impl MethodRun {
    pub fn final_record(&self) -> Option<&RunRecord> {
        self.records.last()
    }
}

/// Per-method aggregate over the benchmark's seeds.
#[derive(Debug, Clone)]
pub struct MethodSummary {
    pub method: Method,
    pub seeds: usize,
    pub final_param_mse_mean: f64,
    pub final_param_mse_std: f64,
    /// Coordinate-wise mean of the final predictions.
    pub mean_final_prediction: Vec<f64>,
}

/// One claimed ordering between two methods on mean final parameter MSE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderingVerdict {
    pub better: Method,
    pub worse: Method,
    pub holds: bool,
}

/// The benchmark's headline comparisons. Fields are `None` when the
/// methods involved were not part of the run.
#[derive(Debug, Clone)]
pub struct Verdicts {
    /// pgfp has the lowest mean final parameter MSE of all methods run.
    pub pgfp_beats_all: Option<bool>,
    /// Both preprocessed variants beat their raw counterparts.
    pub fp_beats_nofp: Option<bool>,
    pub pairwise: Vec<OrderingVerdict>,
}

/// Full benchmark output.
#[derive(Debug, Clone)]
pub struct BenchmarkResult {
    pub runs: Vec<MethodRun>,
    pub summaries: Vec<MethodSummary>,
    pub verdicts: Verdicts,
}

/// The benchmark matrix: one experiment configuration fanned out over
/// methods and seeds.
#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub experiment: ExperimentConfig,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
}

/// One closed-loop rollout: reset, then `horizon - 1` steps, each action
/// computed by the strategy from the environment's own current state.
pub fn rollout(
    env: &mut dyn ParametricEnvironment,
    strategy: &HungarianStrategy,
    horizon: u32,
    mut stream: SeedStream,
) -> Result<Trajectory> {
    if horizon == 0 {
        return Err(Error::invalid("rollout horizon must be at least 1"));
    }
    let mut trajectory = Trajectory::empty();
    let mut state = env.reset(&mut stream);
    trajectory.push(state.clone())?;
    for _ in 1..horizon {
        let action = strategy.act(&state, &env.live_targets())?;
        state = env.step(&action, &mut stream)?;
        trajectory.push(state.clone())?;
    }
    Ok(trajectory)
}

/// Rolls the same strategy out against both environments under one shared
/// stream value: identical initial states and identical noise draws at equal
/// step indices. Both loops are closed independently.
pub fn rollout_pair(
    physical: &mut dyn ParametricEnvironment,
    digital: &mut dyn ParametricEnvironment,
    strategy: &HungarianStrategy,
    horizon: u32,
    stream: SeedStream,
) -> Result<(Trajectory, Trajectory)> {
    let physical_traj = rollout(physical, strategy, horizon, stream)?;
    let digital_traj = rollout(digital, strategy, horizon, stream)?;
    Ok((physical_traj, digital_traj))
}

/// Builds the physical and digital instances for a configuration and runs
/// its method. The digital instance starts at neutral parameters, never at
/// the hidden true ones.
pub fn run_method(cfg: &ExperimentConfig) -> Result<MethodRun> {
    cfg.validate()?;
    let true_params = ParamVector::new(cfg.env.true_params.to_vec())?;
    let mut physical = PhysicalHandle::new(&cfg.env)?;
    let mut digital = TowerEnv::new(&cfg.env, ParamVector::new(vec![1.0, 1.0])?)?;
    let strategy = HungarianStrategy::new(physical.layout());
    let records = if cfg.method.is_policy_gradient() {
        run_pg_estimator(cfg, &mut physical, &mut digital, &strategy, &true_params)?
    } else {
        run_ga_estimator(cfg, &mut physical, &mut digital, &strategy, &true_params)?
    };
    Ok(MethodRun {
        method: cfg.method,
        seed: cfg.seed,
        records,
    })
}

/// Runs every requested method on every seed. All methods share the seed
/// set, hence identical physical rollouts per seed.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Result<BenchmarkResult> {
    if cfg.methods.is_empty() {
        return Err(Error::config("benchmark needs at least one method"));
    }
    if cfg.seeds.is_empty() {
        return Err(Error::config("benchmark needs at least one seed"));
    }
    let mut runs = Vec::with_capacity(cfg.methods.len() * cfg.seeds.len());
    for &method in &cfg.methods {
        for &seed in &cfg.seeds {
            let cell = cfg.experiment.with_method(method).with_seed(seed);
            runs.push(run_method(&cell)?);
        }
    }
    let summaries = summarize(&cfg.methods, &runs);
    let verdicts = compute_verdicts(&summaries);
    Ok(BenchmarkResult {
        runs,
        summaries,
        verdicts,
    })
}

fn summarize(methods: &[Method], runs: &[MethodRun]) -> Vec<MethodSummary> {
    methods
        .iter()
        .map(|&method| {
            let finals: Vec<&RunRecord> = runs
                .iter()
                .filter(|r| r.method == method)
                .filter_map(|r| r.final_record())
                .collect();
            let n = finals.len();
            if n == 0 {
                return MethodSummary {
                    method,
                    seeds: 0,
                    final_param_mse_mean: f64::NAN,
                    final_param_mse_std: f64::NAN,
                    mean_final_prediction: Vec::new(),
                };
            }
            let mean = finals.iter().map(|r| r.param_mse).sum::<f64>() / n as f64;
            let var = finals
                .iter()
                .map(|r| (r.param_mse - mean) * (r.param_mse - mean))
                .sum::<f64>()
                / n as f64;
            let dim = finals[0].prediction.dim();
            let mut mean_prediction = vec![0.0; dim];
            for r in &finals {
                for (acc, v) in mean_prediction.iter_mut().zip(r.prediction.values()) {
                    *acc += v / n as f64;
                }
            }
            MethodSummary {
                method,
                seeds: n,
                final_param_mse_mean: mean,
                final_param_mse_std: var.sqrt(),
                mean_final_prediction: mean_prediction,
            }
        })
        .collect()
}

fn compute_verdicts(summaries: &[MethodSummary]) -> Verdicts {
    let mean_of = |m: Method| -> Option<f64> {
        summaries
            .iter()
            .find(|s| s.method == m && s.seeds > 0)
            .map(|s| s.final_param_mse_mean)
    };

    let claims = [
        (Method::Pgfp, Method::Gafp),
        (Method::Pgfp, Method::Pg),
        (Method::Pgfp, Method::Ga),
        (Method::Gafp, Method::Ga),
    ];
    let mut pairwise = Vec::new();
    for (better, worse) in claims {
        if let (Some(a), Some(b)) = (mean_of(better), mean_of(worse)) {
            pairwise.push(OrderingVerdict {
                better,
                worse,
                holds: a < b,
            });
        }
    }

    let pgfp_beats_all = mean_of(Method::Pgfp).and_then(|pgfp| {
        let others: Vec<f64> = [Method::Gafp, Method::Pg, Method::Ga]
            .into_iter()
            .filter_map(mean_of)
            .collect();
        if others.is_empty() {
            None
        } else {
            Some(others.iter().all(|o| pgfp < *o))
        }
    });

    let fp_beats_nofp = match (
        mean_of(Method::Pgfp),
        mean_of(Method::Pg),
        mean_of(Method::Gafp),
        mean_of(Method::Ga),
    ) {
        (Some(pgfp), Some(pg), Some(gafp), Some(ga)) => Some(pgfp < pg && gafp < ga),
        _ => None,
    };

    Verdicts {
        pgfp_beats_all,
        fp_beats_nofp,
        pairwise,
    }
}
