//! Real-coded genetic-algorithm calibration.
//!
//! A fixed-size population of candidate parameter vectors is scored by the
//! negative MSTE of their digital rollouts (over raw trajectories, or over
//! adjacent-difference sequences for the preprocessed variant). Each
//! reproduction cycle keeps the top half, refills with arithmetic-crossover
//! offspring of uniformly drawn survivor pairs, and mutates genes with a
//! small Gaussian kick; the best survivor passes through untouched.

use std::time::Instant;

use crate::config::{ExperimentConfig, GaConfig, Method};
use crate::env::ParametricEnvironment;
use crate::error::{Error, Result};
use crate::estimators::gaussian_policy::PARAM_FLOOR;
use crate::harness::{rollout, RunRecord};
use crate::metrics::{delta_preprocess, mste, mste_deltas, param_mse};
use crate::rng::{SeedStream, StreamRole};
use crate::strategy::HungarianStrategy;
use crate::types::ParamVector;

/// A population with evaluated fitness (higher is better).
#[derive(Debug, Clone)]
pub struct GaPopulation {
    members: Vec<ParamVector>,
    fitness: Vec<f64>,
}

impl GaPopulation {
    pub fn members(&self) -> &[ParamVector] {
        &self.members
    }

    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    /// Index of the fittest member; ties resolve to the lowest index.
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for i in 1..self.fitness.len() {
            if self.fitness[i] > self.fitness[best] {
                best = i;
            }
        }
        best
    }

    pub fn best(&self) -> (&ParamVector, f64) {
        let i = self.best_index();
        (&self.members[i], self.fitness[i])
    }
}

/// Initial members, each gene uniform over `(0, init_max]`.
pub fn init_members(cfg: &GaConfig, dim: usize, stream: &mut SeedStream) -> Vec<ParamVector> {
    (0..cfg.population_size)
        .map(|_| {
            let genes = (0..dim)
                .map(|_| cfg.init_max * (1.0 - stream.next_uniform()))
                .collect();
            ParamVector::new(genes).expect("uniform genes are finite")
        })
        .collect()
}

/// Scores every member with the supplied fitness function.
pub fn evaluate_population(
    members: Vec<ParamVector>,
    mut fitness: impl FnMut(&ParamVector) -> Result<f64>,
) -> Result<GaPopulation> {
    let mut scores = Vec::with_capacity(members.len());
    for member in &members {
        let f = fitness(member)?;
        if !f.is_finite() {
            return Err(Error::invalid(format!("fitness must be finite, got {f}")));
        }
        scores.push(f);
    }
    Ok(GaPopulation {
        members,
        fitness: scores,
    })
}

/// One reproduction cycle: selection, crossover, mutation. Returns the next
/// generation's members, fitness not yet evaluated. The fittest survivor is
/// placed first and exempt from mutation.
pub fn reproduce(
    pop: &GaPopulation,
    cfg: &GaConfig,
    stream: &mut SeedStream,
) -> Result<Vec<ParamVector>> {
    if pop.size() != cfg.population_size {
        return Err(Error::invalid(format!(
            "population size {} does not match configured size {}",
            pop.size(),
            cfg.population_size
        )));
    }

    let mut order: Vec<usize> = (0..pop.size()).collect();
    order.sort_by(|&a, &b| pop.fitness[b].total_cmp(&pop.fitness[a]).then(a.cmp(&b)));
    let survivor_count = cfg.survivor_count().min(pop.size());
    let survivors: Vec<ParamVector> = order[..survivor_count]
        .iter()
        .map(|&i| pop.members[i].clone())
        .collect();

    let mut next = survivors.clone();
    while next.len() < cfg.population_size {
        let a = stream.next_index(survivors.len());
        let mut b = stream.next_index(survivors.len() - 1);
        if b >= a {
            b += 1;
        }
        let child = if stream.next_uniform() < cfg.crossover_rate {
            let genes = survivors[a]
                .values()
                .iter()
                .zip(survivors[b].values())
                .map(|(x, y)| {
                    let lambda = stream.next_uniform();
                    lambda * x + (1.0 - lambda) * y
                })
                .collect();
            ParamVector::new(genes).expect("convex combinations stay finite")
        } else {
            survivors[a].clone()
        };
        next.push(child);
    }

    // Mutation skips index 0: that slot is the elite.
    for member in next.iter_mut().skip(1) {
        let genes: Vec<f64> = member
            .values()
            .iter()
            .map(|&g| {
                if stream.next_uniform() < cfg.mutation_rate {
                    (g + cfg.mutation_stddev * stream.next_standard_normal()).max(PARAM_FLOOR)
                } else {
                    g
                }
            })
            .collect();
        *member = ParamVector::new(genes).expect("mutated genes stay finite");
    }

    Ok(next)
}

/// Reproduction followed by evaluation: the next evaluated generation.
pub fn ga_generation(
    pop: &GaPopulation,
    fitness: impl FnMut(&ParamVector) -> Result<f64>,
    cfg: &GaConfig,
    stream: &mut SeedStream,
) -> Result<GaPopulation> {
    let next = reproduce(pop, cfg, stream)?;
    evaluate_population(next, fitness)
}

/// Runs the gafp or ga estimator, one record per reproduction cycle.
///
/// Record `i` reflects the population after `i - 1` cycles, evaluated under
/// cycle `i`'s rollout streams; the first record is the random initial
/// population. The physical system is rolled out once per cycle, like the
/// policy-gradient family.
pub fn run_ga_estimator(
    cfg: &ExperimentConfig,
    physical: &mut dyn ParametricEnvironment,
    digital: &mut dyn ParametricEnvironment,
    strategy: &HungarianStrategy,
    true_params: &ParamVector,
) -> Result<Vec<RunRecord>> {
    if cfg.method.is_policy_gradient() {
        return Err(Error::invalid(format!(
            "{} is not a genetic-algorithm method",
            cfg.method
        )));
    }
    let mut init_stream = SeedStream::for_role(cfg.seed, 0, 0, StreamRole::GaVariation);
    let mut members = init_members(&cfg.ga, 2, &mut init_stream);
    let mut records = Vec::with_capacity(cfg.iterations as usize);

    for iteration in 1..=cfg.iterations {
        let started = Instant::now();
        let env_stream =
            SeedStream::for_role(cfg.seed, iteration as u64, 0, StreamRole::EnvironmentNoise);
        let mut var_stream =
            SeedStream::for_role(cfg.seed, iteration as u64, 0, StreamRole::GaVariation);

        let physical_traj = rollout(physical, strategy, cfg.horizon, env_stream)?;
        let physical_deltas = match cfg.method {
            Method::Gafp => Some(delta_preprocess(&physical_traj)?),
            _ => None,
        };

        let pop = evaluate_population(members, |theta| {
            digital.set_params(theta)?;
            let digital_traj = rollout(digital, strategy, cfg.horizon, env_stream)?;
            let cost = match &physical_deltas {
                Some(reference) => mste_deltas(reference, &delta_preprocess(&digital_traj)?)?,
                None => mste(&physical_traj, &digital_traj)?,
            };
            Ok(-cost)
        })?;

        let prediction = pop.best().0.clone();
        let mean_mste =
            pop.fitness().iter().map(|f| -f).sum::<f64>() / pop.size() as f64;
        records.push(RunRecord {
            method: cfg.method,
            seed: cfg.seed,
            iteration,
            param_mse: param_mse(&prediction, true_params)?,
            prediction,
            mean_mste,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        });

        members = reproduce(&pop, &cfg.ga, &mut var_stream)?;
    }

    Ok(records)
}
