//! Experiment configuration records.
//!
//! Every knob the estimators or the environment consume lives here, with
//! defaults, so result files can echo the exact configuration that produced
//! them. Parsing is strict: unknown keys are rejected.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four benchmark calibration methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Policy gradient over adjacent-state-difference features.
    Pgfp,
    /// Policy gradient over raw trajectory features.
    Pg,
    /// Genetic algorithm scored on adjacent-state-difference error.
    Gafp,
    /// Genetic algorithm scored on raw trajectory error.
    Ga,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Pgfp, Method::Gafp, Method::Pg, Method::Ga];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pgfp => "pgfp",
            Method::Pg => "pg",
            Method::Gafp => "gafp",
            Method::Ga => "ga",
        }
    }

    /// Whether the method applies the adjacent-difference preprocessing.
    pub fn uses_preprocessing(self) -> bool {
        matches!(self, Method::Pgfp | Method::Gafp)
    }

    pub fn is_policy_gradient(self) -> bool {
        matches!(self, Method::Pgfp | Method::Pg)
    }

    /// The counterpart without (or with) preprocessing, e.g. pgfp <-> pg.
    pub fn counterpart(self) -> Method {
        match self {
            Method::Pgfp => Method::Pg,
            Method::Pg => Method::Pgfp,
            Method::Gafp => Method::Ga,
            Method::Ga => Method::Gafp,
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pgfp" => Ok(Method::Pgfp),
            "pg" => Ok(Method::Pg),
            "gafp" => Ok(Method::Gafp),
            "ga" => Ok(Method::Ga),
            other => Err(Error::config(format!(
                "unknown method {other:?}; expected one of pgfp, pg, gafp, ga"
            ))),
        }
    }
}

/// Tower-defense environment constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub boss_count: usize,
    pub tower_count: usize,
    /// Axis-aligned world box, meters.
    pub bounds_min: [f64; 3],
    pub bounds_max: [f64; 3],
    /// Boss travel distance per step, meters.
    pub boss_speed: f64,
    /// Stddev of the isotropic Gaussian motion noise; `None` means
    /// `0.05 * boss_speed`.
    pub noise_scale: Option<f64>,
    /// A boss within this distance of a turret can be hit, meters.
    pub hit_range: f64,
    /// Maximum per-axis aim error for a hit, radians.
    pub hit_tolerance: f64,
    /// Hidden slew-rate limits of the physical instance, rad/step.
    pub true_params: [f64; 2],
    /// Fixed turret mount points; `None` spreads them along the y axis on a
    /// standoff line outside the arena at mid-height, facing it down the x
    /// axis.
    pub turret_positions: Option<Vec<[f64; 3]>>,
    /// Total physical steps allowed across an experiment; `None` = unlimited.
    pub physical_budget: Option<u64>,
}

impl Default for EnvConfig {
    fn default() -> Self {
        // A tall arena watched from a standoff line: the angular extent of
        // boss motion then loads the pitch axis about as heavily, relative
        // to its slew limit, as the azimuth axis — both limits bind often,
        // which is what makes both parameters observable.
        EnvConfig {
            boss_count: 4,
            tower_count: 2,
            bounds_min: [0.0; 3],
            bounds_max: [30.0, 100.0, 280.0],
            boss_speed: 3.0,
            noise_scale: None,
            hit_range: 50.0,
            hit_tolerance: 0.05,
            true_params: [0.2, 0.7],
            turret_positions: None,
            physical_budget: None,
        }
    }
}

impl EnvConfig {
    pub fn noise_stddev(&self) -> f64 {
        self.noise_scale.unwrap_or(0.05 * self.boss_speed)
    }

    /// Turret mount points: configured ones, or the default spread.
    pub fn resolved_turret_positions(&self) -> Vec<[f64; 3]> {
        if let Some(ref positions) = self.turret_positions {
            return positions.clone();
        }
        let k = self.tower_count;
        let span = self.bounds_max[1] - self.bounds_min[1];
        let standoff_x = self.bounds_min[0] - 2.0 * (self.bounds_max[0] - self.bounds_min[0]);
        let mid_z = 0.5 * (self.bounds_min[2] + self.bounds_max[2]);
        (0..k)
            .map(|i| {
                let frac = (i as f64 + 1.0) / (k as f64 + 1.0);
                [standoff_x, self.bounds_min[1] + frac * span, mid_z]
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        for axis in 0..3 {
            if !(self.bounds_min[axis] < self.bounds_max[axis]) {
                return Err(Error::config(format!(
                    "world bounds must have positive extent on axis {axis}"
                )));
            }
        }
        if !(self.boss_speed > 0.0) || !self.boss_speed.is_finite() {
            return Err(Error::config("boss_speed must be positive"));
        }
        if let Some(noise) = self.noise_scale {
            if !(noise >= 0.0) || !noise.is_finite() {
                return Err(Error::config("noise_scale must be non-negative"));
            }
        }
        if !(self.hit_range >= 0.0) || !self.hit_range.is_finite() {
            return Err(Error::config("hit_range must be non-negative"));
        }
        if !(self.hit_tolerance > 0.0) || !self.hit_tolerance.is_finite() {
            return Err(Error::config("hit_tolerance must be positive"));
        }
        if self.true_params.iter().any(|p| !(*p > 0.0) || !p.is_finite()) {
            return Err(Error::config("true_params entries must be positive"));
        }
        if let Some(ref positions) = self.turret_positions {
            if positions.len() != self.tower_count {
                return Err(Error::config(format!(
                    "turret_positions has {} entries for {} towers",
                    positions.len(),
                    self.tower_count
                )));
            }
            if positions.iter().flatten().any(|v| !v.is_finite()) {
                return Err(Error::config("turret_positions must be finite"));
            }
        }
        Ok(())
    }
}

/// Genetic-algorithm hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub mutation_rate: f64,
    pub crossover_rate: f64,
    pub selection_rate: f64,
    /// Stddev of the additive Gaussian gene mutation.
    pub mutation_stddev: f64,
    /// Initial members are drawn uniformly from `(0, init_max]` per gene.
    pub init_max: f64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population_size: 30,
            mutation_rate: 0.01,
            crossover_rate: 0.7,
            selection_rate: 0.5,
            mutation_stddev: 0.1,
            init_max: 1.5,
        }
    }
}

impl GaConfig {
    /// Members kept by selection: `ceil(selection_rate * population_size)`.
    pub fn survivor_count(&self) -> usize {
        (self.selection_rate * self.population_size as f64).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::config("population_size must be at least 2"));
        }
        for (name, rate) in [
            ("mutation_rate", self.mutation_rate),
            ("crossover_rate", self.crossover_rate),
            ("selection_rate", self.selection_rate),
        ] {
            if !(0.0..=1.0).contains(&rate) || !rate.is_finite() {
                return Err(Error::config(format!("{name} must lie in [0, 1]")));
            }
        }
        if self.survivor_count() < 2 {
            return Err(Error::config(
                "selection must keep at least 2 members to draw distinct parents",
            ));
        }
        if !(self.mutation_stddev >= 0.0) || !self.mutation_stddev.is_finite() {
            return Err(Error::config("mutation_stddev must be non-negative"));
        }
        if !(self.init_max > 0.0) || !self.init_max.is_finite() {
            return Err(Error::config("init_max must be positive"));
        }
        Ok(())
    }
}

/// Trainable-sampler hyperparameters for the policy-gradient methods.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyConfig {
    /// Width of the single hidden layer.
    pub hidden_dim: usize,
    /// Initial sampling mean per coordinate. Small on purpose: a too-low
    /// rate limit always leaves a trajectory signature, a too-high one can
    /// sit on a flat stretch of the objective, so calibration starts slow.
    pub mean_init: f64,
    /// Initial per-coordinate sampling stddev.
    pub sigma_init: f64,
    /// Lower clamp on the sampling stddev; keeps score magnitudes bounded.
    pub sigma_floor: f64,
    /// Upper clamp on the sampling stddev.
    pub sigma_cap: f64,
    /// Largest per-parameter move one update may apply. Bounds the damage a
    /// single unlucky batch can do.
    pub step_clip: f64,
    /// Multiplicative per-update shrink of the sampling stddev, applied on
    /// top of the learned log-stddev updates. Tightens late-stage sampling,
    /// which the reward signal alone does slowly here.
    pub sigma_anneal: f64,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        PolicyConfig {
            hidden_dim: 32,
            mean_init: 0.3,
            sigma_init: 0.2,
            sigma_floor: 0.05,
            sigma_cap: 0.5,
            step_clip: 0.05,
            sigma_anneal: 0.99,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden_dim == 0 {
            return Err(Error::config("hidden_dim must be positive"));
        }
        if !(self.sigma_floor > 0.0) || !(self.sigma_cap >= self.sigma_floor) {
            return Err(Error::config("need 0 < sigma_floor <= sigma_cap"));
        }
        if !(self.sigma_init >= self.sigma_floor) || !(self.sigma_init <= self.sigma_cap) {
            return Err(Error::config("sigma_init must lie in [sigma_floor, sigma_cap]"));
        }
        if !(self.mean_init > 0.0) || !self.mean_init.is_finite() {
            return Err(Error::config("mean_init must be positive"));
        }
        if !(self.step_clip > 0.0) || !self.step_clip.is_finite() {
            return Err(Error::config("step_clip must be positive"));
        }
        if !(self.sigma_anneal > 0.0 && self.sigma_anneal <= 1.0) {
            return Err(Error::config("sigma_anneal must lie in (0, 1]"));
        }
        Ok(())
    }
}

/// Full description of one calibration run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// States per rollout (element 0 is the initial state, so horizon N
    /// means N-1 environment steps).
    pub horizon: u32,
    /// Estimator iterations: NN updates for PG methods, reproduction cycles
    /// for GA methods.
    pub iterations: u32,
    /// Policy-gradient step size.
    pub learning_rate: f64,
    /// Multiplicative per-iteration decay of the step size.
    pub lr_decay: f64,
    /// Candidate parameter draws per PG iteration.
    pub batch_size: u32,
    pub method: Method,
    pub seed: u64,
    pub env: EnvConfig,
    pub ga: GaConfig,
    pub policy: PolicyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            horizon: 100,
            iterations: 200,
            learning_rate: 0.003,
            lr_decay: 0.99,
            batch_size: 16,
            method: Method::Pgfp,
            seed: 42,
            env: EnvConfig::default(),
            ga: GaConfig::default(),
            policy: PolicyConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::config("horizon must be at least 1"));
        }
        if self.method.uses_preprocessing() && self.horizon < 2 {
            return Err(Error::config(
                "horizon must be at least 2 when preprocessing is enabled",
            ));
        }
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(Error::config("learning_rate must be positive"));
        }
        if !(self.lr_decay > 0.0 && self.lr_decay <= 1.0) {
            return Err(Error::config("lr_decay must lie in (0, 1]"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch_size must be at least 1"));
        }
        self.env.validate()?;
        self.ga.validate()?;
        self.policy.validate()
    }

    pub fn with_method(&self, method: Method) -> Self {
        let mut cfg = self.clone();
        cfg.method = method;
        cfg
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut cfg = self.clone();
        cfg.seed = seed;
        cfg
    }
}
