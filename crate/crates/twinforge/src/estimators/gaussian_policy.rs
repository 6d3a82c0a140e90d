//! The trainable candidate-parameter sampler.
//!
//! A small feed-forward map (features -> hidden tanh layer -> raw outputs,
//! softplus to keep the mean positive) parameterizes a diagonal Gaussian
//! over environment parameters, with free per-coordinate log-stddevs.
//! Gradients of the log-density with respect to every trainable value are
//! derived by hand; no autodiff.
//!
//! Parameter storage is one flat vector laid out as
//! `[w1 (hidden x features) | b1 | w2 (out x hidden) | b2 | log_sigma]`,
//! which keeps the update step and finite-difference checks trivial.

use crate::config::PolicyConfig;
use crate::error::{Error, Result};
use crate::rng::SeedStream;
use crate::types::ParamVector;

/// Smallest candidate parameter value passed to the environment; Gaussian
/// draws below it are clamped before use (never before scoring).
pub const PARAM_FLOOR: f64 = 1e-3;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn softplus(x: f64) -> f64 {
    // max(x, 0) + ln(1 + exp(-|x|)) is stable at both extremes.
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// One draw from the policy.
#[derive(Debug, Clone)]
pub struct PolicySample {
    /// Environment-ready parameters (positive; clamped at [`PARAM_FLOOR`]).
    pub theta: ParamVector,
    /// The raw Gaussian draw before clamping; gradients are taken here.
    pub draw: Vec<f64>,
    /// Log-density of the raw draw.
    pub log_density: f64,
}

/// Diagonal-Gaussian parameter policy with a single hidden layer.
#[derive(Debug, Clone)]
pub struct GaussianParameterPolicy {
    feature_dim: usize,
    hidden_dim: usize,
    out_dim: usize,
    params: Vec<f64>,
    ln_sigma_floor: f64,
    ln_sigma_cap: f64,
    step_clip: f64,
    ln_sigma_anneal: f64,
}

struct Forward {
    hidden: Vec<f64>,
    raw: Vec<f64>,
    mean: Vec<f64>,
    sigma: Vec<f64>,
}

impl GaussianParameterPolicy {
    /// Xavier-uniform hidden layer, damped Xavier output weights, and an
    /// output bias solving `softplus(b) = mean_init`. Log-stddevs start at
    /// `ln(sigma_init)`.
    pub fn new(
        feature_dim: usize,
        out_dim: usize,
        cfg: &PolicyConfig,
        stream: &mut SeedStream,
    ) -> Result<Self> {
        cfg.validate()?;
        if feature_dim == 0 || out_dim == 0 {
            return Err(Error::invalid("feature and output dims must be positive"));
        }
        let hidden_dim = cfg.hidden_dim;
        let mut params = Vec::with_capacity(
            hidden_dim * feature_dim + hidden_dim + out_dim * hidden_dim + 2 * out_dim,
        );
        let bound1 = (6.0 / (feature_dim + hidden_dim) as f64).sqrt();
        for _ in 0..hidden_dim * feature_dim {
            params.push(stream.next_range(-bound1, bound1));
        }
        params.extend(std::iter::repeat_n(0.0, hidden_dim));
        let bound2 = 0.3 * (6.0 / (hidden_dim + out_dim) as f64).sqrt();
        for _ in 0..out_dim * hidden_dim {
            params.push(stream.next_range(-bound2, bound2));
        }
        // Inverse softplus.
        let bias = (cfg.mean_init.exp() - 1.0).ln();
        params.extend(std::iter::repeat_n(bias, out_dim));
        params.extend(std::iter::repeat_n(cfg.sigma_init.ln(), out_dim));
        Ok(GaussianParameterPolicy {
            feature_dim,
            hidden_dim,
            out_dim,
            params,
            ln_sigma_floor: cfg.sigma_floor.ln(),
            ln_sigma_cap: cfg.sigma_cap.ln(),
            step_clip: cfg.step_clip,
            ln_sigma_anneal: cfg.sigma_anneal.ln(),
        })
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Overwrites one trainable value. Intended for tests (finite
    /// differences need to wiggle individual parameters).
    pub fn set_param(&mut self, index: usize, value: f64) {
        self.params[index] = value;
    }

    // Flat-layout offsets.
    fn w1(&self) -> usize {
        0
    }
    fn b1(&self) -> usize {
        self.hidden_dim * self.feature_dim
    }
    fn w2(&self) -> usize {
        self.b1() + self.hidden_dim
    }
    fn b2(&self) -> usize {
        self.w2() + self.out_dim * self.hidden_dim
    }
    fn ls(&self) -> usize {
        self.b2() + self.out_dim
    }

    fn check_features(&self, features: &[f64]) -> Result<()> {
        if features.len() != self.feature_dim {
            return Err(Error::invalid(format!(
                "feature length {} does not match policy input {}",
                features.len(),
                self.feature_dim
            )));
        }
        Ok(())
    }

    /// Fixed input scaling. Per-step change summaries land in the active
    /// range of the hidden layer at this scale; sequences that carry whole
    /// arena coordinates do not, and saturate it.
    fn normalize_input(&self, features: &[f64]) -> Vec<f64> {
        const INPUT_SCALE: f64 = 8.0;
        features.iter().map(|x| x / INPUT_SCALE).collect()
    }

    fn forward(&self, features: &[f64]) -> Forward {
        let features = self.normalize_input(features);
        let p = &self.params;
        let (f, h, o) = (self.feature_dim, self.hidden_dim, self.out_dim);
        let mut hidden = vec![0.0; h];
        for i in 0..h {
            let mut u = p[self.b1() + i];
            let row = self.w1() + i * f;
            for (j, &x) in features.iter().enumerate() {
                u += p[row + j] * x;
            }
            hidden[i] = u.tanh();
        }
        let mut raw = vec![0.0; o];
        let mut mean = vec![0.0; o];
        let mut sigma = vec![0.0; o];
        for k in 0..o {
            let mut r = p[self.b2() + k];
            let row = self.w2() + k * h;
            for (i, &hv) in hidden.iter().enumerate() {
                r += p[row + i] * hv;
            }
            raw[k] = r;
            mean[k] = softplus(r);
            sigma[k] = p[self.ls() + k].exp();
        }
        Forward {
            hidden,
            raw,
            mean,
            sigma,
        }
    }

    /// The point prediction: the Gaussian mean for these features.
    pub fn mean_params(&self, features: &[f64]) -> Result<ParamVector> {
        self.check_features(features)?;
        ParamVector::new(self.forward(features).mean)
    }

    /// Current per-coordinate sampling stddev.
    pub fn sigmas(&self) -> Vec<f64> {
        (0..self.out_dim).map(|k| self.params[self.ls() + k].exp()).collect()
    }

    /// Draws candidate parameters. Consumes `out_dim` normal draws.
    pub fn sample(&self, features: &[f64], stream: &mut SeedStream) -> Result<PolicySample> {
        self.check_features(features)?;
        let fwd = self.forward(features);
        let draw: Vec<f64> = (0..self.out_dim)
            .map(|k| fwd.mean[k] + fwd.sigma[k] * stream.next_standard_normal())
            .collect();
        let theta = ParamVector::new(draw.iter().map(|z| z.max(PARAM_FLOOR)).collect())?;
        let log_density = log_density_of(&fwd, &draw);
        Ok(PolicySample {
            theta,
            draw,
            log_density,
        })
    }

    /// Log-density of a raw draw under the current policy.
    pub fn log_density(&self, features: &[f64], draw: &[f64]) -> Result<f64> {
        self.check_features(features)?;
        if draw.len() != self.out_dim {
            return Err(Error::invalid("draw length does not match output dim"));
        }
        Ok(log_density_of(&self.forward(features), draw))
    }

    /// Analytic gradient of `log_density(features, draw)` with respect to
    /// every trainable value, in flat parameter layout.
    pub fn log_density_grad(&self, features: &[f64], draw: &[f64]) -> Result<Vec<f64>> {
        self.check_features(features)?;
        if draw.len() != self.out_dim {
            return Err(Error::invalid("draw length does not match output dim"));
        }
        if draw.iter().any(|z| !z.is_finite()) {
            return Err(Error::invalid("draw must be finite"));
        }
        let fwd = self.forward(features);
        let features = self.normalize_input(features);
        let (f, h, o) = (self.feature_dim, self.hidden_dim, self.out_dim);
        let mut grad = vec![0.0; self.params.len()];

        // d logp / d mean_k = (z_k - mean_k) / sigma_k^2; chain through the
        // softplus (derivative: sigmoid of the raw output).
        let mut g_raw = vec![0.0; o];
        for k in 0..o {
            let inv_var = 1.0 / (fwd.sigma[k] * fwd.sigma[k]);
            let g_mean = (draw[k] - fwd.mean[k]) * inv_var;
            g_raw[k] = g_mean * sigmoid(fwd.raw[k]);
            // d logp / d log_sigma_k = (z - mean)^2 / sigma^2 - 1.
            let centered = draw[k] - fwd.mean[k];
            grad[self.ls() + k] = centered * centered * inv_var - 1.0;
        }

        // Output layer.
        for k in 0..o {
            grad[self.b2() + k] = g_raw[k];
            let row = self.w2() + k * h;
            for i in 0..h {
                grad[row + i] = g_raw[k] * fwd.hidden[i];
            }
        }

        // Back through tanh into the first layer.
        for i in 0..h {
            let mut g_h = 0.0;
            for (k, g) in g_raw.iter().enumerate() {
                g_h += g * self.params[self.w2() + k * h + i];
            }
            let g_u = g_h * (1.0 - fwd.hidden[i] * fwd.hidden[i]);
            grad[self.b1() + i] = g_u;
            let row = self.w1() + i * f;
            for (j, &x) in features.iter().enumerate() {
                grad[row + j] = g_u * x;
            }
        }

        Ok(grad)
    }

    /// Applies `params += scale * direction`, shrinking the whole step if
    /// its largest component would exceed the configured clip, then
    /// re-clamps log-stddevs into their configured band.
    pub(crate) fn apply_step(&mut self, direction: &[f64], scale: f64) {
        debug_assert_eq!(direction.len(), self.params.len());
        let largest = direction
            .iter()
            .map(|d| (d * scale).abs())
            .fold(0.0f64, f64::max);
        let scale = if largest > self.step_clip {
            scale * self.step_clip / largest
        } else {
            scale
        };
        for (p, d) in self.params.iter_mut().zip(direction) {
            *p += scale * d;
        }
        let ls = self.ls();
        for k in 0..self.out_dim {
            self.params[ls + k] = self.params[ls + k].clamp(self.ln_sigma_floor, self.ln_sigma_cap);
        }
    }

    /// One tick of the deterministic stddev schedule, clamped to the floor.
    /// Kept separate from the reward-driven update so that a zero update
    /// really is a no-op.
    pub fn anneal_sigma(&mut self) {
        let ls = self.ls();
        for k in 0..self.out_dim {
            self.params[ls + k] = (self.params[ls + k] + self.ln_sigma_anneal)
                .clamp(self.ln_sigma_floor, self.ln_sigma_cap);
        }
    }
}

fn log_density_of(fwd: &Forward, draw: &[f64]) -> f64 {
    fwd.mean
        .iter()
        .zip(&fwd.sigma)
        .zip(draw)
        .map(|((m, s), z)| {
            let centered = (z - m) / s;
            -s.ln() - 0.5 * LN_2PI - 0.5 * centered * centered
        })
        .sum()
}
