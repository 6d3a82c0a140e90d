//! Deterministic, splittable random streams.
//!
//! Every stochastic component of the toolkit draws from a [`SeedStream`]:
//! a counter-based generator keyed by a root seed and a stream id. A draw
//! depends only on `(seed, stream id, position)`, so sequences are
//! identical across platforms and two copies of the same stream value
//! replay the same sequence. That last property is what paired
//! physical/digital rollouts rely on to share their noise.
//!
//! Streams are split hierarchically: one root seed per experiment, one
//! stream per `(iteration, rollout, role)` cell via [`SeedStream::for_role`].

use crate::error::{Error, Result};

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// splitmix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// What a derived stream is for within one experiment iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    /// Environment randomness: initial placement and boss motion noise.
    EnvironmentNoise = 0,
    /// Candidate-parameter sampling by the trainable policy.
    PolicySampling = 1,
    /// Genetic-algorithm selection, crossover and mutation draws.
    GaVariation = 2,
}

/// A value-semantics random stream. Copying the stream copies its position;
/// advancing one copy never affects another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    seed: u64,
    stream_id: u64,
    base: u64,
    pos: u64,
}

impl SeedStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let base = mix64(seed ^ mix64(stream_id.wrapping_mul(GAMMA).wrapping_add(GAMMA)));
        SeedStream {
            seed,
            stream_id,
            base,
            pos: 0,
        }
    }

    /// Stream for one `(iteration, rollout, role)` cell of an experiment.
    ///
    /// The id packs the triple without collisions: role in bits 0..4,
    /// rollout in bits 4..20, iteration above. Paired rollouts that must
    /// share noise pass equal indices and each keep their own copy.
    pub fn for_role(seed: u64, iteration: u64, rollout: u64, role: StreamRole) -> Self {
        debug_assert!(rollout < (1 << 16), "rollout index too large to pack");
        let id = (iteration << 20) | (rollout << 4) | role as u64;
        SeedStream::new(seed, id)
    }

    /// A fresh stream keyed off this stream's identity and the given tags.
    /// Derivation ignores the current position, so both sides of a paired
    /// rollout derive identical substreams.
    pub fn derive(&self, tags: &[u64]) -> SeedStream {
        let mut id = self.stream_id;
        for &tag in tags {
            id = mix64(id ^ mix64(tag.wrapping_mul(GAMMA).wrapping_add(1)));
        }
        SeedStream::new(self.seed, id)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of raw draws consumed so far.
    pub fn position(&self) -> u64 {
        self.pos
    }

    pub fn next_u64(&mut self) -> u64 {
        self.pos += 1;
        mix64(self.base.wrapping_add(self.pos.wrapping_mul(GAMMA)))
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw in `[lo, hi)`.
    pub fn next_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_uniform()
    }

    /// Uniform index in `0..n`. `n` must be positive.
    pub fn next_index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.next_uniform() * n as f64) as usize).min(n - 1)
    }

    /// Standard normal draw via Box-Muller; consumes exactly two uniforms
    /// regardless of the outcome, so consumption per call is fixed.
    pub fn next_standard_normal(&mut self) -> f64 {
        // 1 - u maps [0,1) to (0,1], keeping ln away from zero.
        let u1 = 1.0 - self.next_uniform();
        let u2 = self.next_uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Gaussian draw with the given mean and standard deviation.
    pub fn next_gaussian(&mut self, mean: f64, stddev: f64) -> Result<f64> {
        if !stddev.is_finite() || stddev <= 0.0 {
            return Err(Error::invalid(format!(
                "gaussian stddev must be positive and finite, got {stddev}"
            )));
        }
        Ok(mean + stddev * self.next_standard_normal())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_stream_replays_identically() {
        let mut a = SeedStream::new(42, 0);
        let mut b = SeedStream::new(42, 0);
        for _ in 0..1000 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn distinct_stream_ids_differ() {
        let mut a = SeedStream::new(42, 0);
        let mut b = SeedStream::new(42, 1);
        let xs: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        assert_ne!(xs, ys);
    }

    #[test]
    fn copies_advance_independently() {
        let mut a = SeedStream::new(7, 3);
        let mut b = a;
        assert_eq!(a.next_u64(), b.next_u64());
        let _ = a.next_u64();
        assert_eq!(a.position(), b.position() + 1);
    }

    #[test]
    fn role_streams_are_disjoint() {
        let a = SeedStream::for_role(1, 5, 2, StreamRole::EnvironmentNoise);
        let b = SeedStream::for_role(1, 5, 2, StreamRole::PolicySampling);
        let c = SeedStream::for_role(1, 5, 3, StreamRole::EnvironmentNoise);
        let d = SeedStream::for_role(1, 6, 2, StreamRole::EnvironmentNoise);
        let ids = [a.stream_id(), b.stream_id(), c.stream_id(), d.stream_id()];
        for i in 0..ids.len() {
            for j in i + 1..ids.len() {
                assert_ne!(ids[i], ids[j]);
            }
        }
    }

    #[test]
    fn derivation_ignores_position_and_separates_tags() {
        let mut a = SeedStream::new(10, 4);
        let b = a;
        let _ = a.next_u64();
        assert_eq!(a.derive(&[1, 2]), b.derive(&[1, 2]));
        assert_ne!(a.derive(&[1, 2]), a.derive(&[2, 1]));
        assert_ne!(a.derive(&[1]), a.derive(&[1, 0]));
    }

    #[test]
    fn uniform_mean_matches_law_of_large_numbers() {
        let mut s = SeedStream::new(42, 0);
        let n = 100_000;
        let mean = (0..n).map(|_| s.next_uniform()).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn uniform_stays_in_unit_interval() {
        let mut s = SeedStream::new(9, 9);
        for _ in 0..10_000 {
            let u = s.next_uniform();
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn gaussian_moments_match_sample_oracles() {
        let n = 100_000;

        let mut s = SeedStream::new(3, 0);
        let draws: Vec<f64> = (0..n)
            .map(|_| s.next_gaussian(0.0, 1.0).unwrap())
            .collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
        assert!((var - 1.0).abs() < 0.03, "variance {var}");

        let mut s = SeedStream::new(4, 0);
        let mean5 = (0..n)
            .map(|_| s.next_gaussian(5.0, 1.0).unwrap())
            .sum::<f64>()
            / n as f64;
        assert!((mean5 - 5.0).abs() < 0.02, "mean {mean5}");
    }

    #[test]
    fn tiny_stddev_concentrates_on_mean() {
        let mut s = SeedStream::new(5, 0);
        for _ in 0..100 {
            let x = s.next_gaussian(2.5, 1e-12).unwrap();
            assert!((x - 2.5).abs() < 1e-9);
        }
    }

    #[test]
    fn non_positive_stddev_is_rejected() {
        let mut s = SeedStream::new(5, 0);
        assert!(s.next_gaussian(0.0, 0.0).is_err());
        assert!(s.next_gaussian(0.0, -1.0).is_err());
        assert!(s.next_gaussian(0.0, f64::NAN).is_err());
    }
}
