//! The parametric environment abstraction and its tower-defense instance.
//!
//! An environment is a closed-loop state machine `s' = F(s, a; params)`
//! driven by an external noise stream. Two instances back every
//! experiment: a *physical* one whose parameters are hidden behind
//! [`PhysicalHandle`], and a *digital* one whose parameters are set by the
//! calibration methods via [`ParametricEnvironment::set_params`].
//!
//! The tower-defense world: bosses travel toward per-episode destinations
//! inside an axis-aligned box under Gaussian motion noise; turrets rotate
//! toward commanded angles with per-axis slew-rate limits (the tunable
//! parameters); a boss that a turret has locked onto within range is
//! removed and its encoded position freezes. Noise consumption per step is
//! fixed (three normal draws per boss slot, dead or alive) so paired
//! rollouts sharing a stream stay aligned draw-for-draw.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::config::EnvConfig;
use crate::error::{Error, Result};
use crate::rng::SeedStream;
use crate::strategy::aim_angles;
use crate::types::{ActionVector, ParamVector, StateVector};

/// Wraps an angle to `[-pi, pi)`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut r = (a + PI).rem_euclid(TAU) - PI;
    if r >= PI {
        r = -PI;
    }
    r
}

/// Axis-aligned world box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Bounds {
    pub fn contains(&self, p: &[f64; 3]) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    fn clamp(&self, p: [f64; 3]) -> [f64; 3] {
        let mut q = p;
        for (i, v) in q.iter_mut().enumerate() {
            *v = v.clamp(self.min[i], self.max[i]);
        }
        q
    }
}

/// Full tower-defense world state, including channels that are not part of
/// the encoded observation (destinations, speeds, liveness).
#[derive(Debug, Clone, PartialEq)]
pub struct TowerDefenseWorld {
    pub turret_positions: Vec<[f64; 3]>,
    /// Current `(azimuth, pitch)` per turret, radians.
    pub turret_angles: Vec<(f64, f64)>,
    pub boss_positions: Vec<[f64; 3]>,
    pub boss_destinations: Vec<[f64; 3]>,
    pub boss_speeds: Vec<f64>,
    pub boss_alive: Vec<bool>,
    /// Per-axis slew-rate limits `[azimuth, pitch]`, rad/step.
    pub limits: ParamVector,
    pub bounds: Bounds,
}

/// Static geometry needed to interpret an encoded state vector.
#[derive(Debug, Clone)]
pub struct WorldLayout {
    pub turret_positions: Vec<[f64; 3]>,
    pub boss_count: usize,
}

/// The observable slice of a world, recovered from a state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodedState {
    pub turret_angles: Vec<(f64, f64)>,
    pub boss_positions: Vec<[f64; 3]>,
}

impl WorldLayout {
    pub fn tower_count(&self) -> usize {
        self.turret_positions.len()
    }

    pub fn state_dim(&self) -> usize {
        2 * self.tower_count() + 3 * self.boss_count
    }

    pub fn action_dim(&self) -> usize {
        2 * self.tower_count()
    }

    /// Inverse of [`encode_state`] on the encoded fields.
    pub fn decode_state(&self, state: &StateVector) -> Result<DecodedState> {
        if state.dim() != self.state_dim() {
            return Err(Error::invalid(format!(
                "state dim {} does not match layout dim {}",
                state.dim(),
                self.state_dim()
            )));
        }
        let v = state.values();
        let turret_angles = (0..self.tower_count())
            .map(|t| (v[2 * t], v[2 * t + 1]))
            .collect();
        let base = 2 * self.tower_count();
        let boss_positions = (0..self.boss_count)
            .map(|b| [v[base + 3 * b], v[base + 3 * b + 1], v[base + 3 * b + 2]])
            .collect();
        Ok(DecodedState {
            turret_angles,
            boss_positions,
        })
    }
}

/// Encodes a world as `[turret (azimuth, pitch) pairs..., boss (x, y, z)
/// triples...]`. Dead bosses keep their last position.
pub fn encode_state(world: &TowerDefenseWorld) -> StateVector {
    let mut v = Vec::with_capacity(2 * world.turret_angles.len() + 3 * world.boss_positions.len());
    for &(az, pitch) in &world.turret_angles {
        v.push(az);
        v.push(pitch);
    }
    for p in &world.boss_positions {
        v.extend_from_slice(p);
    }
    StateVector::new(v).expect("world fields are finite")
}

/// Closed-loop dynamical system with tunable parameters.
pub trait ParametricEnvironment {
    /// Starts a new episode: turret angles zeroed, boss positions and
    /// destinations drawn from the stream inside the world bounds.
    fn reset(&mut self, stream: &mut SeedStream) -> StateVector;

    /// Advances one step under the commanded action and the stream's noise.
    fn step(&mut self, action: &ActionVector, stream: &mut SeedStream) -> Result<StateVector>;

    fn state_dim(&self) -> usize;

    fn action_dim(&self) -> usize;

    /// Which targets remain engageable; the control strategy excludes dead
    /// ones from its assignment.
    fn live_targets(&self) -> Vec<bool>;

    /// Replaces the dynamics parameters. Digital instances accept this;
    /// the physical handle rejects it.
    fn set_params(&mut self, params: &ParamVector) -> Result<()>;
}

/// The tower-defense environment. Construct one per rollout role: with the
/// hidden true parameters for the physical side (then wrap it in a
/// [`PhysicalHandle`]), or with any positive starting parameters for the
/// digital side.
///
/// Bosses roam: on reaching a destination a boss receives the next waypoint
/// of its per-episode itinerary. Itineraries are derived from the reset
/// stream's identity, keyed by boss index and leg count, never drawn from
/// the shared step stream — so paired rollouts agree on every waypoint even
/// when their arrival times drift apart.
#[derive(Debug, Clone)]
pub struct TowerEnv {
    world: TowerDefenseWorld,
    noise_stddev: f64,
    hit_range: f64,
    hit_tolerance: f64,
    waypoint_base: SeedStream,
    waypoint_counts: Vec<u64>,
    started: bool,
}

const WAYPOINT_TAG: u64 = 0x77;

impl TowerEnv {
    pub fn new(cfg: &EnvConfig, params: ParamVector) -> Result<Self> {
        cfg.validate()?;
        validate_limits(&params)?;
        let turret_positions = cfg.resolved_turret_positions();
        let bounds = Bounds {
            min: cfg.bounds_min,
            max: cfg.bounds_max,
        };
        let world = TowerDefenseWorld {
            turret_positions,
            turret_angles: vec![(0.0, 0.0); cfg.tower_count],
            boss_positions: vec![bounds.min; cfg.boss_count],
            boss_destinations: vec![bounds.min; cfg.boss_count],
            boss_speeds: vec![cfg.boss_speed; cfg.boss_count],
            boss_alive: vec![false; cfg.boss_count],
            limits: params,
            bounds,
        };
        let boss_count = cfg.boss_count;
        Ok(TowerEnv {
            world,
            noise_stddev: cfg.noise_stddev(),
            hit_range: cfg.hit_range,
            hit_tolerance: cfg.hit_tolerance,
            waypoint_base: SeedStream::new(0, 0),
            waypoint_counts: vec![0; boss_count],
            started: false,
        })
    }

    /// Next itinerary waypoint for a boss, uniform inside the bounds.
    fn next_waypoint(&mut self, boss: usize) -> [f64; 3] {
        let leg = self.waypoint_counts[boss];
        self.waypoint_counts[boss] = leg + 1;
        let mut ws = self.waypoint_base.derive(&[boss as u64, leg]);
        let mut p = [0.0; 3];
        for (axis, coord) in p.iter_mut().enumerate() {
            *coord = ws.next_range(self.world.bounds.min[axis], self.world.bounds.max[axis]);
        }
        p
    }

    pub fn layout(&self) -> WorldLayout {
        WorldLayout {
            turret_positions: self.world.turret_positions.clone(),
            boss_count: self.world.boss_positions.len(),
        }
    }

    pub fn world(&self) -> &TowerDefenseWorld {
        &self.world
    }

    fn boss_count(&self) -> usize {
        self.world.boss_positions.len()
    }

    fn tower_count(&self) -> usize {
        self.world.turret_positions.len()
    }
}

fn validate_limits(params: &ParamVector) -> Result<()> {
    if params.dim() != 2 {
        return Err(Error::invalid(format!(
            "tower-defense parameters have dim 2, got {}",
            params.dim()
        )));
    }
    if !params.all_positive() {
        return Err(Error::invalid("slew-rate limits must be strictly positive"));
    }
    Ok(())
}

impl ParametricEnvironment for TowerEnv {
    fn reset(&mut self, stream: &mut SeedStream) -> StateVector {
        self.waypoint_base = stream.derive(&[WAYPOINT_TAG]);
        for c in &mut self.waypoint_counts {
            *c = 0;
        }
        let w = &mut self.world;
        for angles in &mut w.turret_angles {
            *angles = (0.0, 0.0);
        }
        for b in 0..w.boss_positions.len() {
            for axis in 0..3 {
                w.boss_positions[b][axis] = stream.next_range(w.bounds.min[axis], w.bounds.max[axis]);
            }
            w.boss_alive[b] = true;
        }
        for b in 0..self.world.boss_positions.len() {
            self.world.boss_destinations[b] = self.next_waypoint(b);
        }
        self.started = true;
        encode_state(&self.world)
    }

    fn step(&mut self, action: &ActionVector, stream: &mut SeedStream) -> Result<StateVector> {
        if !self.started {
            return Err(Error::invalid("step called before reset"));
        }
        if action.dim() != self.action_dim() {
            return Err(Error::invalid(format!(
                "action dim {} does not match 2 x {} turrets",
                action.dim(),
                self.tower_count()
            )));
        }

        let az_limit = self.world.limits.values()[0];
        let pitch_limit = self.world.limits.values()[1];
        let cmd = action.values();
        for (t, angles) in self.world.turret_angles.iter_mut().enumerate() {
            let cmd_az = wrap_angle(cmd[2 * t]);
            let cmd_pitch = cmd[2 * t + 1].clamp(-FRAC_PI_2, FRAC_PI_2);
            let d_az = wrap_angle(cmd_az - angles.0).clamp(-az_limit, az_limit);
            angles.0 = wrap_angle(angles.0 + d_az);
            let d_pitch = (cmd_pitch - angles.1).clamp(-pitch_limit, pitch_limit);
            angles.1 = (angles.1 + d_pitch).clamp(-FRAC_PI_2, FRAC_PI_2);
        }

        // Fixed noise consumption: three draws per boss slot whether or not
        // the boss still moves, so paired rollouts stay stream-aligned.
        for b in 0..self.boss_count() {
            let noise = [
                stream.next_standard_normal(),
                stream.next_standard_normal(),
                stream.next_standard_normal(),
            ];
            if !self.world.boss_alive[b] {
                continue;
            }
            let pos = self.world.boss_positions[b];
            let dest = self.world.boss_destinations[b];
            let speed = self.world.boss_speeds[b];
            let delta = [dest[0] - pos[0], dest[1] - pos[1], dest[2] - pos[2]];
            let dist = (delta[0] * delta[0] + delta[1] * delta[1] + delta[2] * delta[2]).sqrt();
            // No overshoot: within one step of the destination, arrive; the
            // itinerary's next waypoint takes over on the following step.
            let moved = if dist <= speed {
                self.world.boss_destinations[b] = self.next_waypoint(b);
                dest
            } else {
                let scale = speed / dist;
                [
                    pos[0] + scale * delta[0],
                    pos[1] + scale * delta[1],
                    pos[2] + scale * delta[2],
                ]
            };
            let next = [
                moved[0] + self.noise_stddev * noise[0],
                moved[1] + self.noise_stddev * noise[1],
                moved[2] + self.noise_stddev * noise[2],
            ];
            self.world.boss_positions[b] = self.world.bounds.clamp(next);
        }

        // Hit resolution after movement: lock-on within range removes the
        // boss and freezes its encoded position.
        for b in 0..self.boss_count() {
            if !self.world.boss_alive[b] {
                continue;
            }
            let boss = self.world.boss_positions[b];
            for (t, turret) in self.world.turret_positions.iter().enumerate() {
                let d = [boss[0] - turret[0], boss[1] - turret[1], boss[2] - turret[2]];
                let dist = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
                if dist >= self.hit_range {
                    continue;
                }
                if dist == 0.0 {
                    // Point blank.
                    self.world.boss_alive[b] = false;
                    break;
                }
                let (aim_az, aim_pitch) =
                    aim_angles(turret, &boss).expect("distinct positions checked above");
                let (az, pitch) = self.world.turret_angles[t];
                let err_az = wrap_angle(aim_az - az).abs();
                let err_pitch = (aim_pitch - pitch).abs();
                if err_az.max(err_pitch) < self.hit_tolerance {
                    self.world.boss_alive[b] = false;
                    break;
                }
            }
        }

        Ok(encode_state(&self.world))
    }

    fn state_dim(&self) -> usize {
        2 * self.tower_count() + 3 * self.boss_count()
    }

    fn action_dim(&self) -> usize {
        2 * self.tower_count()
    }

    fn live_targets(&self) -> Vec<bool> {
        self.world.boss_alive.clone()
    }

    fn set_params(&mut self, params: &ParamVector) -> Result<()> {
        validate_limits(params)?;
        self.world.limits = params.clone();
        Ok(())
    }
}

/// Interaction-only wrapper around the physical instance: the true
/// parameters are not readable or writable through it, and an optional
/// step budget models the cost of physical interaction.
#[derive(Debug)]
pub struct PhysicalHandle {
    inner: TowerEnv,
    remaining: Option<u64>,
}

impl PhysicalHandle {
    /// Builds the physical environment from its configuration, hiding
    /// `cfg.true_params` behind the handle.
    pub fn new(cfg: &EnvConfig) -> Result<Self> {
        let params = ParamVector::new(cfg.true_params.to_vec())?;
        Ok(PhysicalHandle {
            inner: TowerEnv::new(cfg, params)?,
            remaining: cfg.physical_budget,
        })
    }

    pub fn layout(&self) -> WorldLayout {
        self.inner.layout()
    }

    /// Steps left in the interaction budget, if one is set.
    pub fn remaining_budget(&self) -> Option<u64> {
        self.remaining
    }
}

impl ParametricEnvironment for PhysicalHandle {
    fn reset(&mut self, stream: &mut SeedStream) -> StateVector {
        self.inner.reset(stream)
    }

    fn step(&mut self, action: &ActionVector, stream: &mut SeedStream) -> Result<StateVector> {
        if let Some(remaining) = self.remaining {
            if remaining == 0 {
                return Err(Error::BudgetExhausted(
                    "no physical interaction steps remain".to_string(),
                ));
            }
            self.remaining = Some(remaining - 1);
        }
        self.inner.step(action, stream)
    }

    fn state_dim(&self) -> usize {
        self.inner.state_dim()
    }

    fn action_dim(&self) -> usize {
        self.inner.action_dim()
    }

    fn live_targets(&self) -> Vec<bool> {
        self.inner.live_targets()
    }

    fn set_params(&mut self, _params: &ParamVector) -> Result<()> {
        Err(Error::AccessDenied(
            "physical parameters cannot be set through the handle".to_string(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStream;

    fn small_cfg() -> EnvConfig {
        EnvConfig {
            boss_count: 3,
            tower_count: 2,
            ..EnvConfig::default()
        }
    }

    fn params(az: f64, pitch: f64) -> ParamVector {
        ParamVector::new(vec![az, pitch]).unwrap()
    }

    #[test]
    fn wrap_angle_covers_the_half_open_interval() {
        assert_eq!(wrap_angle(0.0), 0.0);
        assert!((wrap_angle(PI) - (-PI)).abs() < 1e-12);
        assert!((wrap_angle(-PI) - (-PI)).abs() < 1e-12);
        assert!((wrap_angle(3.0 * PI) - (-PI)).abs() < 1e-12);
        assert!((wrap_angle(2.5 * PI) - 0.5 * PI).abs() < 1e-12);
        for k in -20..20 {
            let a = 0.37 * k as f64;
            let w = wrap_angle(a);
            assert!((-PI..PI).contains(&w), "{a} wrapped to {w}");
        }
    }

    #[test]
    fn reset_is_deterministic_per_stream() {
        let mut env = TowerEnv::new(&small_cfg(), params(0.2, 0.7)).unwrap();
        let a = env.reset(&mut SeedStream::new(42, 0));
        let b = env.reset(&mut SeedStream::new(42, 0));
        assert_eq!(a, b);
        let c = env.reset(&mut SeedStream::new(43, 0));
        assert_ne!(a, c);
    }

    #[test]
    fn reset_state_dim_matches_layout() {
        let mut env = TowerEnv::new(&small_cfg(), params(0.2, 0.7)).unwrap();
        let s = env.reset(&mut SeedStream::new(1, 0));
        assert_eq!(s.dim(), 2 * 2 + 3 * 3);

        let cfg = EnvConfig {
            boss_count: 0,
            tower_count: 2,
            ..EnvConfig::default()
        };
        let mut env = TowerEnv::new(&cfg, params(0.2, 0.7)).unwrap();
        let s = env.reset(&mut SeedStream::new(1, 0));
        assert_eq!(s.dim(), 4);
        assert!(s.values().iter().all(|v| *v == 0.0), "only zeroed angles");
    }

    #[test]
    fn turret_rotation_is_clamped_to_the_limit() {
        let cfg = EnvConfig {
            boss_count: 0,
            tower_count: 1,
            ..EnvConfig::default()
        };
        let mut env = TowerEnv::new(&cfg, params(0.2, 0.7)).unwrap();
        let mut stream = SeedStream::new(1, 0);
        env.reset(&mut stream);
        let action = ActionVector::new(vec![1.0, 0.0]).unwrap();
        let s = env.step(&action, &mut stream).unwrap();
        assert!((s.values()[0] - 0.2).abs() < 1e-15, "azimuth moved by the limit");
        assert_eq!(s.values()[1], 0.0);
    }

    #[test]
    fn holding_the_current_angle_is_a_fixed_point() {
        let cfg = EnvConfig {
            boss_count: 0,
            tower_count: 1,
            noise_scale: Some(0.0),
            ..EnvConfig::default()
        };
        let mut env = TowerEnv::new(&cfg, params(0.2, 0.7)).unwrap();
        let mut stream = SeedStream::new(1, 0);
        let s0 = env.reset(&mut stream);
        let hold = ActionVector::new(s0.values()[..2].to_vec()).unwrap();
        let s1 = env.step(&hold, &mut stream).unwrap();
        assert_eq!(s0, s1);
    }

    #[test]
    fn rotation_takes_the_short_way_around() {
        let cfg = EnvConfig {
            boss_count: 0,
            tower_count: 1,
            ..EnvConfig::default()
        };
        let mut env = TowerEnv::new(&cfg, params(0.2, 0.7)).unwrap();
        let mut stream = SeedStream::new(1, 0);
        env.reset(&mut stream);
        // Drive the azimuth near the wrap boundary, then command the other
        // side of it; the turret should cross -pi rather than swing back.
        let to_edge = ActionVector::new(vec![-3.0, 0.0]).unwrap();
        for _ in 0..20 {
            env.step(&to_edge, &mut stream).unwrap();
        }
        let across = ActionVector::new(vec![3.0, 0.0]).unwrap();
        let s = env.step(&across, &mut stream).unwrap();
        let az = s.values()[0];
        assert!(az > 3.0, "crossed the boundary, got {az}");
    }

    #[test]
    fn boss_arrives_without_overshoot_when_noise_is_zero() {
        let cfg = EnvConfig {
            boss_count: 1,
            tower_count: 0,
            noise_scale: Some(0.0),
            hit_range: 0.0,
            ..EnvConfig::default()
        };
        let mut env = TowerEnv::new(&cfg, params(0.2, 0.7)).unwrap();
        let mut stream = SeedStream::new(7, 0);
        env.reset(&mut stream);
        let action = ActionVector::new(vec![]).unwrap();
        let mut arrivals = 0;
        for _ in 0..500 {
            let pos = env.world().boss_positions[0];
            let dest = env.world().boss_destinations[0];
            let d = [dest[0] - pos[0], dest[1] - pos[1], dest[2] - pos[2]];
            let within_reach =
                (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt() <= cfg.boss_speed;
            env.step(&action, &mut stream).unwrap();
            if within_reach {
                // Lands exactly on the waypoint, then the itinerary moves on.
                assert_eq!(env.world().boss_positions[0], dest);
                assert_ne!(env.world().boss_destinations[0], dest);
                arrivals += 1;
            }
        }
        assert!(arrivals > 1, "boss should reach several waypoints");
    }

    #[test]
    fn bosses_never_leave_bounds_and_turrets_respect_limits() {
        let cfg = EnvConfig {
            noise_scale: Some(2.0),
            ..small_cfg()
        };
        let limits = params(0.2, 0.7);
        let mut env = TowerEnv::new(&cfg, limits.clone()).unwrap();
        let mut stream = SeedStream::new(11, 0);
        let mut state = env.reset(&mut stream);
        let mut cmd_stream = SeedStream::new(12, 0);
        for _ in 0..300 {
            let cmd: Vec<f64> = (0..env.action_dim())
                .map(|_| cmd_stream.next_range(-PI, PI))
                .collect();
            let action = ActionVector::new(cmd).unwrap();
            let next = env.step(&action, &mut stream).unwrap();
            for t in 0..2 {
                let moved = wrap_angle(next.values()[2 * t] - state.values()[2 * t]).abs();
                assert!(moved <= limits.values()[0] + 1e-12);
                let pitched = (next.values()[2 * t + 1] - state.values()[2 * t + 1]).abs();
                assert!(pitched <= limits.values()[1] + 1e-12);
            }
            for b in 0..3 {
                assert!(env.world().bounds.contains(&env.world().boss_positions[b]));
            }
            state = next;
        }
    }

    #[test]
    fn encode_decode_round_trip() {
        let cfg = small_cfg();
        let mut env = TowerEnv::new(&cfg, params(0.2, 0.7)).unwrap();
        let s = env.reset(&mut SeedStream::new(3, 0));
        let decoded = env.layout().decode_state(&s).unwrap();
        assert_eq!(decoded.turret_angles, env.world().turret_angles);
        assert_eq!(decoded.boss_positions, env.world().boss_positions);
        assert_eq!(encode_state(env.world()), s);

        let wrong = StateVector::new(vec![0.0; 5]).unwrap();
        assert!(env.layout().decode_state(&wrong).is_err());
    }

    #[test]
    fn encode_layout_hand_example() {
        let world = TowerDefenseWorld {
            turret_positions: vec![[0.0; 3]],
            turret_angles: vec![(0.1, -0.2)],
            boss_positions: vec![[5.0, 6.0, 7.0]],
            boss_destinations: vec![[0.0; 3]],
            boss_speeds: vec![1.0],
            boss_alive: vec![true],
            limits: params(0.2, 0.7),
            bounds: Bounds {
                min: [0.0; 3],
                max: [100.0; 3],
            },
        };
        assert_eq!(encode_state(&world).values(), &[0.1, -0.2, 5.0, 6.0, 7.0]);

        let empty = TowerDefenseWorld {
            turret_positions: vec![],
            turret_angles: vec![],
            boss_positions: vec![],
            boss_destinations: vec![],
            boss_speeds: vec![],
            boss_alive: vec![],
            limits: params(0.2, 0.7),
            bounds: Bounds {
                min: [0.0; 3],
                max: [100.0; 3],
            },
        };
        assert_eq!(encode_state(&empty).dim(), 0);
    }

    #[test]
    fn set_params_validates_and_applies() {
        let mut env = TowerEnv::new(&small_cfg(), params(1.0, 1.0)).unwrap();
        assert!(env.set_params(&params(0.2, 0.7)).is_ok());
        assert_eq!(env.world().limits.values(), &[0.2, 0.7]);
        assert!(env
            .set_params(&ParamVector::new(vec![0.0, 0.7]).unwrap())
            .is_err());
        assert!(env
            .set_params(&ParamVector::new(vec![0.2, 0.7, 0.1]).unwrap())
            .is_err());
    }

    #[test]
    fn physical_handle_hides_params_and_enforces_budget() {
        let cfg = EnvConfig {
            physical_budget: Some(2),
            ..small_cfg()
        };
        let mut phys = PhysicalHandle::new(&cfg).unwrap();
        assert!(matches!(
            phys.set_params(&params(0.2, 0.7)),
            Err(Error::AccessDenied(_))
        ));
        let mut stream = SeedStream::new(5, 0);
        phys.reset(&mut stream);
        let hold = ActionVector::new(vec![0.0; phys.action_dim()]).unwrap();
        phys.step(&hold, &mut stream).unwrap();
        phys.step(&hold, &mut stream).unwrap();
        assert!(matches!(
            phys.step(&hold, &mut stream),
            Err(Error::BudgetExhausted(_))
        ));
        assert_eq!(phys.remaining_budget(), Some(0));
    }

    #[test]
    fn step_before_reset_is_rejected() {
        let mut env = TowerEnv::new(&small_cfg(), params(0.2, 0.7)).unwrap();
        let action = ActionVector::new(vec![0.0; 4]).unwrap();
        assert!(env.step(&action, &mut SeedStream::new(1, 0)).is_err());
    }

    #[test]
    fn action_dim_mismatch_is_rejected() {
        let mut env = TowerEnv::new(&small_cfg(), params(0.2, 0.7)).unwrap();
        let mut stream = SeedStream::new(1, 0);
        env.reset(&mut stream);
        let action = ActionVector::new(vec![0.0; 3]).unwrap();
        assert!(env.step(&action, &mut stream).is_err());
    }

    #[test]
    fn equal_params_and_streams_give_identical_steps() {
        let cfg = small_cfg();
        let mut phys = PhysicalHandle::new(&cfg).unwrap();
        let mut digital = TowerEnv::new(&cfg, params(1.0, 1.0)).unwrap();
        digital.set_params(&params(0.2, 0.7)).unwrap();

        let base = SeedStream::new(99, 7);
        let mut sp = base;
        let mut sd = base;
        let a = phys.reset(&mut sp);
        let b = digital.reset(&mut sd);
        assert_eq!(a, b);
        let action = ActionVector::new(vec![0.5, 0.1, -0.5, 0.2]).unwrap();
        for _ in 0..50 {
            let x = phys.step(&action, &mut sp).unwrap();
            let y = digital.step(&action, &mut sd).unwrap();
            assert_eq!(x, y);
        }
    }
}
