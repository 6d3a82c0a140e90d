//! Sweeps the twin-fidelity metric across candidate parameters.
//!
//! For each candidate the digital replica is rolled out against the
//! physical system under shared noise and scored with MSTE, averaged over
//! 20 episode seeds. The printed curves show the identification signal the
//! calibration methods climb: zero exactly at the true parameters and
//! growing in every direction away from them.
//!
//! Run: `cargo run --release -p twinforge --example twin_fidelity`

use twinforge::config::EnvConfig;
use twinforge::env::{ParametricEnvironment, PhysicalHandle, TowerEnv};
use twinforge::harness::rollout_pair;
use twinforge::metrics::mste;
use twinforge::rng::{SeedStream, StreamRole};
use twinforge::strategy::HungarianStrategy;
use twinforge::types::ParamVector;

fn mean_mste(env_cfg: &EnvConfig, theta: &[f64; 2], seeds: u64, horizon: u32) -> f64 {
    let mut total = 0.0;
    for seed in 1..=seeds {
        let mut physical = PhysicalHandle::new(env_cfg).expect("valid config");
        let mut digital = TowerEnv::new(env_cfg, ParamVector::new(vec![1.0, 1.0]).unwrap())
            .expect("valid config");
        digital
            .set_params(&ParamVector::new(theta.to_vec()).unwrap())
            .expect("positive parameters");
        let strategy = HungarianStrategy::new(physical.layout());
        let stream = SeedStream::for_role(seed, 1, 0, StreamRole::EnvironmentNoise);
        let (phys, dig) = rollout_pair(&mut physical, &mut digital, &strategy, horizon, stream)
            .expect("rollout");
        total += mste(&phys, &dig).expect("matched shapes");
    }
    total / seeds as f64
}

fn main() {
    let env_cfg = EnvConfig::default();
    let truth = env_cfg.true_params;
    println!("true parameters: ({}, {})", truth[0], truth[1]);

    println!("\nazimuth-limit sweep (pitch limit fixed at {}):", truth[1]);
    for az in [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.5, 0.8] {
        let m = mean_mste(&env_cfg, &[az, truth[1]], 20, 100);
        println!("  theta = ({az:.2}, {:.2})  mean MSTE = {m:8.3}", truth[1]);
    }

    println!("\npitch-limit sweep (azimuth limit fixed at {}):", truth[0]);
    for pitch in [0.3, 0.5, 0.6, 0.7, 0.8, 0.9, 1.1, 1.4] {
        let m = mean_mste(&env_cfg, &[truth[0], pitch], 20, 100);
        println!("  theta = ({:.2}, {pitch:.2})  mean MSTE = {m:8.3}", truth[0]);
    }
}
