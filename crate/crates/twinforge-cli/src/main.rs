//! Command-line frontend: config parsing, experiment launch, plot-ready
//! CSV/JSON output.

mod config_file;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use twinforge::config::Method;
use twinforge::env::{ParametricEnvironment, PhysicalHandle, TowerEnv};
use twinforge::harness::{rollout_pair, run_benchmark, run_method, BenchmarkConfig};
use twinforge::rng::{SeedStream, StreamRole};
use twinforge::strategy::HungarianStrategy;
use twinforge::types::ParamVector;
use twinforge::Error;

use config_file::ConfigFile;

#[derive(Parser)]
#[command(
    name = "twinforge",
    version,
    about = "Digital-twin calibration and evaluation toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Roll the strategy out against the physical system and a digital
    /// replica under shared noise, writing one CSV row per step.
    Rollout {
        /// Path to the JSON experiment configuration.
        #[arg(long)]
        config: PathBuf,
        /// Digital parameters as "a,b"; defaults to the true physical ones,
        /// which makes the error column exactly zero.
        #[arg(long)]
        theta: Option<String>,
        /// Output CSV path; defaults to <output_dir>/rollout.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one calibration method and write its record series plus a
    /// final-estimate JSON.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        /// One of pgfp, pg, gafp, ga; overrides the configured method.
        #[arg(long)]
        method: Option<String>,
        /// Output directory; defaults to the configured output_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full method x seed matrix and write combined records plus a
    /// summary with the ordering verdicts.
    Benchmark {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Errors before any experiment runs are usage problems (exit 2); errors
/// after that are runtime failures (exit 3).
enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn report(self) -> ExitCode {
        match self {
            CliError::Usage(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(2)
            }
            CliError::Runtime(msg) => {
                eprintln!("error: {msg}");
                ExitCode::from(3)
            }
        }
    }
}

fn usage(err: impl std::fmt::Display) -> CliError {
    CliError::Usage(err.to_string())
}

fn runtime(err: impl std::fmt::Display) -> CliError {
    CliError::Runtime(err.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Rollout { config, theta, out } => cmd_rollout(&config, theta.as_deref(), out),
        Command::Estimate {
            config,
            method,
            out,
        } => cmd_estimate(&config, method.as_deref(), out),
        Command::Benchmark { config, out } => cmd_benchmark(&config, out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => err.report(),
    }
}

fn parse_theta(text: &str) -> Result<ParamVector, CliError> {
    let values: Vec<f64> = text
        .split(',')
        .map(|part| part.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| usage(format!("invalid --theta {text:?}: {e}")))?;
    ParamVector::new(values).map_err(usage)
}

fn cmd_rollout(
    config_path: &std::path::Path,
    theta: Option<&str>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let file = ConfigFile::load(config_path).map_err(usage)?;
    let cfg = &file.experiment;

    let theta = match theta {
        Some(text) => parse_theta(text)?,
        None => ParamVector::new(cfg.env.true_params.to_vec()).map_err(usage)?,
    };

    let mut physical = PhysicalHandle::new(&cfg.env).map_err(usage)?;
    let mut digital =
        TowerEnv::new(&cfg.env, ParamVector::new(vec![1.0, 1.0]).unwrap()).map_err(usage)?;
    digital.set_params(&theta).map_err(usage)?;
    let strategy = HungarianStrategy::new(physical.layout());
    let stream = SeedStream::for_role(cfg.seed, 1, 0, StreamRole::EnvironmentNoise);
    let (phys, dig) = rollout_pair(&mut physical, &mut digital, &strategy, cfg.horizon, stream)
        .map_err(runtime)?;

    let path = out.unwrap_or_else(|| file.output_dir.join("rollout.csv"));
    output::write_rollout_csv(&path, &phys, &dig).map_err(runtime)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_estimate(
    config_path: &std::path::Path,
    method: Option<&str>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let mut file = ConfigFile::load(config_path).map_err(usage)?;
    if let Some(name) = method {
        file.experiment.method = name.parse::<Method>().map_err(usage)?;
    }
    file.experiment.validate().map_err(usage)?;
    let cfg = file.experiment.clone();

    let run = run_method(&cfg).map_err(runtime)?;

    let dir = out.unwrap_or_else(|| file.output_dir.clone());
    let stem = format!("estimate_{}_seed{}", cfg.method, cfg.seed);
    let csv_path = dir.join(format!("{stem}.csv"));
    let json_path = dir.join(format!("{stem}.json"));
    output::write_records_csv(&csv_path, &run.records).map_err(runtime)?;
    output::write_estimate_json(&json_path, &cfg, &run).map_err(runtime)?;
    println!("wrote {}", csv_path.display());
    println!("wrote {}", json_path.display());
    Ok(())
}

fn cmd_benchmark(config_path: &std::path::Path, out: Option<PathBuf>) -> Result<(), CliError> {
    let file = ConfigFile::load(config_path).map_err(usage)?;
    let bench = BenchmarkConfig {
        experiment: file.experiment.clone(),
        methods: file.methods.clone(),
        seeds: file.seeds.clone(),
    };
    if let Err(e) = bench.experiment.validate() {
        return Err(usage(e));
    }

    let result = run_benchmark(&bench).map_err(|e| match e {
        Error::Config(_) => usage(e),
        other => runtime(other),
    })?;

    let dir = out.unwrap_or_else(|| file.output_dir.clone());
    let csv_path = dir.join("benchmark_records.csv");
    let json_path = dir.join("benchmark_summary.json");
    let records: Vec<_> = result
        .runs
        .iter()
        .flat_map(|run| run.records.iter().cloned())
        .collect();
    output::write_records_csv(&csv_path, &records).map_err(runtime)?;
    output::write_benchmark_json(&json_path, &file, &result).map_err(runtime)?;

    for summary in &result.summaries {
        println!(
            "{}: final param MSE {:.6} ± {:.6} over {} seeds",
            summary.method,
            summary.final_param_mse_mean,
            summary.final_param_mse_std,
            summary.seeds
        );
    }
    println!("wrote {}", csv_path.display());
    println!("wrote {}", json_path.display());
    Ok(())
}
