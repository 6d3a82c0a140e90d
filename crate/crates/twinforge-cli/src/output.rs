//! Result-file writers. CSV is comma-separated, LF line endings, header
//! row first; floats use Rust's shortest round-trip formatting so files
//! reproduce bit-for-bit given equal inputs. JSON objects serialize with
//! sorted keys for the same reason.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::json;

use twinforge::config::ExperimentConfig;
use twinforge::error::{Error, Result};
use twinforge::harness::{BenchmarkResult, MethodRun, RunRecord};
use twinforge::types::Trajectory;

use crate::config_file::ConfigFile;

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .map_err(|e| Error::Config(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    let file = File::create(path)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

fn io_err(e: std::io::Error) -> Error {
    Error::Config(format!("write failed: {e}"))
}

/// Per-step rows of a paired rollout: step index, physical state
/// components, digital state components, Euclidean step error.
pub fn write_rollout_csv(path: &Path, physical: &Trajectory, digital: &Trajectory) -> Result<()> {
    let mut w = create(path)?;
    let dim = physical.dim();
    let mut header = String::from("step");
    for i in 0..dim {
        header.push_str(&format!(",phys_{i}"));
    }
    for i in 0..dim {
        header.push_str(&format!(",dig_{i}"));
    }
    header.push_str(",step_error");
    writeln!(w, "{header}").map_err(io_err)?;

    for (step, (p, d)) in physical.states().iter().zip(digital.states()).enumerate() {
        let mut row = format!("{}", step + 1);
        for v in p.values() {
            row.push_str(&format!(",{v}"));
        }
        for v in d.values() {
            row.push_str(&format!(",{v}"));
        }
        let err: f64 = p
            .values()
            .iter()
            .zip(d.values())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        row.push_str(&format!(",{err}"));
        writeln!(w, "{row}").map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// One row per estimator iteration. Shared by the estimate and benchmark
/// commands; wall_ms is the only column that varies across re-runs.
pub fn write_records_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "method,seed,iteration,theta_1,theta_2,mean_mste,param_mse,wall_ms")
        .map_err(io_err)?;
    for r in records {
        let theta = r.prediction.values();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.method,
            r.seed,
            r.iteration,
            theta.first().copied().unwrap_or(f64::NAN),
            theta.get(1).copied().unwrap_or(f64::NAN),
            r.mean_mste,
            r.param_mse,
            r.wall_ms
        )
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Final estimate plus a full echo of the configuration that produced it.
pub fn write_estimate_json(path: &Path, cfg: &ExperimentConfig, run: &MethodRun) -> Result<()> {
    let final_record = run.records.last();
    let doc = json!({
        "method": run.method.as_str(),
        "seed": run.seed,
        "iterations": run.records.len(),
        "final_theta": final_record.map(|r| r.prediction.values().to_vec()),
        "final_param_mse": final_record.map(|r| r.param_mse),
        "final_mean_mste": final_record.map(|r| r.mean_mste),
        "config": cfg,
    });
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &doc)
        .map_err(|e| Error::Config(format!("json encoding failed: {e}")))?;
    writeln!(w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Per-method aggregates, ordering verdicts, and the config echo.
pub fn write_benchmark_json(path: &Path, file: &ConfigFile, result: &BenchmarkResult) -> Result<()> {
    let mut methods = serde_json::Map::new();
    for s in &result.summaries {
        methods.insert(
            s.method.as_str().to_string(),
            json!({
                "seeds": s.seeds,
                "final_param_mse_mean": s.final_param_mse_mean,
                "final_param_mse_std": s.final_param_mse_std,
                "mean_final_theta": s.mean_final_prediction,
            }),
        );
    }
    let mut pairwise = serde_json::Map::new();
    for v in &result.verdicts.pairwise {
        pairwise.insert(format!("{}<{}", v.better, v.worse), json!(v.holds));
    }
    let doc = json!({
        "methods": methods,
        "verdicts": {
            "pgfp_beats_all": result.verdicts.pgfp_beats_all,
            "fp_beats_nofp": result.verdicts.fp_beats_nofp,
            "pairwise": pairwise,
        },
        "config": {
            "experiment": file.experiment,
            "methods": file.methods,
            "seeds": file.seeds,
        },
    });
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &doc)
        .map_err(|e| Error::Config(format!("json encoding failed: {e}")))?;
    writeln!(w).map_err(io_err)?;
    w.flush().map_err(io_err)
}
