//! The JSON configuration document. Parsing is strict: unknown keys
//! anywhere in the document are rejected, so typos cannot silently fall
//! back to defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use twinforge::config::{ExperimentConfig, Method};
use twinforge::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    /// The experiment itself; every field optional, defaults documented in
    /// the README.
    pub experiment: ExperimentConfig,
    /// Methods the benchmark command runs.
    pub methods: Vec<Method>,
    /// Seeds the benchmark command runs; all methods share them.
    pub seeds: Vec<u64>,
    /// Where result files land unless --out overrides it.
    pub output_dir: PathBuf,
}

impl Default for ConfigFile {
    fn default() -> Self {
        ConfigFile {
            experiment: ExperimentConfig::default(),
            methods: Method::ALL.to_vec(),
            seeds: vec![1, 2, 3, 4, 5],
            output_dir: PathBuf::from("results"),
        }
    }
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::Config(format!("cannot read config {}: {e}", path.display()))
        })?;
        let file: ConfigFile = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))?;
        if file.methods.is_empty() {
            return Err(Error::Config("methods list must not be empty".into()));
        }
        if file.seeds.is_empty() {
            return Err(Error::Config("seeds list must not be empty".into()));
        }
        file.experiment.validate()?;
        Ok(file)
    }
}
