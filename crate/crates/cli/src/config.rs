use std::fs;
use std::path::{Path, PathBuf};

use qmeasure::analysis::{NoiseModel, Scenario, SigmaConvention};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{CliError, Result};

pub const SEED_ENV: &str = "QMEASURE_SEED";
pub const PROVENANCE_FILE: &str = "run_config.json";

/// Settings read from `--config`. Flags take precedence over every field.
/// Relative paths are resolved against the config file's directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub model: Option<PathBuf>,
    pub event: Option<Vec<String>>,
    pub netlist: Option<PathBuf>,
    pub manifest: Option<PathBuf>,
    pub window_seconds: Option<f64>,
    pub resamples: Option<usize>,
    pub sigma_convention: Option<SigmaConvention>,
    pub theory_draws: Option<usize>,
    pub bins: Option<usize>,
    pub noise: Option<NoiseModel>,
    pub scenario: Option<Scenario>,
    pub out_dir: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let mut cfg: FileConfig = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.model,
            &mut cfg.netlist,
            &mut cfg.manifest,
            &mut cfg.out_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

/// Where the seed came from, for the provenance record.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    Flag,
    ConfigFile,
    Environment,
    Default,
}

/// Flag, then config file, then `QMEASURE_SEED`, then 0.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<(u64, SeedSource)> {
    if let Some(s) = flag {
        return Ok((s, SeedSource::Flag));
    }
    if let Some(s) = file {
        return Ok((s, SeedSource::ConfigFile));
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .map(|s| (s, SeedSource::Environment))
            .map_err(|_| CliError::new("config.seed", format!("{SEED_ENV}={text:?} is not a u64"))),
        Err(_) => Ok((0, SeedSource::Default)),
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, &e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("output serializes");
    write_text(path, &(text + "\n"))
}

/// Writes the fully resolved settings of a run next to its outputs.
pub fn write_provenance(out_dir: &Path, command: &str, resolved: Value) -> Result<()> {
    let record = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp": chrono::Utc::now().to_rfc3339(),
        "config": resolved,
    });
    write_json(&out_dir.join(PROVENANCE_FILE), &record)
}
