//! Output files for an experiment run: `<name>.csv` and a `<name>.manifest`
//! holding the full configuration snapshot. The manifest can be passed back
//! as `--config` to regenerate the CSV.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::experiments::{run_experiment, Experiment};
use crate::table::Table;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct RunInfo {
    pub experiment: String,
    pub tool_version: String,
    pub seed: u64,
    pub workers: usize,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub run: RunInfo,
    pub config: ScenarioConfig,
}

impl RunManifest {
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<manifest>", e.to_string()))
    }
}

#[derive(Debug)]
pub struct ExperimentOutput {
    pub table: Table,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
}

fn unix_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

/// Runs `experiment` and writes its CSV and manifest into `out_dir`,
/// creating the directory if needed.
pub fn write_experiment(
    experiment: Experiment,
    cfg: &ScenarioConfig,
    out_dir: &Path,
    workers: usize,
) -> Result<ExperimentOutput> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let started = unix_ms();
    let table = run_experiment(experiment, cfg, workers)?;
    let finished = unix_ms();

    let csv_path = out_dir.join(format!("{}.csv", experiment.name()));
    let manifest_path = out_dir.join(format!("{}.manifest", experiment.name()));
    std::fs::write(&csv_path, table.to_csv()).map_err(|e| Error::io(&csv_path, e))?;

    let manifest = RunManifest {
        run: RunInfo {
            experiment: experiment.name().to_string(),
            tool_version: TOOL_VERSION.to_string(),
            seed: cfg.seed,
            workers,
            started_unix_ms: started,
            finished_unix_ms: finished,
            outputs: vec![csv_path.display().to_string()],
        },
        config: cfg.clone(),
    };
    std::fs::write(&manifest_path, manifest.to_toml()?).map_err(|e| Error::io(&manifest_path, e))?;

    Ok(ExperimentOutput { table, csv_path, manifest_path })
}
