//! Key-value record written next to every output set. The scenario part
//! doubles as a `--config` file, so a manifest re-runs its own job.

use std::path::{Path, PathBuf};

use ibr_core::scenarios::ScenarioFile;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunInfo {
    pub scenario: String,
    pub tool_version: String,
    pub code_version: String,
    pub units: String,
    /// The solver uses no random numbers.
    pub seed: Option<u64>,
    pub wall_time_s: f64,
    pub status: String,
    pub outputs: Vec<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    #[serde(flatten)]
    pub scenario: ScenarioFile,
    pub run: RunInfo,
}

pub const FILE_NAME: &str = "manifest.toml";

/// `git describe` of the working tree when available.
pub fn code_version() -> String {
    std::process::Command::new("git")
        .args(["describe", "--always", "--dirty", "--tags"])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .ok()
        .filter(|o| o.status.success())
        .and_then(|o| String::from_utf8(o.stdout).ok())
        .map(|s| s.trim().to_string())
        .unwrap_or_else(|| "unknown".into())
}

impl RunManifest {
    pub fn new(scenario: ScenarioFile, name: &str) -> Self {
        Self {
            scenario,
            run: RunInfo {
                scenario: name.to_string(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                code_version: code_version(),
                units: "mm-N-MPa-tonne-s".into(),
                seed: None,
                wall_time_s: 0.0,
                status: "pending".into(),
                outputs: Vec::new(),
            },
        }
    }

    pub fn write(&self, dir: &Path) -> std::io::Result<PathBuf> {
        let path = dir.join(FILE_NAME);
        let text = toml::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(&path, text)?;
        Ok(path)
    }
}
