use std::path::{Path, PathBuf};

use riemann_core::zeta::write_atomic;
use riemann_core::{PrecisionConfig, Result};
use serde::{Deserialize, Serialize};

/// Everything needed to repeat a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Full argument vector, program name included.
    pub argv: Vec<String>,
    pub config_echo: serde_json::Value,
    pub precision: PrecisionConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_fingerprint: Option<String>,
    pub wall_time_ms: u64,
    pub tool_version: String,
    /// Primary output files, relative to the output directory.
    #[serde(default)]
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn path_in(out_dir: &Path, command: &str) -> PathBuf {
        out_dir.join(format!("{command}.manifest.json"))
    }

    pub fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let path = Self::path_in(out_dir, &self.command);
        let mut body = serde_json::to_string_pretty(self)?;
        body.push('\n');
        write_atomic(&path, body.as_bytes())?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
