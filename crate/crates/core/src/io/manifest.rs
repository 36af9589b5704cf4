use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{MocError, Result};
use crate::harness::config::ExperimentConfig;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellStatus {
    pub index: usize,
    pub ok: bool,
    pub message: Option<String>,
}

/// Everything needed to rerun a command and reproduce its tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Subcommand and its options, as invoked.
    pub command: Vec<String>,
    pub seed: Option<u64>,
    pub configs: Vec<ExperimentConfig>,
    pub started_unix: u64,
    pub finished_unix: Option<u64>,
    pub cells: Vec<CellStatus>,
    pub outputs: Vec<String>,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

impl RunManifest {
    pub fn start(command: Vec<String>, configs: Vec<ExperimentConfig>) -> Self {
        Self {
            tool: "moc".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command,
            seed: configs.first().map(|c| c.seed),
            configs,
            started_unix: now(),
            finished_unix: None,
            cells: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn record(&mut self, index: usize, outcome: std::result::Result<(), String>) {
        let (ok, message) = match outcome {
            Ok(()) => (true, None),
            Err(m) => (false, Some(m)),
        };
        self.cells.push(CellStatus { index, ok, message });
    }

    pub fn finish(&mut self) {
        self.finished_unix = Some(now());
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(self).map_err(|e| MocError::InvalidArgument(format!("manifest: {e}")))?;
        std::fs::write(&path, json + "\n").map_err(|source| MocError::Io { path, source })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| MocError::Io { path: path.to_path_buf(), source })?;
        serde_json::from_str(&text).map_err(|e| MocError::Config { line: e.line(), msg: e.to_string() })
    }
}
