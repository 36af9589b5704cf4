//! Config files, CSV tables and run manifests.

pub mod config;
pub mod manifest;
pub mod tables;

pub use config::{parse_config, parse_config_str, serialize_config, DEFAULT_MAX_CELLS};
pub use manifest::{CellStatus, RunManifest, MANIFEST_FILE};
pub use tables::{fmt_f64, Table};
