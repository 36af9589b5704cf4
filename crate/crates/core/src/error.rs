use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MocError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("layer packing failed after {attempts} attempts ({placed} of {wanted} pairs placed)")]
    Packing { attempts: usize, placed: usize, wanted: usize },

    #[error("trajectory {trajectory}: {source}")]
    Trajectory {
        trajectory: u64,
        #[source]
        source: Box<MocError>,
    },

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("singular Gram matrix for n = {n}, d = {d}")]
    SingularGram { n: usize, d: usize },

    #[error("non-positive partition function: {0}")]
    NonPositive(String),

    #[error("projective branch with zero norm: {0}")]
    ZeroNormBranch(String),

    #[error("decomposition residual {residual:e} exceeds {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("check failed: {0}")]
    CheckFailed(String),
}

impl MocError {
    /// Short machine-readable tag used by the CLI.
    pub fn category(&self) -> &'static str {
        match self {
            MocError::InvalidArgument(_) => "invalid-argument",
            MocError::Packing { .. } => "packing",
            MocError::Trajectory { source, .. } => source.category(),
            MocError::SizeCap(_) => "size-cap",
            MocError::SingularGram { .. } => "singular",
            MocError::NonPositive(_) => "non-positive",
            MocError::ZeroNormBranch(_) => "zero-norm",
            MocError::Residual { .. } => "residual",
            MocError::Fit(_) => "fit",
            MocError::Config { .. } => "config",
            MocError::Io { .. } => "io",
            MocError::CheckFailed(_) => "check-failed",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.category() {
            "config" | "invalid-argument" => 2,
            "io" => 3,
            "check-failed" => 4,
            _ => 5,
        }
    }
}

pub type Result<T, E = MocError> = std::result::Result<T, E>;
