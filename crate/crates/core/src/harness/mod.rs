//! Ensembles, steady-state estimates, scaling fits and parameter sweeps.

pub mod analysis;
pub mod config;
pub mod sweep;
pub mod trajectory;

pub use analysis::*;
pub use sweep::{sweep, PhaseDiagramTable, PhaseRow, ScalingRow};
pub use config::{checkpoint_schedule, BasisKind, ExperimentConfig, DEPTH_CAP};
pub use trajectory::{
    evolve, mi_profile, purification_time, run_ensemble, run_trajectory, trajectory_rng, Observable, TrajectorySeries,
};
