//! Simulation and analysis of one-dimensional measurement-only Clifford
//! circuits with power-law ranged two-qubit parity checks.

#![allow(clippy::needless_range_loop)]

pub mod dense;
pub mod error;
pub mod harness;
pub mod io;
pub mod gf2;
pub mod mask;
pub mod observables;
pub mod pauli;
pub mod replica;
pub mod sampler;
pub mod tableau;
pub mod verify;

pub use error::{MocError, Result};
pub use gf2::BitMatrix;
pub use mask::SubsystemMask;
pub use pauli::{Basis, Pauli, PauliString, Phase};
pub use tableau::{gf2_rank, Outcome, StabilizerTableau};
