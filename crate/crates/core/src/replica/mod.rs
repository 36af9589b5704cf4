//! Replica statistical mechanics of Haar-dressed parity-measurement circuits.

pub mod check;
pub mod effective;
pub mod haar;
pub mod lattice;
pub mod perm;
pub mod weights;
pub mod weingarten;

pub use effective::{effective_gate_projection, EffectiveGate};
pub use haar::{haar_mc_replica, Estimate};
pub use lattice::{conditional_renyi, partition_function, replica_ratio, ReplicaLattice};
pub use perm::{orbit_count, Permutation};
pub use weights::{wm_bruteforce, wm_weight, wm_weight_alt};
pub use weingarten::{haar_moment, WeingartenTable};
