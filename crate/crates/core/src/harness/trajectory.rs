use std::ops::ControlFlow;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{MocError, Result};
use crate::harness::config::ExperimentConfig;
use crate::observables::{ancilla_entropy, ObservableSet, Probes};
use crate::tableau::StabilizerTableau;

/// Qubit Bell-paired with the ancilla in purification runs.
pub const ANCILLA_SEED_SITE: usize = 0;

/// Independent stream per trajectory: ChaCha keyed by the master seed, with
/// the trajectory id as stream number.
pub fn trajectory_rng(seed: u64, trajectory_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trajectory_id);
    rng
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectorySeries {
    pub trajectory_id: u64,
    pub layers: Vec<usize>,
    pub observables: Vec<ObservableSet>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Observable {
    SHalf,
    MiAntipodal,
    Tmi,
    /// `|I3|`.
    TmiAbs,
    SAncilla,
}

impl Observable {
    pub fn of(self, o: &ObservableSet) -> f64 {
        match self {
            Observable::SHalf => o.s_half as f64,
            Observable::MiAntipodal => o.mi_antipodal as f64,
            Observable::Tmi => o.tmi as f64,
            Observable::TmiAbs => o.tmi.abs() as f64,
            Observable::SAncilla => o.s_ancilla.unwrap_or(0) as f64,
        }
    }
}

impl TrajectorySeries {
    pub fn values(&self, obs: Observable) -> Vec<f64> {
        self.observables.iter().map(|o| obs.of(o)).collect()
    }
}

fn initial_state(config: &ExperimentConfig) -> Result<StabilizerTableau> {
    if config.purification {
        StabilizerTableau::new_ancilla_seeded_state(config.n_qubits, ANCILLA_SEED_SITE)
    } else {
        StabilizerTableau::new_plus_state(config.n_qubits)
    }
}

/// Runs one trajectory, calling `visit(checkpoint_index, layer, state)` at
/// every checkpoint. The visitor may stop the run early.
pub fn evolve<F>(config: &ExperimentConfig, trajectory_id: u64, mut visit: F) -> Result<()>
where
    F: FnMut(usize, usize, &StabilizerTableau) -> Result<ControlFlow<()>>,
{
    let wrap = |e: MocError| MocError::Trajectory { trajectory: trajectory_id, source: Box::new(e) };
    config.validate()?;
    let sampler = config.sampler()?;
    let checkpoints = config.checkpoints()?;
    let depth = config.depth()?;
    let mut rng = trajectory_rng(config.seed, trajectory_id);
    let mut state = initial_state(config)?;
    let mut next = 0;
    for layer in 1..=depth {
        let l = sampler.sample_layer(&mut rng).map_err(wrap)?;
        for (basis, i, j) in l.iter() {
            state.measure_parity(basis, i, j, &mut rng).map_err(wrap)?;
        }
        while next < checkpoints.len() && checkpoints[next] == layer {
            if visit(next, layer, &state).map_err(wrap)?.is_break() {
                return Ok(());
            }
            next += 1;
        }
    }
    Ok(())
}

pub fn run_trajectory(config: &ExperimentConfig, trajectory_id: u64) -> Result<TrajectorySeries> {
    let probes = Probes::new(config.n_qubits)?;
    let n_cp = config.checkpoint_count()?;
    let mut layers = Vec::with_capacity(n_cp);
    let mut observables = Vec::with_capacity(n_cp);
    evolve(config, trajectory_id, |k, layer, state| {
        let census = config.census && k + 1 == n_cp;
        layers.push(layer);
        observables.push(probes.evaluate(state, config.purification, census)?);
        Ok(ControlFlow::Continue(()))
    })?;
    Ok(TrajectorySeries { trajectory_id, layers, observables })
}

/// All trajectories `0..n_trajectories`, ordered by id.
pub fn run_ensemble(config: &ExperimentConfig) -> Result<Vec<TrajectorySeries>> {
    config.validate()?;
    (0..config.n_trajectories as u64).into_par_iter().map(|id| run_trajectory(config, id)).collect()
}

/// First layer at which the ancilla carries no entropy, or `None` if it is
/// still entangled after `max_layers`. A decoupled ancilla stays decoupled,
/// so this time fully describes the trajectory's `S_a(t)`.
pub fn purification_time(config: &ExperimentConfig, trajectory_id: u64, max_layers: usize) -> Result<Option<usize>> {
    let wrap = |e: MocError| MocError::Trajectory { trajectory: trajectory_id, source: Box::new(e) };
    let sampler = config.sampler()?;
    let mut rng = trajectory_rng(config.seed, trajectory_id);
    let mut state = StabilizerTableau::new_ancilla_seeded_state(config.n_qubits, ANCILLA_SEED_SITE)?;
    for layer in 1..=max_layers {
        let l = sampler.sample_layer(&mut rng).map_err(wrap)?;
        for (basis, i, j) in l.iter() {
            state.measure_parity(basis, i, j, &mut rng).map_err(wrap)?;
        }
        if ancilla_entropy(&state) == 0 {
            return Ok(Some(layer));
        }
    }
    Ok(None)
}

/// Translation-averaged `I(q_x; q_{x+r})` for `r = 1..=N/2` on the first
/// `n_system` qubits of a ring.
pub fn mi_profile(state: &StabilizerTableau, n_system: usize) -> Vec<f64> {
    let singles: Vec<usize> = (0..n_system).map(|q| state.entropy_unchecked(&[q])).collect();
    (1..=n_system / 2)
        .map(|r| {
            let total: usize = (0..n_system)
                .map(|x| {
                    let y = (x + r) % n_system;
                    let pair = if x < y { [x, y] } else { [y, x] };
                    singles[x] + singles[y] - state.entropy_unchecked(&pair)
                })
                .sum();
            total as f64 / n_system as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::BasisKind;

    fn small() -> ExperimentConfig {
        let mut c = ExperimentConfig::new(16, 1.0, 0.25, BasisKind::Random);
        c.depth = Some(100);
        c.n_checkpoints = 100;
        c.n_trajectories = 4;
        c.seed = 3;
        c
    }

    #[test]
    fn checkpoints_every_layer() {
        let s = run_trajectory(&small(), 0).unwrap();
        assert_eq!(s.layers, (1..=100).collect::<Vec<_>>());
    }

    #[test]
    fn reproducible() {
        let c = small();
        assert_eq!(run_trajectory(&c, 2).unwrap(), run_trajectory(&c, 2).unwrap());
        assert_ne!(run_trajectory(&c, 2).unwrap(), run_trajectory(&c, 3).unwrap());
    }

    #[test]
    fn zz_only_half_chain_entropy_bounded() {
        let mut c = small();
        c.basis = BasisKind::Xxz;
        c.p = Some(1.0);
        let s = run_trajectory(&c, 0).unwrap();
        assert!(s.observables.iter().all(|o| o.s_half <= 8 && o.s_half >= 0));
    }

    #[test]
    fn purification_time_is_reproducible() {
        let mut c = small();
        c.density = 0.5;
        c.basis = BasisKind::Single;
        let t = purification_time(&c, 1, 10_000).unwrap();
        assert!(t.is_some());
        assert_eq!(t, purification_time(&c, 1, 10_000).unwrap());
    }
}
