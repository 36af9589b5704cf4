//! Stabilizer simulator against the dense state-vector oracle on random
//! measurement-only circuits with paired outcomes.

use serde::Serialize;

use crate::dense::DenseState;
use crate::error::{MocError, Result};
use crate::harness::trajectory::trajectory_rng;
use crate::mask::SubsystemMask;
use crate::pauli::PauliString;
use crate::sampler::{pairs_per_layer, BasisMode, CircuitSampler};
use crate::tableau::StabilizerTableau;

/// Tolerance on dense entropies and Born probabilities.
pub const ORACLE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub circuits: usize,
    pub measurements: usize,
    pub entropy_checks: usize,
    pub mismatches: usize,
    pub max_deviation: f64,
    /// First few mismatches, for the report.
    pub examples: Vec<String>,
}

const ALPHAS: [f64; 6] = [0.0, 1.0, 2.0, 3.0, 4.0, f64::INFINITY];
const DENSITIES: [f64; 3] = [0.0, 0.25, 0.5];

/// Runs `n_circuits` random circuits on up to `n_max` qubits. Every
/// measurement outcome drawn by the tableau is forced on the dense state;
/// after each layer every bipartition's entropy is compared.
pub fn verify_against_oracle(n_max: usize, n_circuits: usize, seed: u64) -> Result<VerifyReport> {
    if !(4..=crate::dense::DENSE_MAX_QUBITS).contains(&n_max) {
        return Err(MocError::InvalidArgument(format!(
            "n_max must lie in 4..={}, got {n_max}",
            crate::dense::DENSE_MAX_QUBITS
        )));
    }
    let mut report = VerifyReport::default();
    for c in 0..n_circuits {
        let mut rng = trajectory_rng(seed, c as u64);
        let with_ancilla = c % 2 == 1;
        let span = n_max - 3 - usize::from(with_ancilla);
        let n_system = 4 + c % span;
        let alpha = ALPHAS[c % ALPHAS.len()];
        let density = DENSITIES[(c / ALPHAS.len()) % DENSITIES.len()];
        let mode = match c % 3 {
            0 => BasisMode::Random,
            1 => BasisMode::Single,
            _ => BasisMode::Xxz { p: 0.7 },
        };
        // odd sizes round down to the even part so density 0.5 still packs
        let m2 = pairs_per_layer(n_system - n_system % 2, density)?;
        let sampler = CircuitSampler::new(n_system, alpha, m2, mode)?;
        let (mut tab, mut dense) = if with_ancilla {
            (StabilizerTableau::new_ancilla_seeded_state(n_system, 0)?, DenseState::ancilla_seeded_state(n_system, 0)?)
        } else {
            (StabilizerTableau::new_plus_state(n_system)?, DenseState::plus_state(n_system)?)
        };
        let n = tab.n_qubits();
        for _ in 0..3 * n_system {
            let layer = sampler.sample_layer(&mut rng)?;
            for (basis, i, j) in layer.iter() {
                let op = PauliString::parity_check(n, basis, i, j);
                let p_plus = dense.prob_plus(&op)?;
                let out = tab.measure_parity(basis, i, j, &mut rng)?;
                let expected = match (out.deterministic, out.eigenvalue) {
                    (true, 1) => 1.0,
                    (true, _) => 0.0,
                    (false, _) => 0.5,
                };
                report.measurements += 1;
                note(&mut report, (p_plus - expected).abs(), || {
                    format!("circuit {c}: P(+1) of {op} is {p_plus}, tableau says {expected}")
                });
                dense.measure_pauli_forced(&op, out.eigenvalue)?;
            }
            // every bipartition, up to complement
            for bits in 1u64..(1u64 << (n - 1)) {
                let region = SubsystemMask::from_bits(bits);
                let exact = tab.entropy(&region)? as f64;
                let approx = dense.entropy(&region)?;
                report.entropy_checks += 1;
                note(&mut report, (exact - approx).abs(), || {
                    format!("circuit {c}: S({:?}) tableau {exact} dense {approx}", region.members())
                });
            }
        }
        report.circuits += 1;
    }
    Ok(report)
}

fn note(report: &mut VerifyReport, dev: f64, msg: impl FnOnce() -> String) {
    report.max_deviation = report.max_deviation.max(dev);
    if dev > ORACLE_TOL {
        report.mismatches += 1;
        if report.examples.len() < 5 {
            report.examples.push(msg());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_agrees() {
        let r = verify_against_oracle(6, 12, 3).unwrap();
        assert_eq!(r.circuits, 12);
        assert_eq!(r.mismatches, 0, "{:?}", r.examples);
        assert!(r.entropy_checks > 0);
        assert!(verify_against_oracle(3, 1, 0).is_err());
    }
}
