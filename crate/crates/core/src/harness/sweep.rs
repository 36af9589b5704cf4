use serde::Serialize;

use crate::error::Result;
use crate::harness::analysis::{
    classify_entanglement, classify_purification, measure_tau, steady_state, SteadyStateEstimate, TauEstimate, Verdict,
};
use crate::harness::config::{BasisKind, ExperimentConfig};
use crate::harness::trajectory::{run_ensemble, Observable};

/// One `(config, N)` cell of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub alpha: f64,
    pub density: f64,
    pub basis: BasisKind,
    pub p: Option<f64>,
    pub n_qubits: usize,
    pub s: Option<SteadyStateEstimate>,
    pub mi: Option<SteadyStateEstimate>,
    pub tmi: Option<SteadyStateEstimate>,
    pub tau: Option<TauEstimate>,
    /// `None` on success, otherwise the error that stopped the cell.
    pub error: Option<String>,
}

/// One phase-diagram point: every N of a `(alpha, density, basis, p)` group.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseRow {
    pub alpha: f64,
    pub density: f64,
    pub basis: BasisKind,
    pub p: Option<f64>,
    pub n_list: Vec<usize>,
    /// Steady values at the largest N of the group.
    pub s_mean: Option<f64>,
    pub s_stderr: Option<f64>,
    pub mi_mean: Option<f64>,
    pub tmi_mean: Option<f64>,
    pub dr2_entanglement: Option<f64>,
    pub entanglement_verdict: Option<Verdict>,
    pub dr2_purification: Option<f64>,
    pub purification_verdict: Option<Verdict>,
    pub notes: Vec<String>,
}

impl PhaseRow {
    pub fn tmi_sign(&self) -> Option<i8> {
        self.tmi_mean.map(|t| if t > 0.0 { 1 } else if t < 0.0 { -1 } else { 0 })
    }

    /// `log |I3|`, undefined when the steady value is zero.
    pub fn log_abs_tmi(&self) -> Option<f64> {
        self.tmi_mean.filter(|t| *t != 0.0).map(|t| t.abs().ln())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PhaseDiagramTable {
    pub phase: Vec<PhaseRow>,
    pub scaling: Vec<ScalingRow>,
}

fn group_key(c: &ExperimentConfig) -> ExperimentConfig {
    ExperimentConfig { n_qubits: 0, ..c.clone() }
}

fn run_cell(config: &ExperimentConfig) -> ScalingRow {
    let mut row = ScalingRow {
        alpha: config.alpha,
        density: config.density,
        basis: config.basis,
        p: config.p,
        n_qubits: config.n_qubits,
        s: None,
        mi: None,
        tmi: None,
        tau: None,
        error: None,
    };
    let run = || -> Result<_> {
        let ens = run_ensemble(config)?;
        let s = steady_state(&ens, Observable::SHalf, config.window)?;
        let mi = steady_state(&ens, Observable::MiAntipodal, config.window)?;
        let tmi = steady_state(&ens, Observable::Tmi, config.window)?;
        let tau = if config.purification { Some(measure_tau(config, config.depth()?)?) } else { None };
        Ok((s, mi, tmi, tau))
    };
    match run() {
        Ok((s, mi, tmi, tau)) => {
            row.s = Some(s);
            row.mi = Some(mi);
            row.tmi = Some(tmi);
            row.tau = tau;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Runs every cell in grid order. Cells that differ only in N form one
/// phase-diagram row, in order of first appearance. Failed cells are kept
/// with their error and the sweep continues.
pub fn sweep(grid: &[ExperimentConfig]) -> PhaseDiagramTable {
    let scaling: Vec<ScalingRow> = grid.iter().map(run_cell).collect();
    let mut keys: Vec<ExperimentConfig> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (k, c) in grid.iter().enumerate() {
        let key = group_key(c);
        match keys.iter().position(|g| *g == key) {
            Some(g) => members[g].push(k),
            None => {
                keys.push(key);
                members.push(vec![k]);
            }
        }
    }
    let phase = keys.iter().zip(&members).map(|(key, idx)| phase_row(key, idx, &scaling)).collect();
    PhaseDiagramTable { phase, scaling }
}

fn phase_row(key: &ExperimentConfig, idx: &[usize], scaling: &[ScalingRow]) -> PhaseRow {
    let mut cells: Vec<&ScalingRow> = idx.iter().map(|&k| &scaling[k]).collect();
    cells.sort_by_key(|c| c.n_qubits);
    let mut notes: Vec<String> =
        cells.iter().filter_map(|c| c.error.as_ref().map(|e| format!("N={}: {e}", c.n_qubits))).collect();
    let ok: Vec<&&ScalingRow> = cells.iter().filter(|c| c.error.is_none()).collect();
    let largest = ok.last();
    let s_points: Vec<(usize, f64)> = ok.iter().filter_map(|c| c.s.map(|s| (c.n_qubits, s.mean))).collect();
    let ent = classify_entanglement(&s_points);
    if let Err(e) = &ent {
        notes.push(format!("entanglement fit: {e}"));
    }
    let (dr2_p, verdict_p) = if key.purification {
        let t_points: Vec<(usize, TauEstimate)> = ok.iter().filter_map(|c| c.tau.map(|t| (c.n_qubits, t))).collect();
        match classify_purification(&t_points, key.is_sparse()) {
            Ok(r) => {
                if !r.excluded.is_empty() {
                    notes.push(format!("censored tau excluded for N = {:?}", r.excluded));
                }
                (Some(r.dr2), Some(r.verdict))
            }
            Err(e) => {
                notes.push(format!("purification fit: {e}"));
                (None, None)
            }
        }
    } else {
        (None, None)
    };
    PhaseRow {
        alpha: key.alpha,
        density: key.density,
        basis: key.basis,
        p: key.p,
        n_list: cells.iter().map(|c| c.n_qubits).collect(),
        s_mean: largest.and_then(|c| c.s.map(|s| s.mean)),
        s_stderr: largest.and_then(|c| c.s.map(|s| s.stderr)),
        mi_mean: largest.and_then(|c| c.mi.map(|s| s.mean)),
        tmi_mean: largest.and_then(|c| c.tmi.map(|s| s.mean)),
        dr2_entanglement: ent.as_ref().ok().map(|r| r.dr2),
        entanglement_verdict: ent.as_ref().ok().map(|r| r.verdict),
        dr2_purification: dr2_p,
        purification_verdict: verdict_p,
        notes,
    }
}
