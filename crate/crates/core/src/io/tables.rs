//! Versioned CSV tables. Each file starts with `# <schema> v1 manifest=<file>`
//! followed by a header row; floats carry 17 significant digits and missing
//! values are empty fields.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::error::{MocError, Result};
use crate::harness::analysis::{MiProfile, TauEstimate, TssEnsemble};
use crate::harness::config::ExperimentConfig;
use crate::harness::sweep::PhaseDiagramTable;
use crate::harness::trajectory::TrajectorySeries;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub schema: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(schema: &'static str, header: &[&'static str]) -> Self {
        Self { schema, header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "{} row width", self.schema);
        self.rows.push(row);
    }

    pub fn to_bytes(&self, manifest: &str) -> Result<Vec<u8>> {
        let mut out = format!("# {} v{SCHEMA_VERSION} manifest={manifest}\n", self.schema).into_bytes();
        let mut w = csv::Writer::from_writer(&mut out);
        let csv_err = |e: csv::Error| MocError::InvalidArgument(format!("csv: {e}"));
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush().map_err(|e| MocError::InvalidArgument(format!("csv: {e}")))?;
        drop(w);
        Ok(out)
    }

    pub fn write(&self, path: &Path, manifest: &str) -> Result<()> {
        let io = |source| MocError::Io { path: path.to_path_buf(), source };
        let bytes = self.to_bytes(manifest)?;
        File::create(path).and_then(|mut f| f.write_all(&bytes)).map_err(io)
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn alpha(a: f64) -> String {
    if a.is_infinite() {
        "inf".into()
    } else {
        fmt_f64(a)
    }
}

fn cell_keys(c: &ExperimentConfig) -> Vec<String> {
    vec![alpha(c.alpha), fmt_f64(c.density), c.basis.label().into(), opt(c.p), c.n_qubits.to_string()]
}

const CELL_HEADER: [&str; 5] = ["alpha", "density", "basis", "p", "N"];

fn with_cell(rest: &[&'static str]) -> Vec<&'static str> {
    CELL_HEADER.iter().chain(rest).copied().collect()
}

pub fn phase_diagram_table(t: &PhaseDiagramTable) -> Table {
    let mut table = Table::new(
        "phase-diagram",
        &[
            "alpha",
            "density",
            "basis",
            "p",
            "N_list",
            "s_mean",
            "s_stderr",
            "mi_mean",
            "tmi_mean",
            "tmi_sign",
            "log_abs_tmi",
            "dr2_entanglement",
            "entanglement_verdict",
            "dr2_purification",
            "purification_verdict",
            "notes",
        ],
    );
    for r in &t.phase {
        table.push(vec![
            alpha(r.alpha),
            fmt_f64(r.density),
            r.basis.label().into(),
            opt(r.p),
            r.n_list.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(";"),
            opt(r.s_mean),
            opt(r.s_stderr),
            opt(r.mi_mean),
            opt(r.tmi_mean),
            r.tmi_sign().map(|s| s.to_string()).unwrap_or_default(),
            opt(r.log_abs_tmi()),
            opt(r.dr2_entanglement),
            r.entanglement_verdict.map(|v| v.label().to_string()).unwrap_or_default(),
            opt(r.dr2_purification),
            r.purification_verdict.map(|v| v.label().to_string()).unwrap_or_default(),
            r.notes.join("; "),
        ]);
    }
    table
}

pub fn scaling_table(t: &PhaseDiagramTable) -> Table {
    let mut table = Table::new(
        "scaling",
        &with_cell(&[
            "s_mean",
            "s_stderr",
            "mi_mean",
            "mi_stderr",
            "tmi_mean",
            "tmi_stderr",
            "tau",
            "tau_censored",
            "error",
        ]),
    );
    for r in &t.scaling {
        let est = |e: Option<crate::harness::analysis::SteadyStateEstimate>| {
            [opt(e.map(|e| e.mean)), opt(e.map(|e| e.stderr))]
        };
        let mut row =
            vec![alpha(r.alpha), fmt_f64(r.density), r.basis.label().into(), opt(r.p), r.n_qubits.to_string()];
        row.extend(est(r.s));
        row.extend(est(r.mi));
        row.extend(est(r.tmi));
        row.push(opt(r.tau.map(|t| t.tau)));
        row.push(r.tau.map(|t| t.censored.to_string()).unwrap_or_default());
        row.push(r.error.clone().unwrap_or_default());
        table.push(row);
    }
    table
}

/// One row per (trajectory, checkpoint), trajectories in id order.
pub fn time_series_table(ensemble: &[TrajectorySeries]) -> Table {
    let mut table = Table::new("time-series", &["trajectory_id", "layer", "s", "mi", "tmi", "s_ancilla"]);
    let mut sorted: Vec<&TrajectorySeries> = ensemble.iter().collect();
    sorted.sort_by_key(|t| t.trajectory_id);
    for t in sorted {
        for (layer, o) in t.layers.iter().zip(&t.observables) {
            table.push(vec![
                t.trajectory_id.to_string(),
                layer.to_string(),
                o.s_half.to_string(),
                o.mi_antipodal.to_string(),
                o.tmi.to_string(),
                o.s_ancilla.map(|s| s.to_string()).unwrap_or_default(),
            ]);
        }
    }
    table
}

/// Mean Bell-pair count per distance over the final-checkpoint censuses,
/// `r = 1..=N/2`, zero-filled.
pub fn bell_census_table(ensemble: &[TrajectorySeries], n_qubits: usize) -> Table {
    let mut table = Table::new("bell-census", &["r", "mean_count"]);
    let mut sums = vec![0.0f64; n_qubits / 2];
    let mut count = 0usize;
    for t in ensemble {
        if let Some(h) = t.observables.last().and_then(|o| o.bell_histogram.as_ref()) {
            count += 1;
            for (s, &c) in sums.iter_mut().zip(h) {
                *s += f64::from(c);
            }
        }
    }
    for (k, s) in sums.iter().enumerate() {
        let mean = if count > 0 { s / count as f64 } else { 0.0 };
        table.push(vec![(k + 1).to_string(), fmt_f64(mean)]);
    }
    table
}

pub fn survival_table(survival: &[f64]) -> Table {
    let mut table = Table::new("survival", &["t", "s_ancilla_mean"]);
    for (t, s) in survival.iter().enumerate() {
        table.push(vec![t.to_string(), fmt_f64(*s)]);
    }
    table
}

pub fn purification_table(rows: &[(ExperimentConfig, std::result::Result<TauEstimate, String>)]) -> Table {
    let mut table = Table::new("purification", &with_cell(&["tau", "censored", "r2", "points", "error"]));
    for (c, r) in rows {
        let mut row = cell_keys(c);
        match r {
            Ok(t) => row.extend([fmt_f64(t.tau), t.censored.to_string(), opt(t.r2), t.points.to_string(), String::new()]),
            Err(e) => row.extend([String::new(), String::new(), String::new(), String::new(), e.clone()]),
        }
        table.push(row);
    }
    table
}

pub fn mi_profile_table(p: &MiProfile) -> Table {
    let mut table = Table::new("mi-profile", &["r", "mi_mean", "mi_stderr"]);
    for k in 0..p.r.len() {
        table.push(vec![p.r[k].to_string(), fmt_f64(p.mean[k]), fmt_f64(p.stderr[k])]);
    }
    table
}

pub struct XxzRow {
    pub config: ExperimentConfig,
    pub s: crate::harness::analysis::SteadyStateEstimate,
    pub mi: crate::harness::analysis::SteadyStateEstimate,
    pub tmi: crate::harness::analysis::SteadyStateEstimate,
    pub kappa: Option<f64>,
}

pub fn xxz_table(rows: &[XxzRow]) -> Table {
    let mut table = Table::new(
        "xxz",
        &["p", "N", "s_mean", "s_stderr", "mi_mean", "mi_stderr", "tmi_mean", "tmi_stderr", "kappa"],
    );
    for r in rows {
        table.push(vec![
            opt(r.config.p),
            r.config.n_qubits.to_string(),
            fmt_f64(r.s.mean),
            fmt_f64(r.s.stderr),
            fmt_f64(r.mi.mean),
            fmt_f64(r.mi.stderr),
            fmt_f64(r.tmi.mean),
            fmt_f64(r.tmi.stderr),
            opt(r.kappa),
        ]);
    }
    table
}

pub struct CrossingRow {
    pub config: ExperimentConfig,
    pub m2: usize,
    pub cut: usize,
    pub layers: usize,
    pub mc_total: u64,
    pub expected_total: f64,
}

impl CrossingRow {
    /// Poisson z-score of the Monte Carlo total.
    pub fn z(&self) -> f64 {
        (self.mc_total as f64 - self.expected_total) / self.expected_total.sqrt()
    }
}

pub fn crossings_table(rows: &[CrossingRow]) -> Table {
    let mut table =
        Table::new("crossings", &with_cell(&["m2", "cut", "layers", "mc_total", "expected_total", "z"]));
    for r in rows {
        let mut row = cell_keys(&r.config);
        row.extend([
            r.m2.to_string(),
            r.cut.to_string(),
            r.layers.to_string(),
            r.mc_total.to_string(),
            fmt_f64(r.expected_total),
            fmt_f64(r.z()),
        ]);
        table.push(row);
    }
    table
}

pub fn tss_table(rows: &[(ExperimentConfig, TssEnsemble)]) -> Table {
    let mut table = Table::new("tss", &with_cell(&["steady_mean", "tss_mean", "tss_stderr", "unreached"]));
    for (c, t) in rows {
        let mut row = cell_keys(c);
        row.extend([fmt_f64(t.steady.mean), fmt_f64(t.mean), fmt_f64(t.stderr), t.unreached.to_string()]);
        table.push(row);
    }
    table
}
