//! Flat `key = value` experiment files. Comma lists on grid keys expand
//! into a Cartesian product.
//!
//! ```text
//! # random-basis desk sweep
//! N = 16, 32, 64, 128
//! alpha = 0, 1, 2, 3, 4
//! density = 0.2
//! basis = random
//! trajectories = 100
//! seed = 7
//! ```

use std::collections::HashMap;
use std::path::Path;

use crate::error::{MocError, Result};
use crate::harness::config::{BasisKind, ExperimentConfig};

/// Default cap on the number of expanded cells.
pub const DEFAULT_MAX_CELLS: usize = 10_000;

const GRID_KEYS: [&str; 6] = ["N", "alpha", "density", "basis", "p", "depth"];
const SCALAR_KEYS: [&str; 6] = ["trajectories", "checkpoints", "seed", "window", "purification", "census"];

struct Entry {
    line: usize,
    values: Vec<String>,
}

fn err(line: usize, msg: impl Into<String>) -> MocError {
    MocError::Config { line, msg: msg.into() }
}

fn parse_list<T>(e: &Entry, key: &str, f: impl Fn(&str) -> Option<T>) -> Result<Vec<T>> {
    e.values.iter().map(|v| f(v).ok_or_else(|| err(e.line, format!("bad value {v:?} for {key}")))).collect()
}

fn parse_scalar<T>(e: &Entry, key: &str, f: impl Fn(&str) -> Option<T>) -> Result<T> {
    if e.values.len() != 1 {
        return Err(err(e.line, format!("{key} takes a single value")));
    }
    parse_list(e, key, f).map(|mut v| v.remove(0))
}

fn parse_alpha(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        _ => s.parse::<f64>().ok().filter(|a| *a >= 0.0 && a.is_finite()),
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

/// Parses a config text into its grid, in the order basis, p, density,
/// alpha, depth, N (N varies fastest).
pub fn parse_config_str(text: &str, max_cells: usize) -> Result<Vec<ExperimentConfig>> {
    let mut entries: HashMap<&str, Entry> = HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| err(line, format!("expected key = value, got {body:?}")))?;
        let key = key.trim();
        let known = GRID_KEYS.iter().chain(&SCALAR_KEYS).find(|&&k| k == key).copied();
        let key = known.ok_or_else(|| err(line, format!("unknown key {key:?}")))?;
        let values: Vec<String> = value.split(',').map(|v| v.trim().to_string()).collect();
        if values.iter().any(|v| v.is_empty()) {
            return Err(err(line, format!("empty value for {key}")));
        }
        if let Some(prev) = entries.get(key) {
            return Err(err(line, format!("duplicate key {key} (first on line {})", prev.line)));
        }
        entries.insert(key, Entry { line, values });
    }

    let base = ExperimentConfig::default();
    let get = |k: &str| entries.get(k);
    let ns = match get("N") {
        Some(e) => parse_list(e, "N", |s| s.parse::<usize>().ok())?,
        None => vec![base.n_qubits],
    };
    let alphas = match get("alpha") {
        Some(e) => parse_list(e, "alpha", parse_alpha)?,
        None => vec![base.alpha],
    };
    let densities = match get("density") {
        Some(e) => parse_list(e, "density", |s| s.parse::<f64>().ok().filter(|d| (0.0..=0.5).contains(d)))?,
        None => vec![base.density],
    };
    let bases = match get("basis") {
        Some(e) => parse_list(e, "basis", BasisKind::parse)?,
        None => vec![base.basis],
    };
    let ps = match get("p") {
        Some(e) => Some(parse_list(e, "p", |s| s.parse::<f64>().ok().filter(|p| (0.0..=1.0).contains(p)))?),
        None => None,
    };
    let depths: Vec<Option<usize>> = match get("depth") {
        Some(e) => parse_list(e, "depth", |s| s.parse::<usize>().ok().filter(|&d| d > 0))?.into_iter().map(Some).collect(),
        None => vec![None],
    };
    match (&ps, bases.contains(&BasisKind::Xxz)) {
        (Some(_), false) => return Err(err(get("p").map_or(0, |e| e.line), "p is only used by the xxz basis")),
        (None, true) => return Err(err(get("basis").map_or(0, |e| e.line), "the xxz basis needs p")),
        _ => {}
    }

    let mut template = base.clone();
    if let Some(e) = get("trajectories") {
        template.n_trajectories = parse_scalar(e, "trajectories", |s| s.parse().ok().filter(|&t: &usize| t >= 2))?;
    }
    if let Some(e) = get("checkpoints") {
        template.n_checkpoints = parse_scalar(e, "checkpoints", |s| s.parse().ok().filter(|&t: &usize| t >= 1))?;
    }
    if let Some(e) = get("seed") {
        template.seed = parse_scalar(e, "seed", |s| s.parse().ok())?;
    }
    if let Some(e) = get("window") {
        template.window = parse_scalar(e, "window", |s| s.parse().ok())?;
    }
    if let Some(e) = get("purification") {
        template.purification = parse_scalar(e, "purification", parse_bool)?;
    }
    if let Some(e) = get("census") {
        template.census = parse_scalar(e, "census", parse_bool)?;
    }

    let p_count = |b: BasisKind| if b == BasisKind::Xxz { ps.as_ref().map_or(1, Vec::len) } else { 1 };
    let cells: usize = bases.iter().map(|&b| p_count(b)).sum::<usize>() * densities.len() * alphas.len() * depths.len() * ns.len();
    if cells > max_cells {
        return Err(err(0, format!("grid has {cells} cells, above the cap of {max_cells}")));
    }

    let mut grid = Vec::with_capacity(cells);
    for &basis in &bases {
        let p_values: Vec<Option<f64>> = match (&ps, basis) {
            (Some(list), BasisKind::Xxz) => list.iter().copied().map(Some).collect(),
            _ => vec![None],
        };
        for &p in &p_values {
            for &density in &densities {
                for &alpha in &alphas {
                    for &depth in &depths {
                        for &n in &ns {
                            let c = ExperimentConfig { n_qubits: n, alpha, density, basis, p, depth, ..template.clone() };
                            c.validate().map_err(|e| err(0, format!("cell {} (N = {n}, alpha = {alpha}): {e}", grid.len())))?;
                            grid.push(c);
                        }
                    }
                }
            }
        }
    }
    Ok(grid)
}

pub fn parse_config(path: &Path, max_cells: usize) -> Result<Vec<ExperimentConfig>> {
    let text =
        std::fs::read_to_string(path).map_err(|source| MocError::Io { path: path.to_path_buf(), source })?;
    parse_config_str(&text, max_cells)
}

/// One config as a file that parses back to exactly that config.
pub fn serialize_config(c: &ExperimentConfig) -> String {
    let alpha = if c.alpha.is_infinite() { "inf".to_string() } else { c.alpha.to_string() };
    let mut out = format!(
        "N = {}\nalpha = {alpha}\ndensity = {}\nbasis = {}\n",
        c.n_qubits,
        c.density,
        c.basis.label()
    );
    if let Some(p) = c.p {
        out += &format!("p = {p}\n");
    }
    if let Some(d) = c.depth {
        out += &format!("depth = {d}\n");
    }
    out += &format!(
        "trajectories = {}\ncheckpoints = {}\nseed = {}\nwindow = {}\npurification = {}\ncensus = {}\n",
        c.n_trajectories, c.n_checkpoints, c.seed, c.window, c.purification, c.census
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let g = parse_config_str("N = 32\nalpha = 2\ndensity = 0.2\nbasis = single\nseed = 9\n", 10).unwrap();
        assert_eq!(g.len(), 1);
        let c = &g[0];
        assert_eq!((c.n_qubits, c.alpha, c.density, c.basis, c.seed), (32, 2.0, 0.2, BasisKind::Single, 9));
        assert_eq!(c.n_checkpoints, ExperimentConfig::default().n_checkpoints);
    }

    #[test]
    fn lists_expand_to_grid() {
        let g = parse_config_str("alpha = 0, 4\nN = 16, 32\n", 10).unwrap();
        let cells: Vec<(f64, usize)> = g.iter().map(|c| (c.alpha, c.n_qubits)).collect();
        assert_eq!(cells, vec![(0.0, 16), (0.0, 32), (4.0, 16), (4.0, 32)]);
        assert!(parse_config_str("alpha = 0, 4\nN = 16, 32\n", 3).is_err());
    }

    #[test]
    fn errors_name_lines() {
        let line = |text: &str| match parse_config_str(text, 10) {
            Err(MocError::Config { line, .. }) => line,
            other => panic!("expected config error, got {other:?}"),
        };
        assert_eq!(line("N = 16\n# note\nN = 32\n"), 3);
        assert_eq!(line("N = 16\nbogus = 1\n"), 2);
        assert_eq!(line("N = sixteen\n"), 1);
        assert_eq!(line("seed = 1, 2\n"), 1);
        assert_eq!(line("N = 16\np = 0.5\n"), 2);
        assert_eq!(line("basis = xxz\n"), 1);
        assert_eq!(line("alpha\n"), 1);
    }

    #[test]
    fn xxz_p_applies_only_to_xxz() {
        let g = parse_config_str("basis = random, xxz\np = 0.2, 0.8\nalpha = inf\ndensity = 0\n", 10).unwrap();
        let cells: Vec<(BasisKind, Option<f64>)> = g.iter().map(|c| (c.basis, c.p)).collect();
        assert_eq!(cells, vec![(BasisKind::Random, None), (BasisKind::Xxz, Some(0.2)), (BasisKind::Xxz, Some(0.8))]);
    }

    #[test]
    fn round_trip() {
        let mut c = ExperimentConfig::new(24, f64::INFINITY, 0.0, BasisKind::Xxz);
        c.p = Some(1.0 / 3.0);
        c.depth = Some(500);
        c.purification = true;
        assert_eq!(parse_config_str(&serialize_config(&c), 1).unwrap(), vec![c]);
    }
}
