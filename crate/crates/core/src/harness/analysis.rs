use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{MocError, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::trajectory::{evolve, mi_profile, purification_time, Observable, TrajectorySeries};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SteadyStateEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub window: usize,
    pub samples: usize,
}

/// Mean and standard error over every (trajectory, final-window checkpoint)
/// sample.
pub fn steady_state(ensemble: &[TrajectorySeries], obs: Observable, window: usize) -> Result<SteadyStateEstimate> {
    if ensemble.len() < 2 {
        return Err(MocError::InvalidArgument("steady state needs at least two trajectories".into()));
    }
    let mut xs = Vec::with_capacity(ensemble.len() * window);
    for t in ensemble {
        let len = t.observables.len();
        if window == 0 || window > len {
            return Err(MocError::InvalidArgument(format!("window {window} exceeds {len} checkpoints")));
        }
        xs.extend(t.observables[len - window..].iter().map(|o| obs.of(o)));
    }
    let (mean, stderr) = mean_stderr(&xs);
    Ok(SteadyStateEstimate { mean, stderr, window, samples: xs.len() })
}

pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Ensemble mean of one observable at every checkpoint.
pub fn ensemble_mean_series(ensemble: &[TrajectorySeries], obs: Observable) -> Vec<f64> {
    let len = ensemble.first().map_or(0, |t| t.observables.len());
    (0..len)
        .map(|k| ensemble.iter().map(|t| obs.of(&t.observables[k])).sum::<f64>() / ensemble.len() as f64)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn fit_linear(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(MocError::Fit(format!("need matching samples, got {} and {}", xs.len(), ys.len())));
    }
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(MocError::Fit("abscissae are all equal".into()));
    }
    if syy == 0.0 {
        return Err(MocError::Fit("constant data".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    Ok(LinearFit { slope, intercept, r2: 1.0 - ss_res / syy })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Linear,
    Logarithmic,
    Exponential,
    NLogN,
}

impl Model {
    pub fn label(self) -> &'static str {
        match self {
            Model::Linear => "linear",
            Model::Logarithmic => "logarithmic",
            Model::Exponential => "exponential",
            Model::NLogN => "nlogn",
        }
    }

    /// Fits `y = a f(N) + b`; the exponential model fits `ln y = k N + ln A`.
    fn fit(self, ns: &[f64], ys: &[f64]) -> Result<LinearFit> {
        match self {
            Model::Linear => fit_linear(ns, ys),
            Model::Logarithmic => fit_linear(&ns.iter().map(|n| n.ln()).collect::<Vec<_>>(), ys),
            Model::NLogN => fit_linear(&ns.iter().map(|n| n * n.ln()).collect::<Vec<_>>(), ys),
            Model::Exponential => {
                if ys.iter().any(|&y| y <= 0.0) {
                    return Err(MocError::Fit("exponential model needs positive data".into()));
                }
                fit_linear(ns, &ys.iter().map(|y| y.ln()).collect::<Vec<_>>())
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Volume,
    SubVolume,
    Purifying,
    NonPurifying,
    Logarithmic,
    NLogN,
    Linear,
    Indeterminate,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Volume => "volume",
            Verdict::SubVolume => "sub-volume",
            Verdict::Purifying => "purifying",
            Verdict::NonPurifying => "non-purifying",
            Verdict::Logarithmic => "logarithmic",
            Verdict::NLogN => "nlogn",
            Verdict::Linear => "linear",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

/// Two-model contest decided by the sign of `dr2 = r2(model) - r2(competitor)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub model: Model,
    pub fit: LinearFit,
    pub competitor: Model,
    pub competitor_fit: LinearFit,
    pub dr2: f64,
    pub verdict: Verdict,
    pub excluded: Vec<usize>,
}

fn contest(points: &[(usize, f64)], model: Model, competitor: Model, wins: Verdict, loses: Verdict) -> Result<FitReport> {
    if points.len() < 4 {
        return Err(MocError::Fit(format!("need at least 4 system sizes, got {}", points.len())));
    }
    let ns: Vec<f64> = points.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let fit = model.fit(&ns, &ys)?;
    let competitor_fit = competitor.fit(&ns, &ys)?;
    let dr2 = fit.r2 - competitor_fit.r2;
    let verdict = if dr2 > 0.0 {
        wins
    } else if dr2 < 0.0 {
        loses
    } else {
        Verdict::Indeterminate
    };
    Ok(FitReport { model, fit, competitor, competitor_fit, dr2, verdict, excluded: Vec::new() })
}

/// Linear against logarithmic growth of the steady half-chain entropy.
pub fn classify_entanglement(points: &[(usize, f64)]) -> Result<FitReport> {
    contest(points, Model::Linear, Model::Logarithmic, Verdict::Volume, Verdict::SubVolume)
}

/// Purification time in layers, or a lower bound when censored.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TauEstimate {
    pub tau: f64,
    pub censored: bool,
    pub r2: Option<f64>,
    pub points: usize,
}

/// Exponential against linear growth of `tau(N)`; sparse runs use `tau / N`.
/// Censored sizes are left out and listed in `excluded`.
pub fn classify_purification(points: &[(usize, TauEstimate)], sparse_limit: bool) -> Result<FitReport> {
    let excluded: Vec<usize> = points.iter().filter(|p| p.1.censored).map(|p| p.0).collect();
    let used: Vec<(usize, f64)> = points
        .iter()
        .filter(|p| !p.1.censored)
        .map(|&(n, t)| (n, if sparse_limit { t.tau / n as f64 } else { t.tau }))
        .collect();
    let mut report = contest(&used, Model::Exponential, Model::Linear, Verdict::NonPurifying, Verdict::Purifying)?;
    report.excluded = excluded;
    Ok(report)
}

/// `log N` against `N log N` (sparse) or against linear (dense) growth of
/// the time to reach steady state.
pub fn classify_tss(points: &[(usize, f64)], sparse_limit: bool) -> Result<FitReport> {
    if sparse_limit {
        contest(points, Model::NLogN, Model::Logarithmic, Verdict::NLogN, Verdict::Logarithmic)
    } else {
        contest(points, Model::Logarithmic, Model::Linear, Verdict::Logarithmic, Verdict::Linear)
    }
}

/// Fraction of trajectories whose ancilla is still entangled after `t`
/// layers, for `t = 0..=max_layers`.
pub fn survival_curve(times: &[Option<usize>], max_layers: usize) -> Vec<f64> {
    let total = times.len() as f64;
    let mut purified_at = vec![0usize; max_layers + 1];
    for t in times.iter().flatten() {
        if *t <= max_layers {
            purified_at[*t] += 1;
        }
    }
    let mut alive = times.len();
    purified_at
        .iter()
        .map(|&k| {
            alive -= k;
            alive as f64 / total
        })
        .collect()
}

/// Default floor on the averaged ancilla entropy for the decay fit.
pub const TAU_FLOOR: f64 = 1e-3;

/// Fits `ln S(t) = -t / tau + c` over the layers where `S > floor`.
pub fn fit_purification_tau(series: &[f64], floor: f64) -> Result<TauEstimate> {
    if series.is_empty() {
        return Err(MocError::Fit("empty purification series".into()));
    }
    let min = series.iter().copied().fold(f64::INFINITY, f64::min);
    let (ts, ys): (Vec<f64>, Vec<f64>) = series
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > floor)
        .map(|(t, &s)| (t as f64, s.ln()))
        .unzip();
    if min >= 0.9 {
        let last = *series.last().expect("non-empty");
        let horizon = (series.len() - 1) as f64;
        let tau = if last < 1.0 { -horizon / last.ln() } else { f64::INFINITY };
        return Ok(TauEstimate { tau, censored: true, r2: None, points: ts.len() });
    }
    let fit = fit_linear(&ts, &ys)?;
    if fit.slope >= 0.0 {
        return Err(MocError::Fit(format!("non-decaying purification fit (slope {})", fit.slope)));
    }
    Ok(TauEstimate { tau: -1.0 / fit.slope, censored: false, r2: Some(fit.r2), points: ts.len() })
}

/// Purification times for every trajectory of `config`, ordered by id.
pub fn purification_ensemble(config: &ExperimentConfig, max_layers: usize) -> Result<Vec<Option<usize>>> {
    config.sampler()?;
    (0..config.n_trajectories as u64)
        .into_par_iter()
        .map(|id| purification_time(config, id, max_layers))
        .collect()
}

/// Runs the purification ensemble and fits tau.
pub fn measure_tau(config: &ExperimentConfig, max_layers: usize) -> Result<TauEstimate> {
    let times = purification_ensemble(config, max_layers)?;
    fit_purification_tau(&survival_curve(&times, max_layers), TAU_FLOOR)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TssResult {
    pub layer: Option<usize>,
    /// The steady mean was zero, so the band is `band * max|series|`.
    pub absolute_band: bool,
}

/// First checkpoint after which `series` stays within the band around
/// `steady_mean` for the rest of the run.
pub fn time_to_steady_state(series: &[f64], layers: &[usize], steady_mean: f64, band: f64) -> Result<TssResult> {
    if series.len() != layers.len() {
        return Err(MocError::InvalidArgument("series and layer lists differ in length".into()));
    }
    let (width, absolute_band) = if steady_mean != 0.0 {
        (band * steady_mean.abs(), false)
    } else {
        (band * series.iter().fold(0.0f64, |m, x| m.max(x.abs())), true)
    };
    let inside = |x: f64| (x - steady_mean).abs() <= width;
    let mut start = None;
    for (k, &x) in series.iter().enumerate().rev() {
        if inside(x) {
            start = Some(k);
        } else {
            break;
        }
    }
    Ok(TssResult { layer: start.map(|k| layers[k]), absolute_band })
}

/// Per-trajectory time to steady state measured as first passage.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TssEnsemble {
    pub steady: SteadyStateEstimate,
    /// First layer with `obs >= (1 - band) * steady mean`, per trajectory.
    pub layers: Vec<Option<usize>>,
    pub mean: f64,
    pub stderr: f64,
    pub unreached: usize,
}

/// Steady value from the regular checkpoint run, then a replay of every
/// trajectory (same stream) probing `obs` after each layer until it first
/// reaches `(1 - band)` of the steady mean. Integer-valued observables jump
/// over a narrow band, so reaching it from below counts as entry.
pub fn tss_ensemble(config: &ExperimentConfig, obs: Observable, band: f64) -> Result<TssEnsemble> {
    let ensemble = crate::harness::trajectory::run_ensemble(config)?;
    let steady = steady_state(&ensemble, obs, config.window)?;
    if steady.mean <= 0.0 {
        return Err(MocError::InvalidArgument(format!("steady mean {} is not positive", steady.mean)));
    }
    let target = (1.0 - band) * steady.mean;
    let probes = crate::observables::Probes::new(config.n_qubits)?;
    let depth = config.depth()?;
    let mut probe_cfg = config.clone();
    probe_cfg.n_checkpoints = depth;
    probe_cfg.window = 1;
    let layers: Vec<Option<usize>> = (0..config.n_trajectories as u64)
        .into_par_iter()
        .map(|id| {
            let mut hit = None;
            evolve(&probe_cfg, id, |_, layer, state| {
                if obs.of(&probes.evaluate(state, config.purification, false)?) >= target {
                    hit = Some(layer);
                    return Ok(ControlFlow::Break(()));
                }
                Ok(ControlFlow::Continue(()))
            })?;
            Ok(hit)
        })
        .collect::<Result<_>>()?;
    let reached: Vec<f64> = layers.iter().flatten().map(|&l| l as f64).collect();
    if reached.is_empty() {
        return Err(MocError::Fit("no trajectory reached the steady band".into()));
    }
    let (mean, stderr) = mean_stderr(&reached);
    Ok(TssEnsemble { steady, unreached: layers.len() - reached.len(), layers, mean, stderr })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MiProfile {
    /// Distances `1..=N/2`.
    pub r: Vec<usize>,
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub kappa: Option<f64>,
    pub kappa_r2: Option<f64>,
    pub window: (usize, usize),
}

/// Power-law exponent `kappa` of `I(r) ~ r^-kappa` over `r` in `window`
/// (inclusive), skipping non-positive values. `None` if fewer than two
/// usable points remain.
pub fn fit_power_law(r: &[usize], values: &[f64], window: (usize, usize)) -> Option<LinearFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = r
        .iter()
        .zip(values)
        .filter(|(&r, &v)| r >= window.0 && r <= window.1 && v > 0.0)
        .map(|(&r, &v)| ((r as f64).ln(), v.ln()))
        .unzip();
    fit_linear(&xs, &ys).ok().map(|f| LinearFit { slope: -f.slope, ..f })
}

/// Steady-state `I(q_0; q_r)` profile, averaged over trajectories, the final
/// window of checkpoints and all translations of the ring.
pub fn mi_decay_profile(config: &ExperimentConfig, window: Option<(usize, usize)>) -> Result<MiProfile> {
    config.validate()?;
    let n = config.n_qubits;
    let n_cp = config.checkpoint_count()?;
    let first = n_cp - config.window;
    let per_traj: Vec<Vec<f64>> = (0..config.n_trajectories as u64)
        .into_par_iter()
        .map(|id| {
            let mut acc = vec![0.0; n / 2];
            evolve(config, id, |k, _, state| {
                if k >= first {
                    for (a, v) in acc.iter_mut().zip(mi_profile(state, n)) {
                        *a += v / config.window as f64;
                    }
                }
                Ok(ControlFlow::Continue(()))
            })?;
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let r: Vec<usize> = (1..=n / 2).collect();
    let (mean, stderr): (Vec<f64>, Vec<f64>) = (0..n / 2)
        .map(|k| mean_stderr(&per_traj.iter().map(|t| t[k]).collect::<Vec<_>>()))
        .unzip();
    let window = window.unwrap_or((2, (n / 4).max(2)));
    let fit = fit_power_law(&r, &mean, window);
    Ok(MiProfile { r, mean, stderr, kappa: fit.map(|f| f.slope), kappa_r2: fit.map(|f| f.r2), window })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DepthGuard {
    pub half: SteadyStateEstimate,
    pub full: SteadyStateEstimate,
    /// `|full - half|` in units of the combined standard error.
    pub z: f64,
    pub insufficient: bool,
}

/// Compares steady-state values at half and full depth; a gap above three
/// combined standard errors flags the run as too short.
pub fn depth_guard(config: &ExperimentConfig, ensemble: &[TrajectorySeries], obs: Observable) -> Result<DepthGuard> {
    let full = steady_state(ensemble, obs, config.window)?;
    let mut half_cfg = config.clone();
    half_cfg.depth = Some(config.depth()? / 2);
    half_cfg.validate()?;
    let half_ens: Vec<TrajectorySeries> = (0..config.n_trajectories as u64)
        .into_par_iter()
        .map(|id| crate::harness::trajectory::run_trajectory(&half_cfg, id))
        .collect::<Result<_>>()?;
    let half = steady_state(&half_ens, obs, config.window)?;
    let se = (full.stderr.powi(2) + half.stderr.powi(2)).sqrt();
    let gap = (full.mean - half.mean).abs();
    let z = if se > 0.0 {
        gap / se
    } else if gap > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(DepthGuard { half, full, z, insufficient: z > 3.0 })
}
