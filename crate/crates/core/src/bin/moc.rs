use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use moc_core::harness::{
    fit_power_law, fit_purification_tau, mi_decay_profile, purification_ensemble, run_ensemble, steady_state, survival_curve,
    sweep, trajectory_rng, tss_ensemble, ExperimentConfig, Observable, TAU_FLOOR,
};
use moc_core::io::tables::{self, CrossingRow, XxzRow};
use moc_core::io::{parse_config, RunManifest, Table, DEFAULT_MAX_CELLS};
use moc_core::replica::check::statmech_report;
use moc_core::sampler::{count_crossings_mc, expected_crossings};
use moc_core::verify::verify_against_oracle;
use moc_core::{MocError, Result};

#[derive(Parser)]
#[command(name = "moc", version, about = "Long-range measurement-only Clifford circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Experiment config file.
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_CELLS)]
    max_cells: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Phase-diagram grid: steady values and scaling verdicts.
    Sweep(Common),
    /// Per-trajectory time series for every cell.
    Trajectory {
        #[command(flatten)]
        common: Common,
        /// Also measure the time to steady state of |I3|.
        #[arg(long)]
        tss: bool,
        #[arg(long, default_value_t = 0.01)]
        band: f64,
        /// Also write the steady mutual-information profile.
        #[arg(long)]
        mi_profile: bool,
    },
    /// Ancilla purification times.
    Purify {
        #[command(flatten)]
        common: Common,
        /// Layer budget per trajectory; defaults to the config depth.
        #[arg(long)]
        max_layers: Option<usize>,
    },
    /// Projective XXZ sweep over p.
    Xxz {
        #[command(flatten)]
        common: Common,
        /// Lower end of the power-law fit window (default 2).
        #[arg(long)]
        r_min: Option<usize>,
        /// Upper end of the power-law fit window (default N/4).
        #[arg(long)]
        r_max: Option<usize>,
    },
    /// Cut-crossing counts against the closed-form estimate.
    Crossings {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10_000)]
        layers: usize,
        /// Bond index; defaults to N/2.
        #[arg(long)]
        cut: Option<usize>,
    },
    /// Replica identity suite.
    StatmechCheck {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Stabilizer simulator against the dense oracle.
    Verify {
        #[arg(long, default_value_t = 8)]
        n_max: usize,
        #[arg(long, default_value_t = 200)]
        circuits: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = serde_json::json!({ "error": e.category(), "message": e.to_string() });
            eprintln!("{msg}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn prepare(common: &Common) -> Result<Vec<ExperimentConfig>> {
    let grid = parse_config(&common.config, common.max_cells)?;
    std::fs::create_dir_all(&common.out).map_err(|source| MocError::Io { path: common.out.clone(), source })?;
    Ok(grid)
}

fn emit(manifest: &mut RunManifest, dir: &Path, name: String, table: &Table) -> Result<()> {
    table.write(&dir.join(&name), moc_core::io::MANIFEST_FILE)?;
    manifest.outputs.push(name);
    Ok(())
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    use std::io::Write;
    let s = serde_json::to_string_pretty(value).map_err(|e| MocError::InvalidArgument(e.to_string()))?;
    match writeln!(std::io::stdout().lock(), "{s}") {
        // a closed pipe (e.g. `| head`) is not a failure of the run
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(MocError::Io { path: PathBuf::from("<stdout>"), source: e })
        }
        _ => Ok(()),
    }
}

fn run(command: Command) -> Result<()> {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match command {
        Command::Sweep(common) => {
            let grid = prepare(&common)?;
            let mut m = RunManifest::start(argv, grid.clone());
            let table = sweep(&grid);
            for (k, row) in table.scaling.iter().enumerate() {
                m.record(k, row.error.clone().map_or(Ok(()), Err));
            }
            emit(&mut m, &common.out, "phase_diagram.csv".into(), &tables::phase_diagram_table(&table))?;
            emit(&mut m, &common.out, "scaling.csv".into(), &tables::scaling_table(&table))?;
            m.finish();
            m.write(&common.out)?;
            print_json(&table.phase)
        }
        Command::Trajectory { common, tss, band, mi_profile } => {
            let grid = prepare(&common)?;
            let mut m = RunManifest::start(argv, grid.clone());
            let mut tss_rows = Vec::new();
            for (k, c) in grid.iter().enumerate() {
                let ens = run_ensemble(c)?;
                emit(&mut m, &common.out, format!("timeseries_{k}.csv"), &tables::time_series_table(&ens))?;
                if c.census {
                    emit(&mut m, &common.out, format!("census_{k}.csv"), &tables::bell_census_table(&ens, c.n_qubits))?;
                }
                if mi_profile {
                    let p = mi_decay_profile(c, None)?;
                    emit(&mut m, &common.out, format!("mi_profile_{k}.csv"), &tables::mi_profile_table(&p))?;
                }
                if tss {
                    tss_rows.push((c.clone(), tss_ensemble(c, Observable::TmiAbs, band)?));
                }
                m.record(k, Ok(()));
            }
            if tss {
                emit(&mut m, &common.out, "tss.csv".into(), &tables::tss_table(&tss_rows))?;
            }
            m.finish();
            m.write(&common.out)
        }
        Command::Purify { common, max_layers } => {
            let grid = prepare(&common)?;
            let mut m = RunManifest::start(argv, grid.clone());
            let mut rows = Vec::new();
            for (k, c) in grid.iter().enumerate() {
                let budget = match max_layers {
                    Some(l) => l,
                    None => c.depth()?,
                };
                let times = purification_ensemble(c, budget)?;
                let surv = survival_curve(&times, budget);
                emit(&mut m, &common.out, format!("survival_{k}.csv"), &tables::survival_table(&surv))?;
                let tau = fit_purification_tau(&surv, TAU_FLOOR).map_err(|e| e.to_string());
                m.record(k, tau.as_ref().map(|_| ()).map_err(Clone::clone));
                rows.push((c.clone(), tau));
            }
            emit(&mut m, &common.out, "purification.csv".into(), &tables::purification_table(&rows))?;
            m.finish();
            m.write(&common.out)
        }
        Command::Xxz { common, r_min, r_max } => {
            let grid = prepare(&common)?;
            let mut m = RunManifest::start(argv, grid.clone());
            let mut rows = Vec::new();
            for (k, c) in grid.iter().enumerate() {
                let ens = run_ensemble(c)?;
                let window = (r_min.unwrap_or(2), r_max.unwrap_or((c.n_qubits / 4).max(2)));
                let profile = mi_decay_profile(c, Some(window))?;
                emit(&mut m, &common.out, format!("mi_profile_{k}.csv"), &tables::mi_profile_table(&profile))?;
                rows.push(XxzRow {
                    config: c.clone(),
                    s: steady_state(&ens, Observable::SHalf, c.window)?,
                    mi: steady_state(&ens, Observable::MiAntipodal, c.window)?,
                    tmi: steady_state(&ens, Observable::Tmi, c.window)?,
                    kappa: fit_power_law(&profile.r, &profile.mean, window).map(|f| f.slope),
                });
                m.record(k, Ok(()));
            }
            emit(&mut m, &common.out, "xxz.csv".into(), &tables::xxz_table(&rows))?;
            m.finish();
            m.write(&common.out)
        }
        Command::Crossings { common, layers, cut } => {
            let grid = prepare(&common)?;
            let mut m = RunManifest::start(argv, grid.clone());
            let mut rows = Vec::new();
            for (k, c) in grid.iter().enumerate() {
                let sampler = c.sampler()?;
                let cut = cut.unwrap_or(c.n_qubits / 2);
                let mut rng = trajectory_rng(c.seed, k as u64);
                let mc_total = count_crossings_mc(&sampler, cut, layers, &mut rng)?;
                let expected_total = expected_crossings(c.n_qubits, c.alpha, sampler.m2())? * layers as f64;
                rows.push(CrossingRow { config: c.clone(), m2: sampler.m2(), cut, layers, mc_total, expected_total });
                m.record(k, Ok(()));
            }
            emit(&mut m, &common.out, "crossings.csv".into(), &tables::crossings_table(&rows))?;
            m.finish();
            m.write(&common.out)
        }
        Command::StatmechCheck { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let report = statmech_report(samples, &mut rng)?;
            print_json(&report)?;
            let failures = report.failures();
            if failures.is_empty() {
                Ok(())
            } else {
                Err(MocError::CheckFailed(failures.join("; ")))
            }
        }
        Command::Verify { n_max, circuits, seed } => {
            let report = verify_against_oracle(n_max, circuits, seed)?;
            print_json(&report)?;
            if report.mismatches == 0 {
                Ok(())
            } else {
                Err(MocError::CheckFailed(format!("{} mismatches", report.mismatches)))
            }
        }
    }
}
