//! Experiment orchestration: single runs, sweeps, corrections, result files.

pub mod config;
pub mod results;
pub mod sampling;
pub mod verify;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::noise::{apply_error_model, ErrorKind, ErrorModel, LogicQubit};
use crate::oracle::{self, ORACLE_TOL};
use crate::protocol::{classify_and_route, noisy_pair, run_routed, Route};
use crate::state::{make_logic_bell, Bell, Ensemble};

pub use config::{ExperimentConfig, Mode};
pub use results::{read_csv, write_csv, ResultRow, CSV_HEADER};
pub use verify::{run_verify, VerifyReport};

/// The error model a run applies at fidelity `f`. Physical errors hit
/// logic qubit A at the configured flip position.
pub fn error_model(cfg: &ExperimentConfig, f: f64) -> Result<ErrorModel> {
    let m = match cfg.error {
        ErrorKind::LogicBitFlip => ErrorModel::logic_bitflip(f),
        ErrorKind::LogicPhaseFlip => ErrorModel::logic_phaseflip(f),
        ErrorKind::PhysBitFlip => ErrorModel::phys_bitflip(f, LogicQubit::A, cfg.flip_index()),
        ErrorKind::PhysPhaseFlip => ErrorModel::phys_phaseflip(f, LogicQubit::A, cfg.flip_index()),
    };
    m.map_err(|e| Error::InvalidConfig(e.to_string()))
}

fn elapsed_ms(cfg: &ExperimentConfig, start: Instant) -> f64 {
    if cfg.timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    }
}

/// All rounds for one input fidelity.
pub fn run_point(cfg: &ExperimentConfig, f: f64) -> Result<Vec<ResultRow>> {
    let model = error_model(cfg, f)?;
    let n = cfg.n;
    let row = |round, input_fidelity, output_fidelity, success_probability, wall_time_ms| ResultRow {
        n,
        error_kind: cfg.error,
        round,
        input_fidelity,
        output_fidelity,
        success_probability,
        shots: cfg.shots,
        seed: cfg.seed,
        wall_time_ms,
    };
    let route = classify_and_route(&model);
    if route == Route::CorrectBitFlip && model.position == 0 {
        return Err(Error::UnsupportedInput(format!(
            "bit flip on control mode {}",
            model.target.mode(0)
        )));
    }
    let start = Instant::now();

    if cfg.shots == 0 {
        let outcomes = run_routed(&model, n, cfg.rounds)?;
        let rows: Vec<ResultRow> = outcomes
            .iter()
            .map(|o| {
                row(
                    o.rounds_used,
                    o.input_fidelity,
                    o.fidelity,
                    o.success_probability,
                    elapsed_ms(cfg, start),
                )
            })
            .collect();
        if cfg.oracle {
            check_against_oracle(&model, n, &outcomes)?;
        }
        return Ok(rows);
    }

    let initial = apply_error_model(&Ensemble::pure(make_logic_bell(n, Bell::PhiPlus)?), &model)?;
    match route {
        Route::CorrectBitFlip => {
            let s = sampling::sample_correction(&initial, model.target, cfg.shots, cfg.seed)?;
            Ok(vec![row(1, f, s.fidelity, s.success_probability, elapsed_ms(cfg, start))])
        }
        Route::Purify(basis) => {
            let mut rows = Vec::with_capacity(cfg.rounds);
            let mut input = initial;
            let mut input_f = f;
            for round in 1..=cfg.rounds {
                let t = Instant::now();
                let s = sampling::sample_purification(&input, basis, cfg.shots, cfg.seed, round)?;
                rows.push(row(round, input_f, s.fidelity, s.success_probability, elapsed_ms(cfg, t)));
                input_f = s.fidelity;
                input = noisy_pair(n, basis, input_f)?;
            }
            Ok(rows)
        }
    }
}

/// Re-runs exact outcomes through the dense oracle where the register fits.
fn check_against_oracle(model: &ErrorModel, n: usize, outcomes: &[crate::protocol::ProtocolOutcome]) -> Result<()> {
    let fail = |what: String| Err(Error::VerificationFailed(what));
    match classify_and_route(model) {
        Route::Purify(basis) => {
            if 4 * n > oracle::MAX_ORACLE_QUBITS {
                return Ok(());
            }
            for (i, o) in outcomes.iter().enumerate() {
                let copy = if i == 0 {
                    oracle::noisy_copy_density(n, model.kind, model.fidelity, model.target, model.position)?
                } else {
                    oracle::canonical_copy_density(n, basis, outcomes[i - 1].fidelity)?
                };
                let r = oracle::purify_density(&copy, n, basis)?;
                let dev = oracle::compare(&o.output, &r.output)?
                    .max((r.fidelity - o.fidelity).abs())
                    .max((r.success_probability - o.success_probability).abs());
                if dev > ORACLE_TOL {
                    return fail(format!("round {}: oracle deviation {dev:e}", o.rounds_used));
                }
            }
        }
        Route::CorrectBitFlip => {
            if 2 * n > oracle::MAX_ORACLE_QUBITS {
                return Ok(());
            }
            let copy = oracle::noisy_copy_density(n, model.kind, model.fidelity, model.target, model.position)?;
            let (_, out) = oracle::correct_density(&copy, n, model.target)?;
            let dev = oracle::compare(&outcomes[0].output, &out)?;
            if dev > ORACLE_TOL {
                return fail(format!("correction: oracle deviation {dev:e}"));
            }
        }
    }
    Ok(())
}

/// One input fidelity, every round.
pub fn run_purify(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let rows = run_point(cfg, cfg.fidelity)?;
    write_outputs(cfg, &rows)?;
    Ok(rows)
}

/// Every grid fidelity and round, ordered by fidelity then round.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    if cfg.mode != Mode::Sweep {
        return Err(Error::InvalidConfig(format!("run_sweep called in {} mode", cfg.mode)));
    }
    let grid = cfg.grid();
    // dense oracle matrices are large, so oracle-checked sweeps stay serial
    let per_point: Vec<Vec<ResultRow>> = if cfg.oracle {
        grid.iter().map(|&f| run_point(cfg, f)).collect::<Result<_>>()?
    } else {
        grid.par_iter().map(|&f| run_point(cfg, f)).collect::<Result<_>>()?
    };
    let rows: Vec<ResultRow> = per_point.into_iter().flatten().collect();
    write_outputs(cfg, &rows)?;
    Ok(rows)
}

/// Single-copy physical bit-flip correction at the configured position.
pub fn run_correct(cfg: &ExperimentConfig) -> Result<ResultRow> {
    cfg.validate()?;
    if cfg.error != ErrorKind::PhysBitFlip {
        return Err(Error::InvalidConfig("correction needs a phys-bit error".into()));
    }
    let mut rows = run_point(cfg, cfg.fidelity)?;
    write_outputs(cfg, &rows)?;
    Ok(rows.remove(0))
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes the CSV to `cfg.out` and the config to `<out>.json`, if an output
/// path is configured.
pub fn write_outputs(cfg: &ExperimentConfig, rows: &[ResultRow]) -> Result<()> {
    let Some(out) = &cfg.out else {
        return Ok(());
    };
    write_csv(rows, BufWriter::new(File::create(out)?))?;
    let sidecar = File::create(sidecar_path(out))?;
    serde_json::to_writer_pretty(BufWriter::new(sidecar), cfg)?;
    Ok(())
}
