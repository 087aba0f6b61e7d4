use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use logic_purify::harness::results::write_csv;
use logic_purify::harness::verify::{run_verify_with, Fault};
use logic_purify::harness::{run_correct, run_purify, run_sweep, ExperimentConfig, Mode};
use logic_purify::{Error, Result};

/// Purification and correction of concatenated-GHZ logic Bell pairs.
#[derive(Parser)]
#[command(name = "logic-purify", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One purification run at a single input fidelity.
    Purify(Opts),
    /// Single-copy correction of a physical bit flip.
    Correct(Opts),
    /// Purification over a grid of input fidelities.
    Sweep(Opts),
    /// Runtime invariant suite.
    Verify {
        #[command(flatten)]
        opts: Opts,
        #[arg(long, hide = true)]
        inject_fault: Option<Fault>,
    },
}

#[derive(Args, Default)]
struct Opts {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// logic-bit, logic-phase, phys-bit or phys-phase.
    #[arg(long)]
    error: Option<String>,
    #[arg(long)]
    fidelity: Option<f64>,
    #[arg(long)]
    f_min: Option<f64>,
    #[arg(long)]
    f_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
    /// Monte Carlo shots; 0 runs the exact engine.
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path; rows go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cross-check against the dense density-matrix oracle.
    #[arg(long)]
    oracle: bool,
    /// 1-based mode index of a physical error; defaults to the last mode.
    #[arg(long)]
    flip_position: Option<usize>,
    /// Record wall-clock time per row.
    #[arg(long)]
    timing: bool,
}

impl Opts {
    fn resolve(&self, mode: Mode) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        cfg.mode = mode;
        if let Some(e) = &self.error {
            cfg.set("error", e)?;
        }
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    cfg.$field = v;
                }
            )*};
        }
        take!(n, fidelity, f_min, f_max, steps, rounds, shots, seed);
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if self.flip_position.is_some() {
            cfg.flip_position = self.flip_position;
        }
        cfg.oracle |= self.oracle;
        cfg.timing |= self.timing;
        if mode == Mode::Correct && self.error.is_none() && self.config.is_none() {
            cfg.error = logic_purify::ErrorKind::PhysBitFlip;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(cfg: &ExperimentConfig, rows: &[logic_purify::harness::ResultRow]) -> Result<()> {
    if cfg.out.is_none() {
        write_csv(rows, io::stdout().lock())?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Purify(o) => {
            let cfg = o.resolve(Mode::Purify)?;
            emit(&cfg, &run_purify(&cfg)?)
        }
        Command::Correct(o) => {
            let cfg = o.resolve(Mode::Correct)?;
            emit(&cfg, &[run_correct(&cfg)?])
        }
        Command::Sweep(o) => {
            let cfg = o.resolve(Mode::Sweep)?;
            emit(&cfg, &run_sweep(&cfg)?)
        }
        Command::Verify { opts, inject_fault } => {
            let cfg = opts.resolve(Mode::Verify)?;
            let report = run_verify_with(&cfg, inject_fault);
            println!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err(Error::VerificationFailed("invariant suite failed".into()))
            }
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::VerificationFailed(_) => 1,
        Error::UnsupportedInput(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
