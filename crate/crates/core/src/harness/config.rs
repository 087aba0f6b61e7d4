//! Experiment configuration.
//!
//! Config files are flat `key = value` text, one setting per line. Blank
//! lines and lines starting with `#` are ignored, as is anything after a `#`
//! on a value line. Keys are the long CLI flag names without the dashes
//! (`f-min` and `f_min` are both accepted):
//!
//! ```text
//! # two-round sweep
//! mode = sweep
//! error = logic-bit
//! n = 3
//! f-min = 0.55
//! f-max = 0.95
//! steps = 9
//! rounds = 2
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::ErrorKind;

/// Largest `n` whose two-copy register fits the statevector cap.
pub const MAX_N: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Purify,
    Correct,
    Sweep,
    Verify,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "purify" => Ok(Mode::Purify),
            "correct" => Ok(Mode::Correct),
            "sweep" => Ok(Mode::Sweep),
            "verify" => Ok(Mode::Verify),
            _ => Err(Error::InvalidConfig(format!("unknown mode `{s}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Purify => "purify",
            Mode::Correct => "correct",
            Mode::Sweep => "sweep",
            Mode::Verify => "verify",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub error: ErrorKind,
    pub n: usize,
    pub fidelity: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub steps: usize,
    pub rounds: usize,
    /// 0 selects the exact engine.
    pub shots: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub oracle: bool,
    /// 1-based mode index of the flipped qubit for physical errors; the last
    /// mode when unset.
    pub flip_position: Option<usize>,
    /// Record wall-clock time per row. Off by default so output is reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Purify,
            error: ErrorKind::LogicBitFlip,
            n: 2,
            fidelity: 0.8,
            f_min: 0.5,
            f_max: 1.0,
            steps: 6,
            rounds: 1,
            shots: 0,
            seed: 0,
            out: None,
            oracle: false,
            flip_position: None,
            timing: false,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::InvalidConfig(format!("bad value `{value}` for `{key}`"))),
    }
}

impl ExperimentConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.replace('_', "-").as_str() {
            "mode" => self.mode = value.parse()?,
            "error" => self.error = value.parse().map_err(|_| Error::InvalidConfig(format!("unknown error kind `{value}`")))?,
            "n" => self.n = parse(key, value)?,
            "fidelity" => self.fidelity = parse(key, value)?,
            "f-min" => self.f_min = parse(key, value)?,
            "f-max" => self.f_max = parse(key, value)?,
            "steps" => self.steps = parse(key, value)?,
            "rounds" => self.rounds = parse(key, value)?,
            "shots" => self.shots = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "oracle" => self.oracle = parse_bool(key, value)?,
            "flip-position" => self.flip_position = Some(parse(key, value)?),
            "timing" => self.timing = parse_bool(key, value)?,
            other => return Err(Error::InvalidConfig(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected `key = value`", lineno + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    /// 0-based flipped position inside the logic qubit.
    pub fn flip_index(&self) -> usize {
        self.flip_position.unwrap_or(self.n).saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(2..=MAX_N).contains(&self.n) {
            return bad(format!("n = {} outside 2..={MAX_N}", self.n));
        }
        if self.rounds < 1 {
            return bad("rounds must be at least 1".into());
        }
        for (name, f) in [("fidelity", self.fidelity), ("f-min", self.f_min), ("f-max", self.f_max)] {
            if !(0.0..=1.0).contains(&f) {
                return bad(format!("{name} = {f} outside [0, 1]"));
            }
        }
        if self.mode == Mode::Sweep {
            if self.steps < 2 {
                return bad(format!("steps = {} < 2", self.steps));
            }
            if self.f_min >= self.f_max {
                return bad(format!("f-min {} must be below f-max {}", self.f_min, self.f_max));
            }
        }
        if let Some(p) = self.flip_position {
            if !(1..=self.n).contains(&p) {
                return bad(format!("flip position {p} outside 1..={}", self.n));
            }
        }
        if self.mode == Mode::Correct && self.error != ErrorKind::PhysBitFlip {
            return bad(format!("correct mode needs --error phys-bit, got {}", self.error));
        }
        Ok(())
    }

    /// Fidelity grid of a sweep, endpoints included.
    pub fn grid(&self) -> Vec<f64> {
        let span = self.f_max - self.f_min;
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| {
                if i == last {
                    self.f_max
                } else {
                    self.f_min + span * i as f64 / last as f64
                }
            })
            .collect()
    }
}
