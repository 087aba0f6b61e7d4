//! Error channels that turn a logic Bell pair into the rank-2 mixtures the
//! purification protocol consumes.
//!
//! Each error is realized as a Pauli string:
//!
//! | kind            | operator                                   |
//! |-----------------|--------------------------------------------|
//! | logic bit flip  | `Z` on the first physical qubit             |
//! | logic phase flip| `X` on every physical qubit                 |
//! | phys bit flip   | `X` on the chosen physical qubit            |
//! | phys phase flip | `Z` on the chosen physical qubit            |
//!
//! A single `Z` swaps `|G+> <-> |G->`, and `X^{⊗n}` maps `|G±> -> ±|G±>`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{pauli_mut, Pauli, PauliString};
use crate::state::{Branch, Ensemble};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ErrorKind {
    #[serde(rename = "logic-bit")]
    LogicBitFlip,
    #[serde(rename = "logic-phase")]
    LogicPhaseFlip,
    #[serde(rename = "phys-bit")]
    PhysBitFlip,
    #[serde(rename = "phys-phase")]
    PhysPhaseFlip,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 4] = [
        ErrorKind::LogicBitFlip,
        ErrorKind::LogicPhaseFlip,
        ErrorKind::PhysBitFlip,
        ErrorKind::PhysPhaseFlip,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::LogicBitFlip => "logic-bit",
            ErrorKind::LogicPhaseFlip => "logic-phase",
            ErrorKind::PhysBitFlip => "phys-bit",
            ErrorKind::PhysPhaseFlip => "phys-phase",
        }
    }

    pub fn is_physical(self) -> bool {
        matches!(self, ErrorKind::PhysBitFlip | ErrorKind::PhysPhaseFlip)
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ErrorKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown error kind `{s}`")))
    }
}

/// Which logic qubit of the pair an error hits: `A` holds modes `a1..an`,
/// `B` holds `b1..bn`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicQubit {
    A,
    B,
}

impl LogicQubit {
    pub fn prefix(self) -> &'static str {
        match self {
            LogicQubit::A => "a",
            LogicQubit::B => "b",
        }
    }

    pub fn mode(self, position: usize) -> String {
        format!("{}{}", self.prefix(), position + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorModel {
    pub kind: ErrorKind,
    /// Probability that no error occurs.
    pub fidelity: f64,
    pub target: LogicQubit,
    /// 0-based physical qubit inside the target logic qubit. Ignored for
    /// logic-level errors.
    pub position: usize,
}

impl ErrorModel {
    pub fn new(kind: ErrorKind, fidelity: f64, target: LogicQubit, position: usize) -> Result<Self> {
        let m = Self {
            kind,
            fidelity,
            target,
            position,
        };
        m.validate()?;
        Ok(m)
    }

    /// Canonical placement: logic bit flips on `B`, logic phase flips on `A`.
    pub fn logic_bitflip(fidelity: f64) -> Result<Self> {
        Self::new(ErrorKind::LogicBitFlip, fidelity, LogicQubit::B, 0)
    }

    pub fn logic_phaseflip(fidelity: f64) -> Result<Self> {
        Self::new(ErrorKind::LogicPhaseFlip, fidelity, LogicQubit::A, 0)
    }

    pub fn phys_bitflip(fidelity: f64, target: LogicQubit, position: usize) -> Result<Self> {
        Self::new(ErrorKind::PhysBitFlip, fidelity, target, position)
    }

    pub fn phys_phaseflip(fidelity: f64, target: LogicQubit, position: usize) -> Result<Self> {
        Self::new(ErrorKind::PhysPhaseFlip, fidelity, target, position)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.fidelity) {
            return Err(Error::InvalidArgument(format!(
                "fidelity {} outside [0, 1]",
                self.fidelity
            )));
        }
        Ok(())
    }
}

/// Pauli realization of `m` for logic qubits of `n` physical qubits.
pub fn error_operator(m: &ErrorModel, n: usize) -> Result<PauliString> {
    if m.kind.is_physical() && m.position >= n {
        return Err(Error::InvalidArgument(format!(
            "physical position {} in a logic qubit of {n}",
            m.position
        )));
    }
    let t = m.target;
    Ok(match m.kind {
        ErrorKind::LogicBitFlip => PauliString::new().with(t.mode(0), Pauli::Z),
        ErrorKind::LogicPhaseFlip => (0..n).fold(PauliString::new(), |p, k| p.with(t.mode(k), Pauli::X)),
        ErrorKind::PhysBitFlip => PauliString::new().with(t.mode(m.position), Pauli::X),
        ErrorKind::PhysPhaseFlip => PauliString::new().with(t.mode(m.position), Pauli::Z),
    })
}

/// `F·ρ + (1-F)·EρE†` with `E = error_operator(m)`.
pub fn apply_error_model(e: &Ensemble, m: &ErrorModel) -> Result<Ensemble> {
    m.validate()?;
    let n = e.register().group(m.target.prefix()).len();
    if n == 0 {
        return Err(Error::InvalidArgument(format!(
            "register {} has no modes for logic qubit {:?}",
            e.register(),
            m.target
        )));
    }
    let op = error_operator(m, n)?;
    let mut branches = Vec::with_capacity(e.branches().len() * 2);
    if m.fidelity > 0.0 {
        branches.extend(e.branches().iter().map(|b| Branch {
            weight: b.weight * m.fidelity,
            state: b.state.clone(),
        }));
    }
    if m.fidelity < 1.0 {
        for b in e.branches() {
            let mut state = b.state.clone();
            pauli_mut(&mut state, &op)?;
            branches.push(Branch {
                weight: b.weight * (1.0 - m.fidelity),
                state,
            });
        }
    }
    Ensemble::new(branches)
}
