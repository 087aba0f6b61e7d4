//! Clifford gates, Pauli strings and computational-basis measurement.
//!
//! Every public operation takes its input by reference and returns a new
//! value. The `*_mut` helpers are the in-place kernels the protocol uses on
//! large registers.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{Branch, Ensemble, PureState, IMPOSSIBLE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(Pauli::I),
            "X" => Ok(Pauli::X),
            "Y" => Ok(Pauli::Y),
            "Z" => Ok(Pauli::Z),
            _ => Err(Error::InvalidArgument(format!("unknown Pauli `{s}`"))),
        }
    }
}

/// Per-label Pauli assignment. Labels not listed carry the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliString {
    assignment: BTreeMap<String, Pauli>,
}

impl PauliString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, label: impl Into<String>, p: Pauli) -> Self {
        self.set(label, p);
        self
    }

    pub fn set(&mut self, label: impl Into<String>, p: Pauli) {
        let label = label.into();
        if p == Pauli::I {
            self.assignment.remove(&label);
        } else {
            self.assignment.insert(label, p);
        }
    }

    pub fn get(&self, label: &str) -> Pauli {
        self.assignment.get(label).copied().unwrap_or(Pauli::I)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Pauli)> {
        self.assignment.iter().map(|(l, p)| (l.as_str(), *p))
    }

    pub fn is_identity(&self) -> bool {
        self.assignment.is_empty()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("I");
        }
        let parts: Vec<String> = self.iter().map(|(l, p)| format!("{p:?}_{l}")).collect();
        f.write_str(&parts.join(" "))
    }
}

pub(crate) fn h_mut(s: &mut PureState, label: &str) -> Result<()> {
    let mask = s.register().mask_of(label)?;
    let amps = s.amplitudes_mut();
    for i in 0..amps.len() {
        if i & mask == 0 {
            let (a, b) = (amps[i], amps[i | mask]);
            amps[i] = (a + b) * FRAC_1_SQRT_2;
            amps[i | mask] = (a - b) * FRAC_1_SQRT_2;
        }
    }
    Ok(())
}

pub(crate) fn x_mut(s: &mut PureState, label: &str) -> Result<()> {
    let mask = s.register().mask_of(label)?;
    let amps = s.amplitudes_mut();
    for i in 0..amps.len() {
        if i & mask == 0 {
            amps.swap(i, i | mask);
        }
    }
    Ok(())
}

pub(crate) fn z_mut(s: &mut PureState, label: &str) -> Result<()> {
    let mask = s.register().mask_of(label)?;
    for (i, a) in s.amplitudes_mut().iter_mut().enumerate() {
        if i & mask != 0 {
            *a = -*a;
        }
    }
    Ok(())
}

pub(crate) fn y_mut(s: &mut PureState, label: &str) -> Result<()> {
    // Y = [[0, -i], [i, 0]]
    let mask = s.register().mask_of(label)?;
    let i_unit = C64::new(0.0, 1.0);
    let amps = s.amplitudes_mut();
    for i in 0..amps.len() {
        if i & mask == 0 {
            let (a0, a1) = (amps[i], amps[i | mask]);
            amps[i] = -i_unit * a1;
            amps[i | mask] = i_unit * a0;
        }
    }
    Ok(())
}

pub(crate) fn cnot_mut(s: &mut PureState, control: &str, target: &str) -> Result<()> {
    if control == target {
        return Err(Error::IdenticalLabels(control.to_string()));
    }
    let c = s.register().mask_of(control)?;
    let t = s.register().mask_of(target)?;
    let amps = s.amplitudes_mut();
    for i in 0..amps.len() {
        if i & c != 0 && i & t == 0 {
            amps.swap(i, i | t);
        }
    }
    Ok(())
}

pub(crate) fn pauli_mut(s: &mut PureState, p: &PauliString) -> Result<()> {
    for (label, op) in p.iter() {
        s.register().index_of(label)?;
        match op {
            Pauli::I => {}
            Pauli::X => x_mut(s, label)?,
            Pauli::Y => y_mut(s, label)?,
            Pauli::Z => z_mut(s, label)?,
        }
    }
    Ok(())
}

pub fn apply_h(s: &PureState, label: &str) -> Result<PureState> {
    let mut out = s.clone();
    h_mut(&mut out, label)?;
    Ok(out)
}

pub fn apply_x(s: &PureState, label: &str) -> Result<PureState> {
    let mut out = s.clone();
    x_mut(&mut out, label)?;
    Ok(out)
}

pub fn apply_y(s: &PureState, label: &str) -> Result<PureState> {
    let mut out = s.clone();
    y_mut(&mut out, label)?;
    Ok(out)
}

pub fn apply_z(s: &PureState, label: &str) -> Result<PureState> {
    let mut out = s.clone();
    z_mut(&mut out, label)?;
    Ok(out)
}

/// `|c>|t> -> |c>|t xor c>`.
pub fn apply_cnot(s: &PureState, control: &str, target: &str) -> Result<PureState> {
    let mut out = s.clone();
    cnot_mut(&mut out, control, target)?;
    Ok(out)
}

pub fn apply_pauli(s: &PureState, p: &PauliString) -> Result<PureState> {
    let mut out = s.clone();
    pauli_mut(&mut out, p)?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub label: String,
    pub outcome: u8,
    pub probability: f64,
}

/// Projective Z measurement of one qubit.
///
/// Returns one entry per possible outcome; the measured qubit stays in the
/// register, projected onto the outcome, and each state is renormalized.
pub fn measure(s: &PureState, label: &str) -> Result<Vec<(MeasurementRecord, PureState)>> {
    let mask = s.register().mask_of(label)?;
    let norm = s.norm_sqr();
    let p1: f64 = s
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| i & mask != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum::<f64>()
        / norm;
    let mut out = Vec::with_capacity(2);
    for (outcome, p) in [(0u8, 1.0 - p1), (1u8, p1)] {
        if p <= IMPOSSIBLE {
            continue;
        }
        let want = if outcome == 1 { mask } else { 0 };
        let mut projected = s.clone();
        for (i, a) in projected.amplitudes_mut().iter_mut().enumerate() {
            if i & mask != want {
                *a = C64::new(0.0, 0.0);
            }
        }
        let projected = projected.scaled(1.0 / (p * norm).sqrt());
        out.push((
            MeasurementRecord {
                label: label.to_string(),
                outcome,
                probability: p,
            },
            projected,
        ));
    }
    Ok(out)
}

/// Joint outcome of measuring several qubits, in the order they were listed.
pub type Outcome = Vec<u8>;

/// Measures `labels` on every branch and groups the results by joint outcome.
///
/// Each entry holds the absolute outcome probability and the conditional
/// ensemble, renormalized.
pub fn measure_ensemble(e: &Ensemble, labels: &[&str]) -> Result<BTreeMap<Outcome, (f64, Ensemble)>> {
    for l in labels {
        e.register().index_of(l)?;
    }
    let mut groups: BTreeMap<Outcome, Vec<Branch>> = BTreeMap::new();
    for branch in e.branches() {
        let mut partial: Vec<(Outcome, f64, PureState)> = vec![(Vec::new(), branch.weight, branch.state.clone())];
        for &label in labels {
            let mut next = Vec::with_capacity(partial.len() * 2);
            for (bits, w, state) in partial {
                for (rec, post) in measure(&state, label)? {
                    let mut bits = bits.clone();
                    bits.push(rec.outcome);
                    next.push((bits, w * rec.probability, post));
                }
            }
            partial = next;
        }
        for (bits, weight, state) in partial {
            if weight > 0.0 {
                groups.entry(bits).or_default().push(Branch { weight, state });
            }
        }
    }
    let mut out = BTreeMap::new();
    for (bits, branches) in groups {
        let sub = Ensemble::new(branches)?;
        let (p, normalized) = sub.normalized()?;
        out.insert(bits, (p, normalized));
    }
    Ok(out)
}
