//! Purification and correction of logic Bell pairs.
//!
//! The two-copy protocol runs in four stages:
//!
//! 1. **Reduction.** Inside each logic qubit the first mode controls a CNOT
//!    onto every other mode, then a Hadamard acts on the first mode. A logic
//!    Bell pair becomes a physical Bell pair on the two first modes, with all
//!    other modes left in `|0>`.
//! 2. **Bennett step.** CNOTs from the kept pair (`a1`, `b1`) onto the
//!    sacrificed pair (`c1`, `d1`), then `c1` and `d1` are measured.
//! 3. **Post-selection.** Runs with equal outcomes are kept.
//! 4. **Recovery.** The reduction is undone on the kept copy.
//!
//! Logic phase flips are handled by a Hadamard on each kept physical qubit
//! after reduction, which turns `phi-` into `psi+`, and undone before
//! recovery.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{cnot_mut, h_mut, measure_ensemble, x_mut, Outcome};
use crate::noise::{apply_error_model, ErrorKind, ErrorModel, LogicQubit};
use crate::register::Register;
use crate::state::{
    fidelity, logic_pair_register, make_logic_bell, Bell, Branch, Ensemble, PureState, EXACT_TOL,
};

/// Modes of one logic Bell pair: Alice's logic qubit and Bob's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyModes {
    alice: Vec<String>,
    bob: Vec<String>,
}

impl CopyModes {
    pub fn new(alice_prefix: &str, bob_prefix: &str, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "a logic qubit needs at least 2 physical qubits, got {n}"
            )));
        }
        let modes = |p: &str| (1..=n).map(|k| format!("{p}{k}")).collect();
        Ok(Self {
            alice: modes(alice_prefix),
            bob: modes(bob_prefix),
        })
    }

    /// `a1..an, b1..bn`.
    pub fn first_copy(n: usize) -> Result<Self> {
        Self::new("a", "b", n)
    }

    /// `c1..cn, d1..dn`.
    pub fn second_copy(n: usize) -> Result<Self> {
        Self::new("c", "d", n)
    }

    pub fn n(&self) -> usize {
        self.alice.len()
    }

    /// The two first modes, which carry the physical Bell pair after reduction.
    pub fn heads(&self) -> (&str, &str) {
        (&self.alice[0], &self.bob[0])
    }

    pub fn ancillas(&self) -> impl Iterator<Item = &str> {
        self.alice[1..].iter().chain(&self.bob[1..]).map(String::as_str)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.alice.iter().chain(&self.bob).map(String::as_str)
    }

    fn sides(&self) -> [&[String]; 2] {
        [&self.alice, &self.bob]
    }

    fn check(&self, register: &Register) -> Result<()> {
        for l in self.labels() {
            if !register.contains(l) {
                return Err(Error::RegisterMismatch(format!(
                    "mode `{l}` missing from {register}"
                )));
            }
        }
        Ok(())
    }
}

fn reduce_mut(s: &mut PureState, modes: &CopyModes) -> Result<()> {
    for side in modes.sides() {
        for target in &side[1..] {
            cnot_mut(s, &side[0], target)?;
        }
        h_mut(s, &side[0])?;
    }
    Ok(())
}

fn recover_mut(s: &mut PureState, modes: &CopyModes) -> Result<()> {
    for side in modes.sides() {
        h_mut(s, &side[0])?;
        for target in &side[1..] {
            cnot_mut(s, &side[0], target)?;
        }
    }
    Ok(())
}

/// Maps a logic Bell pair on `modes` to a physical Bell pair on the two
/// first modes, leaving every other mode of the copy in `|0>`.
pub fn reduce_copy(s: &PureState, modes: &CopyModes) -> Result<PureState> {
    modes.check(s.register())?;
    let mut out = s.clone();
    reduce_mut(&mut out, modes)?;
    Ok(out)
}

/// Inverse of [`reduce_copy`]. Every ancilla mode must be in `|0>` on every branch.
pub fn recover_logic(e: &Ensemble, modes: &CopyModes) -> Result<Ensemble> {
    modes.check(e.register())?;
    for label in modes.ancillas() {
        let p = e.max_prob_one(label)?;
        if p > EXACT_TOL {
            return Err(Error::AncillaNotReset {
                label: label.to_string(),
                probability: p,
            });
        }
    }
    e.map(|s| {
        let mut out = s.clone();
        recover_mut(&mut out, modes)?;
        Ok(out)
    })
}

/// Bilateral CNOT from the kept pair onto the sacrificed pair, then a
/// Z measurement of both sacrificed qubits.
pub fn bennett_step(
    e: &Ensemble,
    kept: (&str, &str),
    sacrificed: (&str, &str),
) -> Result<BTreeMap<Outcome, (f64, Ensemble)>> {
    let all = [kept.0, kept.1, sacrificed.0, sacrificed.1];
    for (i, a) in all.iter().enumerate() {
        if all[i + 1..].contains(a) {
            return Err(Error::IdenticalLabels(a.to_string()));
        }
    }
    let evolved = e.map(|s| {
        let mut out = s.clone();
        cnot_mut(&mut out, kept.0, sacrificed.0)?;
        cnot_mut(&mut out, kept.1, sacrificed.1)?;
        Ok(out)
    })?;
    measure_ensemble(&evolved, &[sacrificed.0, sacrificed.1])
}

/// Keeps the outcomes where both parties saw the same bit and merges them.
///
/// Returns the total kept probability and the renormalized ensemble, or
/// [`Error::ZeroProbability`] if no agreeing outcome occurred.
pub fn postselect_equal(outcomes: &BTreeMap<Outcome, (f64, Ensemble)>) -> Result<(f64, Ensemble)> {
    let mut branches = Vec::new();
    let mut total = 0.0;
    for (bits, (p, e)) in outcomes {
        if bits.windows(2).all(|w| w[0] == w[1]) && *p > 0.0 {
            total += p;
            branches.extend(e.branches().iter().map(|b| Branch {
                weight: b.weight * p,
                state: b.state.clone(),
            }));
        }
    }
    if branches.is_empty() {
        return Err(Error::ZeroProbability);
    }
    let (p, merged) = Ensemble::new(branches)?.normalized()?;
    debug_assert!((p - total).abs() < 1e-9);
    Ok((total, merged))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ErrorBasis {
    Bit,
    Phase,
}

impl ErrorBasis {
    /// The canonical channel for this basis at fidelity `f`.
    pub fn channel(self, f: f64) -> Result<ErrorModel> {
        match self {
            ErrorBasis::Bit => ErrorModel::logic_bitflip(f),
            ErrorBasis::Phase => ErrorModel::logic_phaseflip(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PurifyConfig {
    pub n: usize,
    pub basis: ErrorBasis,
    pub rounds: usize,
    pub fidelity: f64,
}

impl PurifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("n = {} < 2", self.n)));
        }
        if self.rounds < 1 {
            return Err(Error::InvalidArgument("rounds must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.fidelity) {
            return Err(Error::InvalidArgument(format!(
                "fidelity {} outside [0, 1]",
                self.fidelity
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolOutcome {
    /// Probability that this round's post-selection (or correction) succeeded.
    pub success_probability: f64,
    /// Output pair on `a1..an, b1..bn`.
    pub output: Ensemble,
    /// Overlap of the output with `Phi+`.
    pub fidelity: f64,
    /// Fidelity of the pair fed into this round.
    pub input_fidelity: f64,
    /// 1-based round index.
    pub rounds_used: usize,
}

/// Noisy logic Bell pair `F·Phi+ + (1-F)·E Phi+ E†` for a canonical channel.
pub fn noisy_pair(n: usize, basis: ErrorBasis, f: f64) -> Result<Ensemble> {
    let phi = make_logic_bell(n, Bell::PhiPlus)?;
    apply_error_model(&Ensemble::pure(phi), &basis.channel(f)?)
}

pub(crate) fn to_second_copy(label: &str) -> String {
    match label.split_at(1) {
        ("a", rest) => format!("c{rest}"),
        ("b", rest) => format!("d{rest}"),
        _ => label.to_string(),
    }
}

/// One round of two-copy purification.
///
/// `copy` must live on `a1..an, b1..bn`; the second copy is an identical
/// independent pair placed on `c1..cn, d1..dn`.
pub fn purify_pair(copy: &Ensemble, basis: ErrorBasis) -> Result<ProtocolOutcome> {
    let n = copy.register().group("a").len();
    let expected = logic_pair_register(n)?;
    if copy.register() != &expected {
        return Err(Error::RegisterMismatch(format!(
            "purification input {} is not {expected}",
            copy.register()
        )));
    }
    let target = make_logic_bell(n, Bell::PhiPlus)?;
    let input_fidelity = fidelity(copy, &target)?;
    let first = CopyModes::first_copy(n)?;
    let second = CopyModes::second_copy(n)?;

    let joint = copy.tensor(&copy.relabel(to_second_copy)?)?;
    let reduced = joint.map(|s| {
        let mut out = s.clone();
        reduce_mut(&mut out, &first)?;
        reduce_mut(&mut out, &second)?;
        if basis == ErrorBasis::Phase {
            for l in ["a1", "b1", "c1", "d1"] {
                h_mut(&mut out, l)?;
            }
        }
        Ok(out)
    })?;

    let outcomes = bennett_step(&reduced, first.heads(), second.heads())?;
    let (success_probability, kept) = postselect_equal(&outcomes)?;

    let second_labels: Vec<&str> = second.labels().collect();
    let mut kept = kept.discard(&second_labels)?;
    if basis == ErrorBasis::Phase {
        kept = kept.map(|s| {
            let mut out = s.clone();
            h_mut(&mut out, "a1")?;
            h_mut(&mut out, "b1")?;
            Ok(out)
        })?;
    }
    let output = recover_logic(&kept, &first)?;
    let fid = fidelity(&output, &target)?;
    Ok(ProtocolOutcome {
        success_probability,
        output,
        fidelity: fid,
        input_fidelity,
        rounds_used: 1,
    })
}

/// Runs `rounds` rounds starting from `initial`. Between rounds the output is
/// replaced by the canonical two-branch mixture of `basis` at the achieved
/// fidelity, modelling a fresh supply of identically purified pairs.
pub fn purify_iterated(initial: &Ensemble, basis: ErrorBasis, rounds: usize) -> Result<Vec<ProtocolOutcome>> {
    if rounds < 1 {
        return Err(Error::InvalidArgument("rounds must be at least 1".into()));
    }
    let n = initial.register().group("a").len();
    let mut out: Vec<ProtocolOutcome> = Vec::with_capacity(rounds);
    for round in 1..=rounds {
        let input = match out.last() {
            None => initial.clone(),
            Some(prev) => noisy_pair(n, basis, prev.fidelity)?,
        };
        let mut o = purify_pair(&input, basis)?;
        o.rounds_used = round;
        out.push(o);
    }
    Ok(out)
}

/// Every round of the configured purification.
pub fn purify_rounds(cfg: &PurifyConfig) -> Result<Vec<ProtocolOutcome>> {
    cfg.validate()?;
    purify_iterated(&noisy_pair(cfg.n, cfg.basis, cfg.fidelity)?, cfg.basis, cfg.rounds)
}

/// Final round of the configured purification.
pub fn purify_round(cfg: &PurifyConfig) -> Result<ProtocolOutcome> {
    Ok(purify_rounds(cfg)?.pop().expect("at least one round"))
}

/// How a flagged ancilla is returned to `|0>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RecoveryPath {
    /// The measurement left the qubit intact; flip it back.
    Qnd,
    /// The measured qubit is gone; a fresh `|0>` takes its place.
    Destructive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionOutcome {
    pub outcome: ProtocolOutcome,
    /// Probability that at least one ancilla read 1.
    pub flag_probability: f64,
    pub syndromes: Vec<(Outcome, f64)>,
}

/// Single-copy correction of a physical bit flip on a non-control mode of
/// `suspected`.
///
/// The first mode of the logic qubit controls CNOTs onto the others, so the
/// GHZ encoding collapses to `|±>|0...0>` and a flipped mode shows up as an
/// ancilla reading 1. The flip is undone and the CNOTs are applied again.
pub fn correct_physical_bitflip(
    input: &Ensemble,
    suspected: LogicQubit,
    path: RecoveryPath,
) -> Result<CorrectionOutcome> {
    let modes = input.register().group(suspected.prefix());
    let n = modes.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "logic qubit {suspected:?} has {n} physical qubits"
        )));
    }
    let target = make_logic_bell(n, Bell::PhiPlus)?;
    if input.register() != target.register() {
        return Err(Error::RegisterMismatch(format!(
            "correction input {} is not {}",
            input.register(),
            target.register()
        )));
    }
    let input_fidelity = fidelity(input, &target)?;
    let control = modes[0].as_str();
    let ancillas: Vec<&str> = modes[1..].iter().map(String::as_str).collect();

    let spread = |s: &PureState| -> Result<PureState> {
        let mut out = s.clone();
        for a in &ancillas {
            cnot_mut(&mut out, control, a)?;
        }
        Ok(out)
    };

    let syndromes = measure_ensemble(&input.map(spread)?, &ancillas)?;
    let mut branches = Vec::new();
    let mut flag_probability = 0.0;
    let mut records = Vec::with_capacity(syndromes.len());
    for (bits, (p, sub)) in &syndromes {
        records.push((bits.clone(), *p));
        if bits.contains(&1) {
            flag_probability += p;
        }
        if n > 2 && bits.iter().all(|&b| b == 1) {
            return Err(Error::UnsupportedInput(format!(
                "every ancilla of {suspected:?} flagged: bit flip on control mode {control}"
            )));
        }
        let restored = match path {
            RecoveryPath::Qnd => sub.map(|s| {
                let mut out = s.clone();
                for (a, &b) in ancillas.iter().zip(bits) {
                    if b == 1 {
                        x_mut(&mut out, a)?;
                    }
                }
                Ok(out)
            })?,
            RecoveryPath::Destructive => {
                let fresh = PureState::zeros(Register::from_labels(ancillas.iter().copied())?)?;
                sub.map(|s| s.discard(&ancillas)?.tensor(&fresh)?.reorder(s.register()))?
            }
        };
        for b in restored.map(spread)?.into_branches() {
            branches.push(Branch {
                weight: b.weight * p,
                state: b.state,
            });
        }
    }
    let (success_probability, output) = Ensemble::new(branches)?.normalized()?;
    let fid = fidelity(&output, &target)?;
    Ok(CorrectionOutcome {
        outcome: ProtocolOutcome {
            success_probability,
            output,
            fidelity: fid,
            input_fidelity,
            rounds_used: 1,
        },
        flag_probability,
        syndromes: records,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Purify(ErrorBasis),
    CorrectBitFlip,
}

/// Procedure for each error kind. A physical phase flip is the same state
/// map as a logic bit flip, so it is purified in the bit basis.
pub fn classify_and_route(m: &ErrorModel) -> Route {
    match m.kind {
        ErrorKind::LogicBitFlip | ErrorKind::PhysPhaseFlip => Route::Purify(ErrorBasis::Bit),
        ErrorKind::LogicPhaseFlip => Route::Purify(ErrorBasis::Phase),
        ErrorKind::PhysBitFlip => Route::CorrectBitFlip,
    }
}

/// Applies `m` to `Phi+` with `n` physical qubits per logic qubit and runs
/// the routed procedure. Correction ignores `rounds`.
pub fn run_routed(m: &ErrorModel, n: usize, rounds: usize) -> Result<Vec<ProtocolOutcome>> {
    let input = apply_error_model(&Ensemble::pure(make_logic_bell(n, Bell::PhiPlus)?), m)?;
    match classify_and_route(m) {
        Route::Purify(basis) => purify_iterated(&input, basis, rounds),
        Route::CorrectBitFlip => {
            if m.position == 0 {
                return Err(Error::UnsupportedInput(format!(
                    "bit flip on control mode {}",
                    m.target.mode(0)
                )));
            }
            Ok(vec![correct_physical_bitflip(&input, m.target, RecoveryPath::Qnd)?.outcome])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::apply_pauli;
    use crate::noise::error_operator;
    use crate::register::make_register;
    use crate::state::make_bell;

    fn one(x: f64) -> bool {
        (x - 1.0).abs() < EXACT_TOL
    }

    /// physical Bell on (a1, b1) tensored with |0> on the other modes of a copy
    fn reduced_form(kind: Bell, n: usize) -> PureState {
        let pair = make_bell(kind)
            .with_register(Register::from_labels(["a1", "b1"]).unwrap())
            .unwrap();
        let rest: Vec<String> = (2..=n).map(|k| format!("a{k}")).chain((2..=n).map(|k| format!("b{k}"))).collect();
        let zeros = PureState::zeros(Register::from_labels(rest).unwrap()).unwrap();
        pair.tensor(&zeros).unwrap().reorder(&logic_pair_register(n).unwrap()).unwrap()
    }

    #[test]
    fn reduce_examples() {
        let modes = CopyModes::first_copy(2).unwrap();
        for (logic, phys) in [(Bell::PhiPlus, Bell::PhiPlus), (Bell::PsiPlus, Bell::PsiPlus)] {
            let out = reduce_copy(&make_logic_bell(2, logic).unwrap(), &modes).unwrap();
            assert!(one(out.overlap_abs(&reduced_form(phys, 2)).unwrap()));
        }
        let modes = CopyModes::first_copy(4).unwrap();
        let out = reduce_copy(&make_logic_bell(4, Bell::PhiPlus).unwrap(), &modes).unwrap();
        assert!(one(out.overlap_abs(&reduced_form(Bell::PhiPlus, 4)).unwrap()));
    }

    #[test]
    fn reduce_mode_mismatch() {
        let modes = CopyModes::second_copy(2).unwrap();
        assert!(matches!(
            reduce_copy(&make_logic_bell(2, Bell::PhiPlus).unwrap(), &modes),
            Err(Error::RegisterMismatch(_))
        ));
    }

    fn two_pairs(kept: Bell, sacrificed: Bell) -> Ensemble {
        let reg = |x: &str, y: &str| Register::from_labels([x, y]).unwrap();
        let s = make_bell(kept)
            .with_register(reg("a1", "b1"))
            .unwrap()
            .tensor(&make_bell(sacrificed).with_register(reg("c1", "d1")).unwrap())
            .unwrap();
        Ensemble::pure(s)
    }

    #[test]
    fn bennett_examples() {
        let out = bennett_step(&two_pairs(Bell::PhiPlus, Bell::PhiPlus), ("a1", "b1"), ("c1", "d1")).unwrap();
        assert_eq!(out.keys().cloned().collect::<Vec<_>>(), vec![vec![0, 0], vec![1, 1]]);

        let out = bennett_step(&two_pairs(Bell::PsiPlus, Bell::PsiPlus), ("a1", "b1"), ("c1", "d1")).unwrap();
        assert_eq!(out.keys().cloned().collect::<Vec<_>>(), vec![vec![0, 0], vec![1, 1]]);
        let (p, kept) = postselect_equal(&out).unwrap();
        assert!(one(p));
        let kept = kept.discard(&["c1", "d1"]).unwrap();
        let psi = make_bell(Bell::PsiPlus).with_register(kept.register().clone()).unwrap();
        assert!(one(fidelity(&kept, &psi).unwrap()));

        let out = bennett_step(&two_pairs(Bell::PhiPlus, Bell::PsiPlus), ("a1", "b1"), ("c1", "d1")).unwrap();
        assert_eq!(out.keys().cloned().collect::<Vec<_>>(), vec![vec![0, 1], vec![1, 0]]);
        assert!(matches!(postselect_equal(&out), Err(Error::ZeroProbability)));
    }

    #[test]
    fn bennett_rejects_overlap() {
        let e = two_pairs(Bell::PhiPlus, Bell::PhiPlus);
        assert!(bennett_step(&e, ("a1", "b1"), ("a1", "d1")).is_err());
    }

    #[test]
    fn recover_examples() {
        let modes = CopyModes::first_copy(2).unwrap();
        for (phys, logic) in [(Bell::PhiPlus, Bell::PhiPlus), (Bell::PsiPlus, Bell::PsiPlus)] {
            let out = recover_logic(&Ensemble::pure(reduced_form(phys, 2)), &modes).unwrap();
            assert!(one(fidelity(&out, &make_logic_bell(2, logic).unwrap()).unwrap()));
        }
    }

    #[test]
    fn recover_rejects_dirty_ancilla() {
        let modes = CopyModes::first_copy(2).unwrap();
        let s = make_logic_bell(2, Bell::PhiPlus).unwrap();
        assert!(matches!(
            recover_logic(&Ensemble::pure(s), &modes),
            Err(Error::AncillaNotReset { .. })
        ));
    }

    #[test]
    fn purify_headline() {
        let cfg = PurifyConfig {
            n: 2,
            basis: ErrorBasis::Bit,
            rounds: 1,
            fidelity: 0.8,
        };
        let o = purify_round(&cfg).unwrap();
        assert!((o.fidelity - 16.0 / 17.0).abs() < EXACT_TOL);
        assert!((o.success_probability - 0.68).abs() < EXACT_TOL);
        assert!((o.output.total_weight() - 1.0).abs() < EXACT_TOL);
    }

    #[test]
    fn purify_perfect_input() {
        let cfg = PurifyConfig {
            n: 2,
            basis: ErrorBasis::Bit,
            rounds: 1,
            fidelity: 1.0,
        };
        let o = purify_round(&cfg).unwrap();
        assert!(one(o.fidelity) && one(o.success_probability));
    }

    #[test]
    fn purify_phase_n3() {
        let cfg = PurifyConfig {
            n: 3,
            basis: ErrorBasis::Phase,
            rounds: 1,
            fidelity: 0.8,
        };
        let o = purify_round(&cfg).unwrap();
        assert!((o.fidelity - 16.0 / 17.0).abs() < EXACT_TOL);
        let phi_m = make_logic_bell(3, Bell::PhiMinus).unwrap();
        assert!((fidelity(&o.output, &phi_m).unwrap() - 1.0 / 17.0).abs() < EXACT_TOL);
    }

    #[test]
    fn config_validation() {
        let bad = [
            PurifyConfig { n: 1, basis: ErrorBasis::Bit, rounds: 1, fidelity: 0.8 },
            PurifyConfig { n: 2, basis: ErrorBasis::Bit, rounds: 0, fidelity: 0.8 },
            PurifyConfig { n: 2, basis: ErrorBasis::Bit, rounds: 1, fidelity: 1.2 },
        ];
        for cfg in bad {
            assert!(purify_round(&cfg).is_err());
        }
    }

    #[test]
    fn purify_rejects_foreign_register() {
        let e = Ensemble::pure(PureState::zeros(make_register(&[("x", 4)]).unwrap()).unwrap());
        assert!(purify_pair(&e, ErrorBasis::Bit).is_err());
    }

    fn flipped(n: usize, pos: usize) -> Ensemble {
        let m = ErrorModel::phys_bitflip(0.0, LogicQubit::A, pos).unwrap();
        let s = apply_pauli(&make_logic_bell(n, Bell::PhiPlus).unwrap(), &error_operator(&m, n).unwrap()).unwrap();
        Ensemble::pure(s)
    }

    #[test]
    fn correction_examples() {
        let c = correct_physical_bitflip(&flipped(2, 1), LogicQubit::A, RecoveryPath::Qnd).unwrap();
        assert!(one(c.flag_probability));
        assert!(one(c.outcome.fidelity));

        let clean = Ensemble::pure(make_logic_bell(2, Bell::PhiPlus).unwrap());
        let c = correct_physical_bitflip(&clean, LogicQubit::A, RecoveryPath::Qnd).unwrap();
        assert!(c.flag_probability.abs() < EXACT_TOL);
        assert_eq!(c.syndromes, vec![(vec![0], 1.0)]);
        assert!(one(c.outcome.fidelity));

        let c = correct_physical_bitflip(&flipped(3, 2), LogicQubit::A, RecoveryPath::Destructive).unwrap();
        assert_eq!(c.syndromes.len(), 1);
        assert_eq!(c.syndromes[0].0, vec![0, 1]);
        assert!(one(c.outcome.fidelity));
    }

    #[test]
    fn correction_rejects_control_flip() {
        let r = correct_physical_bitflip(&flipped(3, 0), LogicQubit::A, RecoveryPath::Qnd);
        assert!(matches!(r, Err(Error::UnsupportedInput(_))));
        let m = ErrorModel::phys_bitflip(0.5, LogicQubit::A, 0).unwrap();
        assert!(matches!(run_routed(&m, 2, 1), Err(Error::UnsupportedInput(_))));
    }

    #[test]
    fn routing() {
        let f = 0.8;
        let m = ErrorModel::phys_phaseflip(f, LogicQubit::A, 1).unwrap();
        assert_eq!(classify_and_route(&m), Route::Purify(ErrorBasis::Bit));
        let o = run_routed(&m, 2, 1).unwrap();
        assert!((o[0].fidelity - 16.0 / 17.0).abs() < EXACT_TOL);

        let m = ErrorModel::phys_bitflip(f, LogicQubit::B, 1).unwrap();
        assert_eq!(classify_and_route(&m), Route::CorrectBitFlip);
        let o = run_routed(&m, 3, 1).unwrap();
        assert!(one(o[0].fidelity) && one(o[0].success_probability));

        let m = ErrorModel::logic_phaseflip(f).unwrap();
        assert_eq!(classify_and_route(&m), Route::Purify(ErrorBasis::Phase));
        assert_eq!(classify_and_route(&ErrorModel::logic_bitflip(f).unwrap()), Route::Purify(ErrorBasis::Bit));
    }
}
