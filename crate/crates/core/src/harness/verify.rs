//! Runtime invariant suite behind the `verify` subcommand.

use std::fmt;

use crate::error::Result;
use crate::gates::apply_pauli;
use crate::noise::{error_operator, ErrorModel, LogicQubit};
use crate::oracle::{self, ORACLE_TOL};
use crate::protocol::{
    bennett_step, correct_physical_bitflip, noisy_pair, postselect_equal, purify_iterated, purify_pair,
    recover_logic, reduce_copy, CopyModes, ErrorBasis, RecoveryPath,
};
use crate::register::Register;
use crate::state::{fidelity, logic_pair_register, make_bell, make_logic_bell, Bell, Ensemble, PureState, EXACT_TOL};

use super::config::ExperimentConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub deviation: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks.iter().map(|c| c.deviation).fold(0.0, f64::max)
    }

    fn record(&mut self, name: &str, tolerance: f64, deviation: Result<f64>) {
        let (passed, deviation) = match deviation {
            Ok(d) => (d <= tolerance, d),
            Err(_) => (false, f64::INFINITY),
        };
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            deviation,
            tolerance,
        });
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {:<28} deviation={:.3e} tol={:.0e}", c.name, c.deviation, c.tolerance)?;
        }
        write!(
            f,
            "{} of {} checks passed, max deviation {:.3e}",
            self.checks.iter().filter(|c| c.passed).count(),
            self.checks.len(),
            self.max_deviation()
        )
    }
}

/// Deliberate defects for exercising the suite itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Reduction omits the Hadamard on the first modes.
    SkipReductionHadamard,
}

impl std::str::FromStr for Fault {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "skip-reduction-hadamard" => Ok(Fault::SkipReductionHadamard),
            _ => Err(crate::Error::InvalidConfig(format!("unknown fault `{s}`"))),
        }
    }
}

type ReduceFn = fn(&PureState, &CopyModes) -> Result<PureState>;

fn reduce_without_hadamard(s: &PureState, modes: &CopyModes) -> Result<PureState> {
    let reduced = reduce_copy(s, modes)?;
    let (a, b) = modes.heads();
    crate::gates::apply_h(&crate::gates::apply_h(&reduced, a)?, b)
}

fn dev_one(x: f64) -> f64 {
    (x - 1.0).abs()
}

fn reduced_form(kind: Bell, n: usize) -> Result<PureState> {
    let pair = make_bell(kind).with_register(Register::from_labels(["a1", "b1"])?)?;
    let rest: Vec<String> = (2..=n)
        .map(|k| format!("a{k}"))
        .chain((2..=n).map(|k| format!("b{k}")))
        .collect();
    pair.tensor(&PureState::zeros(Register::from_labels(rest)?)?)?
        .reorder(&logic_pair_register(n)?)
}

fn f_prime(f: f64) -> f64 {
    f * f / (f * f + (1.0 - f) * (1.0 - f))
}

pub fn run_verify(cfg: &ExperimentConfig) -> VerifyReport {
    run_verify_with(cfg, None)
}

pub fn run_verify_with(cfg: &ExperimentConfig, fault: Option<Fault>) -> VerifyReport {
    let reduce: ReduceFn = match fault {
        None => reduce_copy,
        Some(Fault::SkipReductionHadamard) => reduce_without_hadamard,
    };
    let mut report = VerifyReport::default();

    report.record("bell-orthonormality", EXACT_TOL, (|| {
        let mut worst = 0.0f64;
        let phys: Vec<PureState> = Bell::ALL.iter().map(|&k| make_bell(k)).collect();
        let mut families = vec![phys];
        for n in 2..=6 {
            families.push(Bell::ALL.iter().map(|&k| make_logic_bell(n, k)).collect::<Result<_>>()?);
        }
        for fam in &families {
            for (i, x) in fam.iter().enumerate() {
                for (j, y) in fam.iter().enumerate() {
                    let expect = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((x.overlap(y)?.norm() - expect).abs());
                }
            }
        }
        Ok(worst)
    })());

    report.record("reduction-golden", EXACT_TOL, (|| {
        let modes = CopyModes::first_copy(2)?;
        let mut worst = 0.0f64;
        for kind in Bell::ALL {
            let out = reduce(&make_logic_bell(2, kind)?, &modes)?;
            worst = worst.max(dev_one(out.overlap_abs(&reduced_form(kind, 2)?)?));
        }
        Ok(worst)
    })());

    report.record("reduction-disentangles", EXACT_TOL, (|| {
        let mut worst = 0.0f64;
        for n in 2..=5 {
            let modes = CopyModes::first_copy(n)?;
            for kind in Bell::ALL {
                let out = reduce(&make_logic_bell(n, kind)?, &modes)?;
                for a in modes.ancillas() {
                    worst = worst.max(out.prob_one(a)?);
                }
                worst = worst.max(dev_one(out.overlap_abs(&reduced_form(kind, n)?)?));
            }
        }
        Ok(worst)
    })());

    report.record("recovery-inverts-reduction", EXACT_TOL, (|| {
        let mut worst = 0.0f64;
        for n in 2..=5 {
            let modes = CopyModes::first_copy(n)?;
            for kind in Bell::ALL {
                let s = make_logic_bell(n, kind)?;
                let back = recover_logic(&Ensemble::pure(reduce(&s, &modes)?), &modes)?;
                worst = worst.max(dev_one(fidelity(&back, &s)?));
            }
        }
        Ok(worst)
    })());

    report.record("bennett-table", EXACT_TOL, (|| {
        let reg = |x: &str, y: &str| Register::from_labels([x, y]);
        let mut worst = 0.0f64;
        let table = [
            (Bell::PhiPlus, Bell::PhiPlus, Bell::PhiPlus, true),
            (Bell::PhiPlus, Bell::PsiPlus, Bell::PhiPlus, false),
            (Bell::PsiPlus, Bell::PhiPlus, Bell::PsiPlus, false),
            (Bell::PsiPlus, Bell::PsiPlus, Bell::PsiPlus, true),
        ];
        for (kept, sac, kept_after, agree) in table {
            let s = make_bell(kept)
                .with_register(reg("a1", "b1")?)?
                .tensor(&make_bell(sac).with_register(reg("c1", "d1")?)?)?;
            let out = bennett_step(&Ensemble::pure(s), ("a1", "b1"), ("c1", "d1"))?;
            for (bits, (p, e)) in &out {
                if (bits[0] == bits[1]) != agree {
                    worst = worst.max(*p);
                }
                let pair = e.discard(&["c1", "d1"])?;
                let expect = make_bell(kept_after).with_register(pair.register().clone())?;
                worst = worst.max(dev_one(fidelity(&pair, &expect)?));
            }
        }
        Ok(worst)
    })());

    report.record("fidelity-map", EXACT_TOL, (|| {
        let mut worst = 0.0f64;
        for n in 2..=4 {
            for basis in [ErrorBasis::Bit, ErrorBasis::Phase] {
                for k in 1..=19 {
                    let f = k as f64 * 0.05;
                    let o = purify_pair(&noisy_pair(n, basis, f)?, basis)?;
                    let success = f * f + (1.0 - f) * (1.0 - f);
                    worst = worst
                        .max((o.fidelity - f_prime(f)).abs())
                        .max((o.success_probability - success).abs());
                }
            }
        }
        Ok(worst)
    })());

    report.record("two-rounds", EXACT_TOL, (|| {
        let rounds = purify_iterated(&noisy_pair(2, ErrorBasis::Bit, 0.8)?, ErrorBasis::Bit, 2)?;
        Ok((rounds[1].fidelity - 256.0 / 257.0).abs())
    })());

    report.record("phys-bitflip-correction", EXACT_TOL, (|| {
        let mut worst = 0.0f64;
        for n in 2..=5 {
            for pos in 1..n {
                let m = ErrorModel::phys_bitflip(0.0, LogicQubit::A, pos)?;
                let s = apply_pauli(&make_logic_bell(n, Bell::PhiPlus)?, &error_operator(&m, n)?)?;
                let e = Ensemble::pure(s);
                let q = correct_physical_bitflip(&e, LogicQubit::A, RecoveryPath::Qnd)?;
                let d = correct_physical_bitflip(&e, LogicQubit::A, RecoveryPath::Destructive)?;
                worst = worst
                    .max(dev_one(q.flag_probability))
                    .max(dev_one(q.outcome.fidelity))
                    .max(dev_one(d.outcome.fidelity))
                    .max(dev_one(fidelity(&q.outcome.output, &d.outcome.output.branches()[0].state)?));
            }
        }
        Ok(worst)
    })());

    report.record("phys-phaseflip-equivalence", EXACT_TOL, (|| {
        let mut worst = 0.0f64;
        for n in 2..=5 {
            let psi = make_logic_bell(n, Bell::PsiPlus)?;
            for t in [LogicQubit::A, LogicQubit::B] {
                for pos in 0..n {
                    let m = ErrorModel::phys_phaseflip(0.0, t, pos)?;
                    let s = apply_pauli(&make_logic_bell(n, Bell::PhiPlus)?, &error_operator(&m, n)?)?;
                    worst = worst.max(dev_one(s.overlap_abs(&psi)?));
                }
            }
        }
        Ok(worst)
    })());

    report.record("postselect-branches-agree", EXACT_TOL, (|| {
        let n = 2;
        let copy = noisy_pair(n, ErrorBasis::Bit, 0.7)?;
        let joint = copy.tensor(&copy.relabel(crate::protocol::to_second_copy)?)?;
        let (m1, m2) = (CopyModes::first_copy(n)?, CopyModes::second_copy(n)?);
        let reduced = joint.map(|s| reduce_copy(&reduce_copy(s, &m1)?, &m2))?;
        let out = bennett_step(&reduced, m1.heads(), m2.heads())?;
        let drop: Vec<&str> = m2.labels().collect();
        let zero = crate::state::to_density_matrix(&out[&vec![0, 0]].1.discard(&drop)?)?;
        let one = crate::state::to_density_matrix(&out[&vec![1, 1]].1.discard(&drop)?)?;
        let (p, _) = postselect_equal(&out)?;
        Ok(zero.max_abs_diff(&one)?.max((p - 0.58).abs()))
    })());

    if cfg.oracle {
        report.record("oracle-agreement-n2", ORACLE_TOL, (|| {
            let mut worst = 0.0f64;
            for basis in [ErrorBasis::Bit, ErrorBasis::Phase] {
                for f in [0.6, 0.8, 0.95] {
                    let o = purify_pair(&noisy_pair(2, basis, f)?, basis)?;
                    let r = oracle::purify_density(&oracle::canonical_copy_density(2, basis, f)?, 2, basis)?;
                    worst = worst
                        .max(oracle::compare(&o.output, &r.output)?)
                        .max((o.success_probability - r.success_probability).abs())
                        .max((o.fidelity - r.fidelity).abs());
                }
            }
            Ok(worst)
        })());
    }
    report
}
