//! Statevectors, pure-state ensembles and constructors for the Bell, GHZ and
//! logic Bell families.
//!
//! Basis indices are big-endian: the qubit at register position `k` is bit
//! `n - 1 - k` of the index, so `|b0 b1 ... b(n-1)>` has index
//! `b0 * 2^(n-1) + ... + b(n-1)`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::register::{make_register, Register};

/// Tolerance for exact-algebra comparisons.
pub const EXACT_TOL: f64 = 1e-12;

/// Largest register a statevector may span.
pub const MAX_STATE_QUBITS: usize = 24;

/// Probabilities at or below this are treated as impossible outcomes.
pub(crate) const IMPOSSIBLE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// The four Bell-type states. Used both for physical pairs
/// (`phi±`, `psi±`) and for logic pairs (`Phi±`, `Psi±`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    /// `(anti_correlated, relative_sign)`: phi is correlated, psi anti-correlated.
    fn parts(self) -> (bool, Sign) {
        match self {
            Bell::PhiPlus => (false, Sign::Plus),
            Bell::PhiMinus => (false, Sign::Minus),
            Bell::PsiPlus => (true, Sign::Plus),
            Bell::PsiMinus => (true, Sign::Minus),
        }
    }
}

impl fmt::Display for Bell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Bell::PhiPlus => "phi+",
            Bell::PhiMinus => "phi-",
            Bell::PsiPlus => "psi+",
            Bell::PsiMinus => "psi-",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    register: Register,
    amps: Vec<C64>,
}

impl PureState {
    /// Wraps amplitudes, checking length and normalization.
    pub fn new(register: Register, amps: Vec<C64>) -> Result<Self> {
        let s = Self::from_parts(register, amps)?;
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > EXACT_TOL {
            return Err(Error::InvalidArgument(format!(
                "state has squared norm {norm}, expected 1"
            )));
        }
        Ok(s)
    }

    pub(crate) fn from_parts(register: Register, amps: Vec<C64>) -> Result<Self> {
        let n = register.n_qubits();
        if n > MAX_STATE_QUBITS {
            return Err(Error::SizeCap {
                qubits: n,
                cap: MAX_STATE_QUBITS,
            });
        }
        if amps.len() != 1 << n {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes for a {n}-qubit register",
                amps.len()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        Ok(Self { register, amps })
    }

    /// Computational basis state; `bits[k]` is the value of register position `k`.
    pub fn basis(register: Register, bits: &[u8]) -> Result<Self> {
        let n = register.n_qubits();
        if bits.len() != n || bits.iter().any(|&b| b > 1) {
            return Err(Error::InvalidArgument(format!(
                "basis bits {bits:?} for a {n}-qubit register"
            )));
        }
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[idx] = C64::new(1.0, 0.0);
        Self::from_parts(register, amps)
    }

    pub fn zeros(register: Register) -> Result<Self> {
        let n = register.n_qubits();
        Self::basis(register, &vec![0; n])
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn n_qubits(&self) -> usize {
        self.register.n_qubits()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    /// Amplitude of the ket `|bits[0] bits[1] ...>`.
    pub fn amplitude_of(&self, bits: &[u8]) -> Result<C64> {
        if bits.len() != self.n_qubits() {
            return Err(Error::InvalidArgument("bit string length".into()));
        }
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        Ok(self.amps[idx])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Same amplitudes over a different register of equal size.
    pub fn with_register(self, register: Register) -> Result<Self> {
        if register.n_qubits() != self.n_qubits() {
            return Err(Error::RegisterMismatch(format!(
                "{} qubits cannot be relabelled as {register}",
                self.n_qubits()
            )));
        }
        Ok(Self {
            register,
            amps: self.amps,
        })
    }

    pub fn relabel<F: Fn(&str) -> String>(&self, f: F) -> Result<Self> {
        Ok(Self {
            register: self.register.renamed(f)?,
            amps: self.amps.clone(),
        })
    }

    /// Signed inner product `<self|other>`.
    pub fn overlap(&self, other: &PureState) -> Result<C64> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch(format!(
                "{} vs {}",
                self.register, other.register
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|<self|other>|`, the phase-insensitive comparison primitive.
    pub fn overlap_abs(&self, other: &PureState) -> Result<f64> {
        Ok(self.overlap(other)?.norm())
    }

    /// Probability that `label` reads 1 in the computational basis.
    pub fn prob_one(&self, label: &str) -> Result<f64> {
        let mask = self.register.mask_of(label)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            / self.norm_sqr())
    }

    /// Kronecker product on the concatenated register.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let register = self.register.concat(&other.register)?;
        if register.n_qubits() > MAX_STATE_QUBITS {
            return Err(Error::SizeCap {
                qubits: register.n_qubits(),
                cap: MAX_STATE_QUBITS,
            });
        }
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        Self::from_parts(register, amps)
    }

    /// Removes qubits that are each in a definite basis state.
    pub fn discard(&self, labels: &[&str]) -> Result<PureState> {
        let mut keep_mask = usize::MAX;
        let mut fixed_bits = 0usize;
        for &label in labels {
            let mask = self.register.mask_of(label)?;
            let p1 = self.prob_one(label)?;
            let bit = if p1 < EXACT_TOL {
                0
            } else if p1 > 1.0 - EXACT_TOL {
                mask
            } else {
                return Err(Error::NotDefinite(label.to_string()));
            };
            keep_mask &= !mask;
            fixed_bits |= bit;
        }
        let drop_mask = !keep_mask & ((1 << self.n_qubits()) - 1);
        let register = self.register.without(labels)?;
        let amps: Vec<C64> = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & drop_mask == fixed_bits)
            .map(|(_, a)| *a)
            .collect();
        Self::from_parts(register, amps)
    }

    /// The same physical state written over `target`, which must hold the same labels.
    pub fn reorder(&self, target: &Register) -> Result<PureState> {
        let n = self.n_qubits();
        if target.n_qubits() != n {
            return Err(Error::RegisterMismatch(format!(
                "{} vs {target}",
                self.register
            )));
        }
        // bit shift of each source position inside the target index
        let shifts: Vec<usize> = self
            .register
            .labels()
            .iter()
            .map(|l| target.index_of(l).map(|p| n - 1 - p))
            .collect::<Result<_>>()?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        for (i, a) in self.amps.iter().enumerate() {
            let mut j = 0usize;
            for (pos, shift) in shifts.iter().enumerate() {
                if i >> (n - 1 - pos) & 1 == 1 {
                    j |= 1 << shift;
                }
            }
            amps[j] = *a;
        }
        Self::from_parts(target.clone(), amps)
    }

    pub(crate) fn scaled(mut self, factor: f64) -> Self {
        for a in &mut self.amps {
            *a *= factor;
        }
        self
    }
}

/// Physical Bell state on the register `q1, q2`.
pub fn make_bell(kind: Bell) -> PureState {
    let (anti, sign) = kind.parts();
    let h = FRAC_1_SQRT_2;
    let mut amps = vec![C64::new(0.0, 0.0); 4];
    if anti {
        amps[0b01] = C64::new(h, 0.0);
        amps[0b10] = C64::new(sign.value() * h, 0.0);
    } else {
        amps[0b00] = C64::new(h, 0.0);
        amps[0b11] = C64::new(sign.value() * h, 0.0);
    }
    PureState {
        register: make_register(&[("q", 2)]).expect("static register"),
        amps,
    }
}

/// `(|0...0> ± |1...1>)/√2` on the register `q1..qn`.
pub fn make_ghz(n: usize, sign: Sign) -> Result<PureState> {
    if n == 0 {
        return Err(Error::InvalidArgument("GHZ state needs at least one qubit".into()));
    }
    if n > MAX_STATE_QUBITS {
        return Err(Error::SizeCap {
            qubits: n,
            cap: MAX_STATE_QUBITS,
        });
    }
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    amps[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    amps[(1 << n) - 1] = C64::new(sign.value() * FRAC_1_SQRT_2, 0.0);
    PureState::from_parts(make_register(&[("q", n)])?, amps)
}

/// Register `a1..an, b1..bn` holding one logic Bell pair.
pub fn logic_pair_register(n: usize) -> Result<Register> {
    make_register(&[("a", n), ("b", n)])
}

/// Logic Bell state with `n` physical qubits per logic qubit, on `a1..an, b1..bn`.
///
/// `Phi±` is `(|G+>|G+> ± |G->|G->)/√2` and `Psi±` is
/// `(|G+>|G-> ± |G->|G+>)/√2`, where `|G±>` is the n-qubit GHZ state.
pub fn make_logic_bell(n: usize, kind: Bell) -> Result<PureState> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "a logic qubit needs at least 2 physical qubits, got {n}"
        )));
    }
    let (anti, sign) = kind.parts();
    let gp = make_ghz(n, Sign::Plus)?;
    let gm = make_ghz(n, Sign::Minus)?;
    let (first, second) = if anti {
        (kron(&gp.amps, &gm.amps), kron(&gm.amps, &gp.amps))
    } else {
        (kron(&gp.amps, &gp.amps), kron(&gm.amps, &gm.amps))
    };
    let amps = first
        .iter()
        .zip(&second)
        .map(|(x, y)| (x + y * sign.value()) * FRAC_1_SQRT_2)
        .collect();
    PureState::from_parts(logic_pair_register(n)?, amps)
}

fn kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub weight: f64,
    pub state: PureState,
}

/// A mixed state stored as weighted pure branches.
///
/// Weights normally sum to 1. Post-selection intermediates may be
/// sub-normalized, with the weight sum equal to the success probability.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    branches: Vec<Branch>,
}

impl Ensemble {
    pub fn new(branches: Vec<Branch>) -> Result<Self> {
        let Some(first) = branches.first() else {
            return Err(Error::InvalidArgument("empty ensemble".into()));
        };
        for b in &branches {
            if b.weight < 0.0 || !b.weight.is_finite() {
                return Err(Error::InvalidArgument(format!("branch weight {}", b.weight)));
            }
            if b.state.register != first.state.register {
                return Err(Error::RegisterMismatch(format!(
                    "branch registers {} and {}",
                    first.state.register, b.state.register
                )));
            }
        }
        Ok(Self { branches })
    }

    pub fn pure(state: PureState) -> Self {
        Self {
            branches: vec![Branch { weight: 1.0, state }],
        }
    }

    /// `weight·first + (1 - weight)·second`, skipping zero-weight branches.
    pub fn mixture(weight: f64, first: PureState, second: PureState) -> Result<Self> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::InvalidArgument(format!("mixing weight {weight}")));
        }
        let branches = [(weight, first), (1.0 - weight, second)]
            .into_iter()
            .filter(|(w, _)| *w > 0.0)
            .map(|(weight, state)| Branch { weight, state })
            .collect();
        Self::new(branches)
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn into_branches(self) -> Vec<Branch> {
        self.branches
    }

    pub fn register(&self) -> &Register {
        &self.branches[0].state.register
    }

    pub fn total_weight(&self) -> f64 {
        self.branches.iter().map(|b| b.weight).sum()
    }

    /// Rescales to unit weight, returning the prior total.
    pub fn normalized(&self) -> Result<(f64, Ensemble)> {
        let total = self.total_weight();
        if total <= IMPOSSIBLE {
            return Err(Error::ZeroProbability);
        }
        let branches = self
            .branches
            .iter()
            .map(|b| Branch {
                weight: b.weight / total,
                state: b.state.clone(),
            })
            .collect();
        Ok((total, Ensemble { branches }))
    }

    pub fn map<F>(&self, f: F) -> Result<Ensemble>
    where
        F: Fn(&PureState) -> Result<PureState>,
    {
        let branches = self
            .branches
            .iter()
            .map(|b| {
                Ok(Branch {
                    weight: b.weight,
                    state: f(&b.state)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ensemble::new(branches)
    }

    /// Product ensemble with one branch per pair of input branches.
    pub fn tensor(&self, other: &Ensemble) -> Result<Ensemble> {
        let mut branches = Vec::with_capacity(self.branches.len() * other.branches.len());
        for x in &self.branches {
            for y in &other.branches {
                branches.push(Branch {
                    weight: x.weight * y.weight,
                    state: x.state.tensor(&y.state)?,
                });
            }
        }
        Ensemble::new(branches)
    }

    pub fn discard(&self, labels: &[&str]) -> Result<Ensemble> {
        self.map(|s| s.discard(labels))
    }

    pub fn relabel<F: Fn(&str) -> String>(&self, f: F) -> Result<Ensemble> {
        self.map(|s| s.relabel(&f))
    }

    /// Largest |1> probability of `label` over all branches.
    pub fn max_prob_one(&self, label: &str) -> Result<f64> {
        self.branches
            .iter()
            .map(|b| b.state.prob_one(label))
            .try_fold(0.0f64, |m, p| Ok(m.max(p?)))
    }
}

/// `<target|ρ|target>` for the ensemble `ρ`.
pub fn fidelity(e: &Ensemble, target: &PureState) -> Result<f64> {
    let mut f = 0.0;
    for b in e.branches() {
        f += b.weight * target.overlap(&b.state)?.norm_sqr();
    }
    Ok(f.clamp(0.0, 1.0))
}

/// Largest register `to_density_matrix` will expand.
pub const MAX_DENSITY_QUBITS: usize = 12;

/// `Σ w |ψ><ψ|`.
pub fn to_density_matrix(e: &Ensemble) -> Result<DensityMatrix> {
    let register = e.register().clone();
    let n = register.n_qubits();
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::SizeCap {
            qubits: n,
            cap: MAX_DENSITY_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut data = vec![C64::new(0.0, 0.0); dim * dim];
    for b in e.branches() {
        let amps = b.state.amplitudes();
        for (i, ai) in amps.iter().enumerate() {
            if ai.norm_sqr() == 0.0 {
                continue;
            }
            let row = &mut data[i * dim..(i + 1) * dim];
            let wi = ai * b.weight;
            for (entry, aj) in row.iter_mut().zip(amps) {
                *entry += wi * aj.conj();
            }
        }
    }
    DensityMatrix::from_parts(register, data)
}
