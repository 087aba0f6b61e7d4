//! Brute-force density-matrix reference path.
//!
//! Nothing here goes through the statevector kernels or the ensemble engine:
//! states are assembled from explicit GHZ vectors, gates are small dense
//! matrices embedded into the full space, measurement is projector
//! arithmetic and discarded modes are traced out. The results are compared
//! against the ensemble engine in tests and in `verify`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::noise::{ErrorKind, LogicQubit};
use crate::protocol::ErrorBasis;
use crate::register::{make_register, Register};
use crate::state::{to_density_matrix, Bell, Ensemble};

/// Largest register the oracle will evolve (4096 x 4096 entries).
pub const MAX_ORACLE_QUBITS: usize = 12;

/// Tolerance for oracle-vs-engine comparisons.
pub const ORACLE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gate {
    H(String),
    X(String),
    Y(String),
    Z(String),
    Cnot { control: String, target: String },
}

impl Gate {
    pub fn cnot(control: &str, target: &str) -> Self {
        Gate::Cnot {
            control: control.to_string(),
            target: target.to_string(),
        }
    }

    /// Row-major matrix and the labels it acts on, most significant first.
    fn matrix(&self) -> (Vec<C64>, Vec<&str>) {
        let c = |re: f64, im: f64| C64::new(re, im);
        let h = FRAC_1_SQRT_2;
        match self {
            Gate::H(l) => (vec![c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)], vec![l]),
            Gate::X(l) => (vec![c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)], vec![l]),
            Gate::Y(l) => (vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)], vec![l]),
            Gate::Z(l) => (vec![c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)], vec![l]),
            Gate::Cnot { control, target } => {
                let mut m = vec![c(0., 0.); 16];
                for (row, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
                    m[row * 4 + col] = c(1., 0.);
                }
                (m, vec![control, target])
            }
        }
    }
}

fn check_size(register: &Register) -> Result<()> {
    if register.n_qubits() > MAX_ORACLE_QUBITS {
        return Err(Error::SizeCap {
            qubits: register.n_qubits(),
            cap: MAX_ORACLE_QUBITS,
        });
    }
    Ok(())
}

/// `ρ -> Mρ` for a local operator `op` on `labels`.
fn left_multiply(dm: &mut DensityMatrix, op: &[C64], labels: &[&str]) -> Result<()> {
    let register = dm.register().clone();
    let masks: Vec<usize> = labels.iter().map(|l| register.mask_of(l)).collect::<Result<_>>()?;
    for (i, a) in labels.iter().enumerate() {
        if labels[i + 1..].contains(a) {
            return Err(Error::IdenticalLabels(a.to_string()));
        }
    }
    let k = labels.len();
    let sub = 1usize << k;
    let all: usize = masks.iter().fold(0, |acc, m| acc | m);
    let offsets: Vec<usize> = (0..sub)
        .map(|m| {
            (0..k)
                .filter(|&bit| m >> (k - 1 - bit) & 1 == 1)
                .fold(0, |acc, bit| acc | masks[bit])
        })
        .collect();
    let dim = dm.dim();
    let data = dm.data_mut();
    let mut scratch = vec![C64::new(0.0, 0.0); sub * dim];
    for base in (0..dim).filter(|i| i & all == 0) {
        for (m, off) in offsets.iter().enumerate() {
            let r = base | off;
            scratch[m * dim..(m + 1) * dim].copy_from_slice(&data[r * dim..(r + 1) * dim]);
        }
        for (m, off) in offsets.iter().enumerate() {
            let r = base | off;
            let row = &mut data[r * dim..(r + 1) * dim];
            row.fill(C64::new(0.0, 0.0));
            for l in 0..sub {
                let u = op[m * sub + l];
                if u.norm_sqr() == 0.0 {
                    continue;
                }
                for (x, y) in row.iter_mut().zip(&scratch[l * dim..(l + 1) * dim]) {
                    *x += u * y;
                }
            }
        }
    }
    Ok(())
}

fn dagger_in_place(dm: &mut DensityMatrix) {
    let dim = dm.dim();
    let data = dm.data_mut();
    for i in 0..dim {
        data[i * dim + i] = data[i * dim + i].conj();
        for j in i + 1..dim {
            let a = data[i * dim + j];
            data[i * dim + j] = data[j * dim + i].conj();
            data[j * dim + i] = a.conj();
        }
    }
}

/// `ρ -> UρU†` for every gate in order. `dm` must be Hermitian.
pub fn evolve_density(dm: &DensityMatrix, circuit: &[Gate]) -> Result<DensityMatrix> {
    check_size(dm.register())?;
    let mut out = dm.clone();
    for gate in circuit {
        let (op, labels) = gate.matrix();
        // UρU† = U (Uρ)† for Hermitian ρ
        left_multiply(&mut out, &op, &labels)?;
        dagger_in_place(&mut out);
        left_multiply(&mut out, &op, &labels)?;
    }
    Ok(out)
}

/// `PρP` for the projector onto `label = outcome`, unnormalized.
pub fn project(dm: &DensityMatrix, label: &str, outcome: u8) -> Result<DensityMatrix> {
    let mask = dm.register().mask_of(label)?;
    let want = if outcome == 1 { mask } else { 0 };
    let dim = dm.dim();
    let mut out = dm.clone();
    for (idx, x) in out.data_mut().iter_mut().enumerate() {
        let (i, j) = (idx / dim, idx % dim);
        if i & mask != want || j & mask != want {
            *x = C64::new(0.0, 0.0);
        }
    }
    Ok(out)
}

/// `(tr(PρP), PρP / tr(PρP))`.
pub fn postselect_density(dm: &DensityMatrix, label: &str, outcome: u8) -> Result<(f64, DensityMatrix)> {
    let mut p = project(dm, label, outcome)?;
    let prob = p.trace().re;
    if prob <= 1e-14 {
        return Err(Error::ZeroProbability);
    }
    p.scale(1.0 / prob);
    Ok((prob, p))
}

/// Traces out `labels`.
pub fn partial_trace(dm: &DensityMatrix, labels: &[&str]) -> Result<DensityMatrix> {
    let register = dm.register();
    let kept_register = register.without(labels)?;
    let n = register.n_qubits();
    let traced_mask: usize = labels.iter().map(|l| register.mask_of(l)).sum::<Result<usize>>()?;
    let dim = dm.dim();
    let kdim = 1usize << kept_register.n_qubits();
    // kept index of each full index: compress the non-traced bits
    let kept_of: Vec<usize> = (0..dim)
        .map(|i| {
            (0..n)
                .rev()
                .filter(|b| traced_mask >> b & 1 == 0)
                .fold(0, |acc, b| (acc << 1) | (i >> b & 1))
        })
        .collect();
    let mut data = vec![C64::new(0.0, 0.0); kdim * kdim];
    for i in 0..dim {
        for j in 0..dim {
            if i & traced_mask == j & traced_mask {
                data[kept_of[i] * kdim + kept_of[j]] += dm.get(i, j);
            }
        }
    }
    DensityMatrix::from_parts(kept_register, data)
}

/// Largest entrywise deviation between an ensemble and a density matrix.
pub fn compare(e: &Ensemble, dm: &DensityMatrix) -> Result<f64> {
    if e.register().n_qubits() != dm.register().n_qubits() {
        return Err(Error::RegisterMismatch(format!(
            "ensemble over {} vs matrix over {}",
            e.register(),
            dm.register()
        )));
    }
    to_density_matrix(e)?.max_abs_diff(dm)
}

fn ghz_vec(n: usize, minus: bool) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); 1 << n];
    v[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    v[(1 << n) - 1] = C64::new(if minus { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 }, 0.0);
    v
}

fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

/// Logic Bell amplitudes on `a1..an, b1..bn`, built from GHZ vectors.
pub fn logic_bell_vector(n: usize, kind: Bell) -> Vec<C64> {
    let (p, m) = (ghz_vec(n, false), ghz_vec(n, true));
    let (x, y, sign) = match kind {
        Bell::PhiPlus => (kron_vec(&p, &p), kron_vec(&m, &m), 1.0),
        Bell::PhiMinus => (kron_vec(&p, &p), kron_vec(&m, &m), -1.0),
        Bell::PsiPlus => (kron_vec(&p, &m), kron_vec(&m, &p), 1.0),
        Bell::PsiMinus => (kron_vec(&p, &m), kron_vec(&m, &p), -1.0),
    };
    x.iter().zip(&y).map(|(u, v)| (u + v * sign) * FRAC_1_SQRT_2).collect()
}

fn pair_register(alice: &str, bob: &str, n: usize) -> Result<Register> {
    make_register(&[(alice, n), (bob, n)])
}

/// Single-copy noisy pair `F|Phi+><Phi+| + (1-F) EρE†` where `E` is the
/// Pauli realization of `kind` on `target` (position ignored for logic kinds).
pub fn noisy_copy_density(n: usize, kind: ErrorKind, f: f64, target: LogicQubit, position: usize) -> Result<DensityMatrix> {
    let register = pair_register("a", "b", n)?;
    let clean = DensityMatrix::from_amplitudes(register, &logic_bell_vector(n, Bell::PhiPlus))?;
    let t = |k: usize| target.mode(k);
    let error: Vec<Gate> = match kind {
        ErrorKind::LogicBitFlip => vec![Gate::Z(t(0))],
        ErrorKind::LogicPhaseFlip => (0..n).map(|k| Gate::X(t(k))).collect(),
        ErrorKind::PhysBitFlip => vec![Gate::X(t(position))],
        ErrorKind::PhysPhaseFlip => vec![Gate::Z(t(position))],
    };
    let mut flipped = evolve_density(&clean, &error)?;
    let mut out = clean;
    out.scale(f);
    flipped.scale(1.0 - f);
    out.add_assign(&flipped)?;
    Ok(out)
}

/// Canonical noisy pair for a purification basis, as the oracle builds it.
pub fn canonical_copy_density(n: usize, basis: ErrorBasis, f: f64) -> Result<DensityMatrix> {
    match basis {
        ErrorBasis::Bit => noisy_copy_density(n, ErrorKind::LogicBitFlip, f, LogicQubit::B, 0),
        ErrorBasis::Phase => noisy_copy_density(n, ErrorKind::LogicPhaseFlip, f, LogicQubit::A, 0),
    }
}

/// CNOT fan-out from the first mode then Hadamard, on both logic qubits.
pub fn reduction_circuit(alice: &str, bob: &str, n: usize) -> Vec<Gate> {
    let mut c = Vec::new();
    for p in [alice, bob] {
        for k in 2..=n {
            c.push(Gate::cnot(&format!("{p}1"), &format!("{p}{k}")));
        }
        c.push(Gate::H(format!("{p}1")));
    }
    c
}

/// Hadamard on the first modes then CNOT fan-out, on both logic qubits.
pub fn recovery_circuit(alice: &str, bob: &str, n: usize) -> Vec<Gate> {
    let mut c = Vec::new();
    for p in [alice, bob] {
        c.push(Gate::H(format!("{p}1")));
        for k in 2..=n {
            c.push(Gate::cnot(&format!("{p}1"), &format!("{p}{k}")));
        }
    }
    c
}

#[derive(Clone, Debug)]
pub struct OracleOutcome {
    pub success_probability: f64,
    pub fidelity: f64,
    /// Recovered output pair on `a1..an, b1..bn`.
    pub output: DensityMatrix,
    /// Full two-copy state after post-selection and before the trace, normalized.
    pub post_selected: DensityMatrix,
}

/// One purification round on `copy ⊗ copy`, evolved as a dense matrix.
pub fn purify_density(copy: &DensityMatrix, n: usize, basis: ErrorBasis) -> Result<OracleOutcome> {
    let expected = pair_register("a", "b", n)?;
    if copy.register() != &expected {
        return Err(Error::RegisterMismatch(format!("{} vs {expected}", copy.register())));
    }
    let second = DensityMatrix::from_parts(pair_register("c", "d", n)?, copy.data().to_vec())?;
    let joint = copy.kron(&second)?;
    check_size(joint.register())?;

    let mut circuit = reduction_circuit("a", "b", n);
    circuit.extend(reduction_circuit("c", "d", n));
    if basis == ErrorBasis::Phase {
        circuit.extend(["a1", "b1", "c1", "d1"].map(|l| Gate::H(l.into())));
    }
    circuit.push(Gate::cnot("a1", "c1"));
    circuit.push(Gate::cnot("b1", "d1"));
    let evolved = evolve_density(&joint, &circuit)?;

    let mut kept = project(&project(&evolved, "c1", 0)?, "d1", 0)?;
    kept.add_assign(&project(&project(&evolved, "c1", 1)?, "d1", 1)?)?;
    let success_probability = kept.trace().re;
    if success_probability <= 1e-14 {
        return Err(Error::ZeroProbability);
    }
    kept.scale(1.0 / success_probability);

    let traced: Vec<String> = (1..=n).flat_map(|k| [format!("c{k}"), format!("d{k}")]).collect();
    let traced: Vec<&str> = traced.iter().map(String::as_str).collect();
    let pair = partial_trace(&kept, &traced)?;
    let mut tail = Vec::new();
    if basis == ErrorBasis::Phase {
        tail.extend(["a1", "b1"].map(|l| Gate::H(l.into())));
    }
    tail.extend(recovery_circuit("a", "b", n));
    let output = evolve_density(&pair, &tail)?;
    let fidelity = output.expectation(&logic_bell_vector(n, Bell::PhiPlus));
    Ok(OracleOutcome {
        success_probability,
        fidelity,
        output,
        post_selected: kept,
    })
}

/// Physical bit-flip correction on logic qubit `target`, evolved densely.
///
/// Returns the flag probability and the corrected pair.
pub fn correct_density(copy: &DensityMatrix, n: usize, target: LogicQubit) -> Result<(f64, DensityMatrix)> {
    let modes: Vec<String> = (0..n).map(|k| target.mode(k)).collect();
    let spread: Vec<Gate> = modes[1..].iter().map(|m| Gate::cnot(&modes[0], m)).collect();
    let evolved = evolve_density(copy, &spread)?;
    let mut total: Option<DensityMatrix> = None;
    let mut flag = 0.0;
    // enumerate every ancilla syndrome
    for syndrome in 0..1usize << (n - 1) {
        let bits: Vec<u8> = (0..n - 1).map(|k| (syndrome >> (n - 2 - k) & 1) as u8).collect();
        let mut branch = evolved.clone();
        for (m, &b) in modes[1..].iter().zip(&bits) {
            branch = project(&branch, m, b)?;
        }
        let p = branch.trace().re;
        if p <= 1e-14 {
            continue;
        }
        if bits.contains(&1) {
            flag += p;
        }
        let mut fix: Vec<Gate> = modes[1..]
            .iter()
            .zip(&bits)
            .filter(|(_, &b)| b == 1)
            .map(|(m, _)| Gate::X(m.clone()))
            .collect();
        fix.extend(spread.iter().cloned());
        let fixed = evolve_density(&branch, &fix)?;
        match total.as_mut() {
            None => total = Some(fixed),
            Some(t) => t.add_assign(&fixed)?,
        }
    }
    let out = total.ok_or(Error::ZeroProbability)?;
    Ok((flag, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{make_bell, make_logic_bell, PureState, EXACT_TOL};

    #[test]
    fn identity_circuit() {
        let dm = canonical_copy_density(2, ErrorBasis::Bit, 0.7).unwrap();
        assert_eq!(evolve_density(&dm, &[]).unwrap(), dm);
    }

    #[test]
    fn cnot_matches_engine() {
        let s = make_logic_bell(2, Bell::PhiPlus).unwrap();
        let dm = to_density_matrix(&Ensemble::pure(s.clone())).unwrap();
        let out = evolve_density(&dm, &[Gate::cnot("a1", "a2")]).unwrap();
        let engine = crate::gates::apply_cnot(&s, "a1", "a2").unwrap();
        assert!(compare(&Ensemble::pure(engine), &out).unwrap() < ORACLE_TOL);
    }

    #[test]
    fn project_plus() {
        let reg = make_register(&[("q", 1)]).unwrap();
        let h = FRAC_1_SQRT_2;
        let dm = DensityMatrix::from_amplitudes(reg.clone(), &[C64::new(h, 0.0), C64::new(h, 0.0)]).unwrap();
        let (p, post) = postselect_density(&dm, "q1", 0).unwrap();
        assert!((p - 0.5).abs() < EXACT_TOL);
        let zero = to_density_matrix(&Ensemble::pure(PureState::zeros(reg).unwrap())).unwrap();
        assert!(post.max_abs_diff(&zero).unwrap() < EXACT_TOL);
    }

    #[test]
    fn project_impossible() {
        let reg = make_register(&[("q", 1)]).unwrap();
        let dm = to_density_matrix(&Ensemble::pure(PureState::zeros(reg).unwrap())).unwrap();
        assert!(matches!(postselect_density(&dm, "q1", 1), Err(Error::ZeroProbability)));
    }

    #[test]
    fn compare_self_and_perturbed() {
        let e = Ensemble::pure(make_bell(Bell::PsiPlus));
        let dm = to_density_matrix(&e).unwrap();
        assert_eq!(compare(&e, &dm).unwrap(), 0.0);
        let mut data = dm.data().to_vec();
        data[5] += C64::new(3e-4, 0.0);
        let bumped = DensityMatrix::from_parts(dm.register().clone(), data).unwrap();
        assert!((compare(&e, &bumped).unwrap() - 3e-4).abs() < 1e-15);
    }

    #[test]
    fn compare_dimension_mismatch() {
        let e = Ensemble::pure(make_bell(Bell::PsiPlus));
        let dm = canonical_copy_density(2, ErrorBasis::Bit, 0.5).unwrap();
        assert!(compare(&e, &dm).is_err());
    }

    #[test]
    fn size_cap() {
        let reg = make_register(&[("q", 13)]).unwrap();
        // never materialized: the cap is checked before any work
        let tiny = DensityMatrix::from_parts(make_register(&[("q", 1)]).unwrap(), vec![C64::new(1.0, 0.0); 4]).unwrap();
        assert!(check_size(&reg).is_err());
        assert!(check_size(tiny.register()).is_ok());
    }

    #[test]
    fn partial_trace_of_product() {
        let a = canonical_copy_density(2, ErrorBasis::Bit, 0.6).unwrap();
        let reg = make_register(&[("z", 1)]).unwrap();
        let z = to_density_matrix(&Ensemble::pure(PureState::zeros(reg).unwrap())).unwrap();
        let t = partial_trace(&a.kron(&z).unwrap(), &["z1"]).unwrap();
        assert!(t.max_abs_diff(&a).unwrap() < EXACT_TOL);
    }

    #[test]
    fn headline_value() {
        let copy = canonical_copy_density(2, ErrorBasis::Bit, 0.8).unwrap();
        let o = purify_density(&copy, 2, ErrorBasis::Bit).unwrap();
        assert!((o.fidelity - 16.0 / 17.0).abs() < ORACLE_TOL);
        assert!((o.success_probability - 0.68).abs() < ORACLE_TOL);
    }

    #[test]
    fn logic_vectors_match_engine() {
        for n in 2..=4 {
            for kind in Bell::ALL {
                let e = make_logic_bell(n, kind).unwrap();
                let v = logic_bell_vector(n, kind);
                assert!(e.amplitudes().iter().zip(&v).all(|(x, y)| (x - y).norm() < EXACT_TOL));
            }
        }
    }
}
