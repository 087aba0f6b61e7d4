//! Ensemble engine against the dense density-matrix oracle.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use logic_purify::density::DensityMatrix;
use logic_purify::gates::apply_cnot;
use logic_purify::oracle::{
    self, canonical_copy_density, compare, evolve_density, postselect_density, purify_density, reduction_circuit,
    Gate, ORACLE_TOL,
};
use logic_purify::protocol::{bennett_step, noisy_pair, purify_pair, reduce_copy, CopyModes};
use logic_purify::state::{make_bell, make_logic_bell, to_density_matrix};
use logic_purify::{Bell, Ensemble, Error, ErrorBasis};

fn f_prime(f: f64) -> f64 {
    f * f / (f * f + (1.0 - f) * (1.0 - f))
}

fn min_eigenvalue(dm: &DensityMatrix) -> f64 {
    let d = dm.dim();
    let m = DMatrix::<C64>::from_row_slice(d, d, dm.data());
    m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

#[test]
fn identity_circuit_is_noop() {
    let dm = canonical_copy_density(2, ErrorBasis::Bit, 0.7).unwrap();
    let out = evolve_density(&dm, &[]).unwrap();
    assert_eq!(out.max_abs_diff(&dm).unwrap(), 0.0);
}

#[test]
fn cnot_on_bell_matches_engine() {
    let phi = make_bell(Bell::PhiPlus);
    let engine = apply_cnot(&phi, "q1", "q2").unwrap();
    let dm = to_density_matrix(&Ensemble::pure(phi)).unwrap();
    let oracle = evolve_density(&dm, &[Gate::cnot("q1", "q2")]).unwrap();
    assert!(compare(&Ensemble::pure(engine), &oracle).unwrap() < ORACLE_TOL);
    assert!(oracle.is_hermitian(1e-12));
}

#[test]
fn purification_agrees_n2() {
    for basis in [ErrorBasis::Bit, ErrorBasis::Phase] {
        for k in 1..20 {
            let f = k as f64 * 0.05;
            let o = purify_pair(&noisy_pair(2, basis, f).unwrap(), basis).unwrap();
            let r = purify_density(&canonical_copy_density(2, basis, f).unwrap(), 2, basis).unwrap();
            assert!(compare(&o.output, &r.output).unwrap() < ORACLE_TOL, "{basis:?} F={f}");
            assert!((o.success_probability - r.success_probability).abs() < ORACLE_TOL);
            assert!((r.fidelity - f_prime(f)).abs() < ORACLE_TOL);
            assert!((r.output.trace().re - 1.0).abs() < ORACLE_TOL);
            assert!(r.output.is_hermitian(ORACLE_TOL));
            assert!(min_eigenvalue(&r.output) > -ORACLE_TOL);
        }
    }
}

#[test]
fn phase_purification_agrees_n3() {
    let f = 0.8;
    let o = purify_pair(&noisy_pair(3, ErrorBasis::Phase, f).unwrap(), ErrorBasis::Phase).unwrap();
    let r = purify_density(&canonical_copy_density(3, ErrorBasis::Phase, f).unwrap(), 3, ErrorBasis::Phase).unwrap();
    assert!(compare(&o.output, &r.output).unwrap() < ORACLE_TOL);
    assert!((r.fidelity - 16.0 / 17.0).abs() < ORACLE_TOL);
    assert!((o.success_probability - 0.68).abs() < 1e-12);
}

#[test]
fn conditional_state_after_bennett_matches() {
    let f = 0.7;
    let copy = noisy_pair(2, ErrorBasis::Bit, f).unwrap();
    let joint = copy
        .tensor(&copy.relabel(|l| l.replace('a', "c").replace('b', "d")).unwrap())
        .unwrap();
    let (m1, m2) = (CopyModes::first_copy(2).unwrap(), CopyModes::second_copy(2).unwrap());
    let reduced = joint.map(|s| reduce_copy(&reduce_copy(s, &m1)?, &m2)).unwrap();
    let engine = bennett_step(&reduced, ("a1", "b1"), ("c1", "d1")).unwrap();

    let rho = canonical_copy_density(2, ErrorBasis::Bit, f).unwrap();
    let two = rho.kron(&relabelled(&rho)).unwrap();
    let mut circuit = reduction_circuit("a", "b", 2);
    circuit.extend(reduction_circuit("c", "d", 2));
    circuit.push(Gate::cnot("a1", "c1"));
    circuit.push(Gate::cnot("b1", "d1"));
    let evolved = evolve_density(&two, &circuit).unwrap();
    let (p_c, given_c) = postselect_density(&evolved, "c1", 0).unwrap();
    let (p_d, given_cd) = postselect_density(&given_c, "d1", 0).unwrap();

    let (p, sub) = &engine[&vec![0, 0]];
    assert!((p - p_c * p_d).abs() < ORACLE_TOL);
    assert!((p - success(f) / 2.0).abs() < 1e-12);
    assert!(compare(sub, &given_cd).unwrap() < ORACLE_TOL);
}

fn success(f: f64) -> f64 {
    f * f + (1.0 - f) * (1.0 - f)
}

fn relabelled(dm: &DensityMatrix) -> DensityMatrix {
    let reg = dm.register().renamed(|l| l.replace('a', "c").replace('b', "d")).unwrap();
    DensityMatrix::from_parts(reg, dm.data().to_vec()).unwrap()
}

#[test]
fn impossible_outcome_signalled() {
    let dm = to_density_matrix(&Ensemble::pure(make_bell(Bell::PhiPlus))).unwrap();
    let p = oracle::project(&dm, "q1", 1).unwrap();
    assert!((p.trace().re - 0.5).abs() < 1e-12);
    let (_, zero) = postselect_density(&dm, "q1", 0).unwrap();
    assert!(matches!(postselect_density(&zero, "q2", 1), Err(Error::ZeroProbability)));
}

#[test]
fn compare_reports_perturbation() {
    let phi = make_logic_bell(2, Bell::PhiPlus).unwrap();
    let psi = make_logic_bell(2, Bell::PsiPlus).unwrap();
    let e = Ensemble::mixture(0.8, phi.clone(), psi.clone()).unwrap();
    assert_eq!(compare(&e, &to_density_matrix(&e).unwrap()).unwrap(), 0.0);
    // the |0000><1111| coherence is F - 1/2, so shifting F by d moves it by d
    let d = 1e-3;
    let shifted = to_density_matrix(&Ensemble::mixture(0.8 + d, phi, psi).unwrap()).unwrap();
    assert!((compare(&e, &shifted).unwrap() - d).abs() < 1e-12);
}

#[test]
fn size_mismatch_rejected() {
    let e = Ensemble::pure(make_logic_bell(2, Bell::PhiPlus).unwrap());
    let dm = to_density_matrix(&Ensemble::pure(make_bell(Bell::PhiPlus))).unwrap();
    assert!(compare(&e, &dm).is_err());
}
