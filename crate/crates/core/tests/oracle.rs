//! Exact-simulator examples and suites.

use num_complex::Complex64;

use ftqec::circuit::{Circuit, Gate, GateKind};
use ftqec::code::CodeDef;
use ftqec::gadgets::{build_circuit, GadgetKind, GadgetSpec};
use ftqec::oracle::{logical_fidelity, logical_state, run, run_classical, run_suite, StateVector, MAX_SLOTS};

#[test]
fn small_circuits() {
    let mut c = Circuit::empty(1);
    c.steps = vec![vec![Gate::one(GateKind::H, 0)], vec![Gate::one(GateKind::H, 0)]];
    let out = run(&c, &StateVector::zero(1).unwrap(), &[], 0).unwrap();
    assert!((out.state.amplitudes()[0].re - 1.0).abs() < 1e-12);

    let mut c = Circuit::empty(4);
    for t in 1..4 {
        c.steps.push(vec![Gate::cnot(t - 1, t)]);
    }
    let out = run(&c, &StateVector::basis(4, 1).unwrap(), &[], 0).unwrap();
    assert_eq!(out.state.dominant(), (0b1111, 1.0));
    assert_eq!(run_classical(&c, 1, &[]), Some(0b1111));
}

#[test]
fn logical_overlap_examples() {
    let bs = CodeDef::bacon_shor();
    let slots: Vec<usize> = (0..9).collect();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let z0 = logical_state(&bs, one, zero).unwrap();
    let z1 = logical_state(&bs, zero, one).unwrap();
    assert!((logical_fidelity(&bs, &z0, &slots, [0.0, 0.0, 1.0]).unwrap() - 1.0).abs() < 1e-10);
    assert!(logical_fidelity(&bs, &z1, &slots, [0.0, 0.0, 1.0]).unwrap() < 1e-10);
    // X pair along a row is a gauge operator
    let mut g = z0.clone();
    g.apply_x(6);
    g.apply_x(8);
    assert!((logical_fidelity(&bs, &g, &slots, [0.0, 0.0, 1.0]).unwrap() - 1.0).abs() < 1e-10);
    assert!((z0.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn qubit_budget_is_enforced() {
    assert!(StateVector::zero(MAX_SLOTS).is_ok());
    assert!(StateVector::zero(MAX_SLOTS + 1).is_err());
}

#[test]
fn norm_is_preserved_through_the_ec_gadget() {
    let g = build_circuit(GadgetSpec::new(GadgetKind::ECX)).unwrap();
    let bs = CodeDef::bacon_shor();
    let psi = logical_state(&bs, Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap();
    let out = run(&g.circuit, &psi, &[], 0).unwrap();
    assert!((out.state.norm() - 1.0).abs() < 1e-10);
    assert!(out.peak_slots <= MAX_SLOTS);
}

#[test]
fn truth_table_and_cat_suites_pass() {
    for s in ["majority", "parity", "cooling", "cat", "steane", "prep"] {
        for c in run_suite(s, 0).unwrap() {
            assert!(c.pass, "{}/{}: {}", c.suite, c.case, c.detail);
        }
    }
}

#[test]
fn oracle_agrees_with_fault_engine() {
    for c in run_suite("agreement", 3).unwrap() {
        assert!(c.pass, "{}", c.detail);
    }
}

#[test]
fn ec_corrects_single_data_errors_exactly() {
    for c in run_suite("ec", 0).unwrap() {
        assert!(c.pass, "{}: {}", c.case, c.detail);
    }
}
