//! Fault propagation checked against the exact simulator.

use proptest::prelude::*;

use ftqec::circuit::{Circuit, Gate, GateKind, Location};
use ftqec::fault::ideal::analyze_circuit;
use ftqec::fault::{propagate, Engine, FaultEvent, Frame, Judge};
use ftqec::gadgets::{build_circuit, GadgetCircuit, GadgetKind, GadgetSpec};
use ftqec::oracle::{run, run_classical, StateVector};
use ftqec::pauli::{Pauli, PauliString};

fn wrap(c: &Circuit) -> GadgetCircuit {
    GadgetCircuit {
        spec: GadgetSpec::new(GadgetKind::ECX),
        circuit: c.clone(),
        data_qubits: (0..c.n_qubits).collect(),
        ancilla_qubits: vec![],
        inputs: vec![],
        outputs: vec![],
    }
}

/// One gate per step, every other live qubit waiting.
fn circuit_of(n: usize, gates: &[Gate]) -> Circuit {
    let mut c = Circuit::empty(n);
    for g in gates {
        let mut step = vec![g.clone()];
        step.extend((0..n).filter(|q| !g.qubits.contains(q)).map(Gate::wait));
        c.steps.push(step);
    }
    c
}

fn gate_strategy(n: usize, toffoli: bool) -> impl Strategy<Value = Gate> {
    let kinds = if toffoli { 3 } else { 2 };
    (0..kinds, proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 3).prop_shuffle()).prop_map(|(k, qs)| match k {
        0 => Gate::cnot(qs[0], qs[1]),
        1 => Gate::one(GateKind::X, qs[0]),
        _ => Gate::toffoli(qs[0], qs[1], qs[2]),
    })
}

#[test]
fn x_on_toffoli_control_gives_both_residuals() {
    let c = circuit_of(3, &[Gate::one(GateKind::WAIT, 0), Gate::toffoli(0, 1, 2)]);
    let gc = wrap(&c);
    let fault = PauliString::single(3, 0, Pauli::X);
    let frames = propagate(&gc, &[(Location { step: 0, gate: 0 }, fault)]).unwrap();
    let xs: Vec<u128> = frames.iter().map(|f| f.x).collect();
    assert!(xs.contains(&0b001) && xs.contains(&0b101), "{xs:?}");
    // the oracle sees exactly one of them per value of the other control
    for input in 0..8u128 {
        let clean = run_classical(&c, input, &[]).unwrap();
        let faulty = run_classical(&c, input, &[(Location { step: 0, gate: 0 }, 1)]).unwrap();
        let want = if input >> 1 & 1 == 1 { 0b101 } else { 0b001 };
        assert_eq!(clean ^ faulty, want);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn classical_residual_is_among_engine_branches(
        gates in proptest::collection::vec(gate_strategy(5, true), 1..8),
        input in 0u128..32,
        at in 0usize..8,
        flip in 1u128..32,
    ) {
        let c = circuit_of(5, &gates);
        let step = at % c.steps.len();
        let loc = Location { step, gate: 0 };
        let support = c.steps[step][0].qubits.iter().fold(0u128, |m, &q| m | 1 << q);
        let fault = flip & support;
        prop_assume!(fault != 0);
        let clean = run_classical(&c, input, &[]).unwrap();
        let faulty = run_classical(&c, input, &[(loc, fault)]).unwrap();
        let gc = wrap(&c);
        let frames = propagate(&gc, &[(loc, PauliString::from_masks(5, fault, 0).unwrap())]).unwrap();
        prop_assert!(frames.iter().any(|f| f.x == clean ^ faulty), "residual {:b} not in {:?}", clean ^ faulty, frames);
    }

    #[test]
    fn clifford_propagation_matches_state_vector(
        gates in proptest::collection::vec(gate_strategy(4, false), 1..8),
        at in 0usize..8,
        x in 1u128..16,
        z in 0u128..16,
        h in 0usize..4,
    ) {
        let mut c = circuit_of(4, &gates);
        c.steps.insert(0, (0..4).map(|q| if q == h { Gate::one(GateKind::H, q) } else { Gate::wait(q) }).collect());
        let step = at % c.steps.len();
        let loc = Location { step, gate: 0 };
        let g = &c.steps[step][0];
        let mask = g.qubits.iter().fold(0u128, |m, &q| m | 1 << q);
        let p = PauliString::from_masks(4, x & mask, z & mask).unwrap();
        prop_assume!(!p.is_identity());
        let frames = propagate(&wrap(&c), &[(loc, p.clone())]).unwrap();
        prop_assert_eq!(frames.len(), 1);
        let f = frames[0];
        let mut input = StateVector::zero(4).unwrap();
        input.apply_h(1);
        input.apply_h(3);
        let clean = run(&c, &input, &[], 0).unwrap().state;
        let faulty = run(&c, &input, &[(loc, p)], 0).unwrap().state;
        let mut moved = clean.clone();
        moved.apply_pauli(f.x as u64, f.z as u64);
        prop_assert!((moved.inner(&faulty).norm() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn single_fault_sweep_on_exrecs_is_benign() {
    for kind in [GadgetKind::ExRecCNOT, GadgetKind::ExRecVN] {
        let gc = build_circuit(GadgetSpec::new(kind.clone())).unwrap();
        let judge = Judge::new(&gc);
        for iv in ftqec::fault::ideal::assignments(&gc) {
            let e = Engine::new(&gc, &iv);
            for idx in 0..e.n_locations() {
                for f in e.alphabet(idx) {
                    let out = e.run(Frame::ID, &[FaultEvent { location: idx, frame: f }]);
                    assert!(out.iter().all(|r| !judge.fails(r)), "{} location {idx}", kind.name());
                }
            }
        }
    }
}

fn data_block_between_ecs(gc: &GadgetCircuit) -> (Location, Vec<usize>) {
    // first step after the leading EC on the first block: its CNOT layer
    let step = gc.circuit.steps.iter().position(|s| s.iter().any(|g| g.kind == GateKind::CNOT && gc.inputs[0].qubits.contains(&g.qubits[0]) && gc.inputs[1].qubits.contains(&g.qubits[1]))).unwrap();
    (Location { step, gate: 0 }, gc.inputs[0].qubits.clone())
}

#[test]
fn judge_examples_on_the_cnot_exrec() {
    let gc = build_circuit(GadgetSpec::new(GadgetKind::ExRecCNOT)).unwrap();
    let (cnot_step, block) = data_block_between_ecs(&gc);
    let n = gc.circuit.n_qubits;
    let loc_on = |q: usize| {
        let gate = gc.circuit.steps[cnot_step.step].iter().position(|g| g.qubits.contains(&q)).unwrap();
        Location { step: cnot_step.step, gate }
    };
    let judge = Judge::new(&gc);
    let fails = |faults: &[(Location, PauliString)]| propagate(&gc, faults).unwrap().iter().any(|f| judge.fails(f));
    // two X on the same column (qubits (0,0) and (1,0))
    let col = [block[0], block[3]];
    let xs: Vec<(Location, PauliString)> = col.iter().map(|&q| (loc_on(q), PauliString::single(n, q, Pauli::X))).collect();
    assert!(fails(&xs), "same-column X pair should be malignant");
    // two X on the same row form a gauge operator
    let row = [block[0], block[1]];
    let xs: Vec<(Location, PauliString)> = row.iter().map(|&q| (loc_on(q), PauliString::single(n, q, Pauli::X))).collect();
    assert!(!fails(&xs), "row gauge pair should be benign");
}

#[test]
fn analyze_circuit_marks_constant_controls() {
    let c = circuit_of(3, &[Gate::one(GateKind::X, 0), Gate::toffoli(0, 1, 2)]);
    let iv = analyze_circuit(&c);
    let e = Engine::new(&wrap(&c), &iv);
    assert_eq!(e.n_locations(), c.location_count());
}
