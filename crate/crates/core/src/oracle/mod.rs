//! Exact simulation of circuits, used as ground truth for gadgets and for
//! the fault engine.
//!
//! Gates run in an order consistent with each qubit's gate sequence, with
//! preparations delayed as long as possible, and discarded qubits leave the
//! state right after their last gate. This keeps the number of live qubits
//! well under the step-by-step peak.

pub mod state;
pub mod suites;

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, GateKind, Location};
use crate::code::CodeDef;
use crate::error::Error;
use crate::pauli::{bits, PauliString};

pub use state::{StateVector, MAX_SLOTS};
pub use suites::{run_suite, CaseResult, SUITES};

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    /// State over `outputs`, output `i` in slot `i`, followed by discarded
    /// qubits that were still entangled with the rest.
    pub state: StateVector,
    pub outputs: Vec<usize>,
    pub entangled_discards: usize,
    /// Entangled discards that had to be measured to stay within budget.
    pub projected: usize,
    pub measurements: Vec<(usize, bool)>,
    pub peak_slots: usize,
}

fn order(c: &Circuit) -> Vec<(usize, usize)> {
    let flat: Vec<(usize, usize)> = c.steps.iter().enumerate().flat_map(|(s, g)| (0..g.len()).map(move |i| (s, i))).collect();
    let mut queue: Vec<Vec<usize>> = vec![Vec::new(); c.n_qubits];
    for (k, &(s, i)) in flat.iter().enumerate() {
        for &q in &c.steps[s][i].qubits {
            queue[q].push(k);
        }
    }
    let mut head = vec![0usize; c.n_qubits];
    let mut done = vec![false; flat.len()];
    let mut out = Vec::with_capacity(flat.len());
    let ready = |k: usize, head: &[usize]| {
        let (s, i) = flat[k];
        c.steps[s][i].qubits.iter().all(|&q| queue[q][head[q]] == k)
    };
    while out.len() < flat.len() {
        let mut pick = None;
        let mut prep = None;
        for k in 0..flat.len() {
            if done[k] || !ready(k, &head) {
                continue;
            }
            let (s, i) = flat[k];
            if c.steps[s][i].kind.is_prep() {
                prep.get_or_insert(k);
            } else {
                pick = Some(k);
                break;
            }
        }
        let k = pick.or(prep).expect("per-qubit order is acyclic");
        done[k] = true;
        let (s, i) = flat[k];
        for &q in &c.steps[s][i].qubits {
            head[q] += 1;
        }
        out.push(flat[k]);
    }
    out
}

fn at(slot: &[Option<usize>], q: usize) -> usize {
    slot[q].expect("gate on a live qubit")
}

fn prep_state(kind: GateKind) -> [Complex64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        GateKind::PREP0 => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        GateKind::PREPPLUS => [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
        _ => [Complex64::new(s, 0.0), Complex64::from_polar(s, std::f64::consts::FRAC_PI_4)],
    }
}

/// Runs `c` on `input`, a state over `c.inputs()` in order, inserting each
/// Pauli fault right after its location (before it, for a measurement).
pub fn run(c: &Circuit, input: &StateVector, faults: &[(Location, PauliString)], seed: u64) -> Result<RunOutput, Error> {
    let inputs = c.inputs();
    if input.n() != inputs.len() {
        return Err(Error::SizeMismatch { left: inputs.len(), right: input.n() });
    }
    let mut fault_at: BTreeMap<(usize, usize), Vec<&PauliString>> = BTreeMap::new();
    for (loc, p) in faults {
        let g = c.steps.get(loc.step).and_then(|gs| gs.get(loc.gate)).ok_or(Error::NoSuchLocation { step: loc.step, qubit: loc.gate })?;
        if p.support().iter().any(|q| !g.qubits.contains(q)) {
            return Err(Error::InvalidArgument(format!("fault {p} outside its location")));
        }
        fault_at.entry((loc.step, loc.gate)).or_default().push(p);
    }
    let mut last = vec![None; c.n_qubits];
    for (s, gates) in c.steps.iter().enumerate() {
        for (i, g) in gates.iter().enumerate() {
            for &q in &g.qubits {
                last[q] = Some((s, i));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sv = input.clone();
    let mut slot: Vec<Option<usize>> = vec![None; c.n_qubits];
    let mut junk: Vec<usize> = Vec::new();
    for (k, &q) in inputs.iter().enumerate() {
        slot[q] = Some(k);
    }
    let mut out = RunOutput { state: sv.clone(), outputs: c.outputs(), entangled_discards: 0, projected: 0, measurements: Vec::new(), peak_slots: sv.n() };
    let apply_fault = |sv: &mut StateVector, slot: &[Option<usize>], p: &PauliString| {
        let (mut x, mut z) = (0u64, 0u64);
        for q in bits(p.x_mask()) {
            x |= 1 << slot[q].expect("fault on a live qubit");
        }
        for q in bits(p.z_mask()) {
            z |= 1 << slot[q].expect("fault on a live qubit");
        }
        sv.apply_pauli(x, z);
    };
    let drop_slot = |slot: &mut [Option<usize>], q: usize| {
        let s = slot[q].take().unwrap();
        for x in slot.iter_mut().flatten() {
            if *x > s {
                *x -= 1;
            }
        }
        s
    };
    for (s, i) in order(c) {
        let g = &c.steps[s][i];
        if g.kind.is_meas() {
            for p in fault_at.get(&(s, i)).into_iter().flatten() {
                apply_fault(&mut sv, &slot, p);
            }
        }
        match g.kind {
            GateKind::WAIT => {}
            GateKind::X => sv.apply_x(at(&slot, g.qubits[0])),
            GateKind::Z => sv.apply_z(at(&slot, g.qubits[0])),
            GateKind::H => sv.apply_h(at(&slot, g.qubits[0])),
            GateKind::CNOT | GateKind::TOFFOLI | GateKind::MCX => {
                let (t, cs) = g.qubits.split_last().unwrap();
                let cs: Vec<usize> = cs.iter().map(|&q| at(&slot, q)).collect();
                sv.apply_mcx(&cs, at(&slot, *t));
            }
            GateKind::ZTOFFOLI => {
                let qs: Vec<usize> = g.qubits.iter().map(|&q| at(&slot, q)).collect();
                for &q in &qs {
                    sv.apply_h(q);
                }
                sv.apply_mcx(&qs[..2], qs[2]);
                for &q in &qs {
                    sv.apply_h(q);
                }
            }
            GateKind::CV | GateKind::CVDG => sv.apply_cv(at(&slot, g.qubits[0]), at(&slot, g.qubits[1]), g.kind == GateKind::CVDG),
            GateKind::PREP0 | GateKind::PREPPLUS | GateKind::PREPH => {
                if sv.n() == MAX_SLOTS {
                    if let Some(j) = junk.pop() {
                        let k = drop_slot(&mut slot, j);
                        sv.measure_z(k, &mut rng);
                        out.projected += 1;
                    }
                }
                slot[g.qubits[0]] = Some(sv.push_qubit(prep_state(g.kind))?);
                out.peak_slots = out.peak_slots.max(sv.n());
            }
            GateKind::MEASX | GateKind::MEASZ => {
                let q = g.qubits[0];
                if g.kind == GateKind::MEASX {
                    sv.apply_h(at(&slot, q));
                }
                let k = drop_slot(&mut slot, q);
                let r = sv.measure_z(k, &mut rng);
                out.measurements.push((q, r));
            }
        }
        if !g.kind.is_meas() {
            for p in fault_at.get(&(s, i)).into_iter().flatten() {
                apply_fault(&mut sv, &slot, p);
            }
            for &q in &g.qubits {
                if c.discard.contains(&q) && last[q] == Some((s, i)) {
                    if sv.remove_if_pure(at(&slot, q)) {
                        drop_slot(&mut slot, q);
                    } else {
                        junk.push(q);
                    }
                }
            }
        }
    }
    out.entangled_discards = junk.len() + out.projected;
    let order: Vec<usize> = out.outputs.iter().chain(&junk).map(|&q| slot[q].expect("live")).collect();
    out.state = sv.permute(&order)?;
    Ok(out)
}

/// Classical path for circuits of X-type gates on a basis input: bits of
/// `c.inputs()` in, bits of `c.outputs()` out. `None` if the circuit has a
/// gate that leaves the computational basis.
pub fn run_classical(c: &Circuit, input: u128, x_faults: &[(Location, u128)]) -> Option<u128> {
    let mut v = 0u128;
    for (k, q) in c.inputs().into_iter().enumerate() {
        v |= (input >> k & 1) << q;
    }
    for (s, gates) in c.steps.iter().enumerate() {
        for (i, g) in gates.iter().enumerate() {
            match g.kind {
                GateKind::WAIT | GateKind::Z | GateKind::MEASZ => {}
                GateKind::X => v ^= 1 << g.qubits[0],
                GateKind::PREP0 => v &= !(1 << g.qubits[0]),
                GateKind::CNOT | GateKind::TOFFOLI | GateKind::MCX => {
                    let (t, cs) = g.qubits.split_last().unwrap();
                    if cs.iter().all(|&q| v >> q & 1 == 1) {
                        v ^= 1 << t;
                    }
                }
                _ => return None,
            }
            for (loc, m) in x_faults {
                if loc.step == s && loc.gate == i {
                    v ^= m;
                }
            }
        }
    }
    Some(c.outputs().iter().enumerate().fold(0u128, |acc, (k, &q)| acc | ((v >> q & 1) << k)))
}

fn project_code(code: &CodeDef, sv: &mut StateVector, slots: &[usize]) {
    let half = Complex64::new(0.5, 0.0);
    for s in &code.stabilizers {
        let (x, z) = masks_on(s.x_mask(), s.z_mask(), slots);
        let mut t = sv.clone();
        t.apply_pauli(x, z);
        let amps: Vec<Complex64> = sv.amplitudes().iter().zip(t.amplitudes()).map(|(a, b)| (a + b) * half).collect();
        *sv = StateVector::from_amplitudes(sv.n(), amps).expect("same size");
    }
}

fn masks_on(x: u128, z: u128, slots: &[usize]) -> (u64, u64) {
    let map = |m: u128| bits(m).fold(0u64, |acc, q| acc | 1 << slots[q]);
    (map(x), map(z))
}

/// Logical state a|0_L> + b|1_L> of `code`, in the gauge reached by
/// projecting |0...0> (or |+...+> if that vanishes).
pub fn logical_state(code: &CodeDef, a: Complex64, b: Complex64) -> Result<StateVector, Error> {
    let slots: Vec<usize> = (0..code.n).collect();
    let mut zero = StateVector::zero(code.n)?;
    let (xl, zl) = masks_on(code.logical_z.x_mask(), code.logical_z.z_mask(), &slots);
    let try_from = |sv: StateVector| {
        let mut s = sv;
        let mut t = s.clone();
        t.apply_pauli(xl, zl);
        let amps: Vec<Complex64> = s.amplitudes().iter().zip(t.amplitudes()).map(|(p, q)| (p + q) * 0.5).collect();
        s = StateVector::from_amplitudes(code.n, amps).expect("same size");
        project_code(code, &mut s, &slots);
        s
    };
    let mut z0 = try_from(zero.clone());
    if z0.norm() < 1e-6 {
        for q in 0..code.n {
            zero.apply_h(q);
        }
        z0 = try_from(zero);
    }
    z0.normalize();
    let mut one = z0.clone();
    let (x, z) = masks_on(code.logical_x.x_mask(), code.logical_x.z_mask(), &slots);
    one.apply_pauli(x, z);
    let amps: Vec<Complex64> = z0.amplitudes().iter().zip(one.amplitudes()).map(|(p, q)| p * a + q * b).collect();
    let mut s = StateVector::from_amplitudes(code.n, amps)?;
    s.normalize();
    Ok(s)
}

/// Bloch vector of a|0> + b|1>.
pub fn bloch(a: Complex64, b: Complex64) -> [f64; 3] {
    let n = a.norm_sqr() + b.norm_sqr();
    let c = a.conj() * b * 2.0 / n;
    [c.re, c.im, (a.norm_sqr() - b.norm_sqr()) / n]
}

/// Fidelity of the code block on `slots` with the logical state of Bloch
/// vector `r`, for any gauge: <psi| P_code (I + r.sigma_L)/2 |psi>, all
/// other slots traced out.
pub fn logical_fidelity(code: &CodeDef, sv: &StateVector, slots: &[usize], r: [f64; 3]) -> Result<f64, Error> {
    if slots.len() != code.n {
        return Err(Error::SizeMismatch { left: code.n, right: slots.len() });
    }
    let mut p = sv.clone();
    project_code(code, &mut p, slots);
    let (xx, xz) = masks_on(code.logical_x.x_mask(), code.logical_x.z_mask(), slots);
    let (zx, zz) = masks_on(code.logical_z.x_mask(), code.logical_z.z_mask(), slots);
    // Y_L = i X_L Z_L
    let y = {
        let mut t = p.clone();
        t.apply_pauli(zx, zz);
        t.apply_pauli(xx, xz);
        p.inner(&t) * Complex64::new(0.0, 1.0)
    };
    let norm = p.inner(&p).re;
    let f = 0.5 * (norm + r[0] * p.expectation(xx, xz) + r[1] * y.re + r[2] * p.expectation(zx, zz));
    Ok(f.clamp(0.0, 1.0))
}

/// Fidelity after one ideal round of syndrome decoding and correction.
pub fn decoded_fidelity(code: &CodeDef, sv: &StateVector, slots: &[usize], r: [f64; 3]) -> Result<f64, Error> {
    let mut total = 0.0;
    for (x, z) in code.recovery_table() {
        let (xm, zm) = masks_on(x, z, slots);
        let mut t = sv.clone();
        t.apply_pauli(xm, zm);
        total += logical_fidelity(code, &t, slots, r)?;
    }
    Ok(total.min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn logical_states_and_gauge_invariance() {
        let bs = CodeDef::bacon_shor();
        let slots: Vec<usize> = (0..9).collect();
        let zero = logical_state(&bs, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((logical_fidelity(&bs, &zero, &slots, [0.0, 0.0, 1.0]).unwrap() - 1.0).abs() < 1e-9);
        assert!(logical_fidelity(&bs, &zero, &slots, [0.0, 0.0, -1.0]).unwrap() < 1e-9);
        let mut g = zero.clone();
        g.apply_pauli(0b11, 0);
        assert!((logical_fidelity(&bs, &g, &slots, [0.0, 0.0, 1.0]).unwrap() - 1.0).abs() < 1e-9);
        let (a, b) = (c(0.8, 0.0), c(0.36, 0.48));
        let psi = logical_state(&bs, a, b).unwrap();
        assert!((logical_fidelity(&bs, &psi, &slots, bloch(a, b)).unwrap() - 1.0).abs() < 1e-9);
        let mut e = psi.clone();
        e.apply_pauli(1 << 4, 0);
        assert!(logical_fidelity(&bs, &e, &slots, bloch(a, b)).unwrap() < 1e-9);
        assert!((decoded_fidelity(&bs, &e, &slots, bloch(a, b)).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn builder_circuit_runs_and_drops_ancilla() {
        let mut b = CircuitBuilder::new();
        let d = b.inputs(crate::circuit::Role::Data, 2);
        let a = b.fresh(GateKind::PREP0, crate::circuit::Role::Ancilla);
        b.discard(a);
        b.push(crate::circuit::Gate::cnot(d[0], a));
        b.push(crate::circuit::Gate::cnot(d[1], a));
        let circ = b.build();
        let input = StateVector::basis(2, 0b10).unwrap();
        let out = run(&circ, &input, &[], 0).unwrap();
        assert_eq!(out.entangled_discards, 0);
        let mut sup = StateVector::zero(2).unwrap();
        sup.apply_h(0);
        assert_eq!(run(&circ, &sup, &[], 0).unwrap().entangled_discards, 1);
        assert!((out.state.inner(&input).norm() - 1.0).abs() < 1e-9);
        assert_eq!(run_classical(&circ, 0b11, &[]), Some(0b11));
    }
}
