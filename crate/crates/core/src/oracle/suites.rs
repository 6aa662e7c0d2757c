//! Verification suites run against the exact simulator.
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{decoded_fidelity, logical_fidelity, logical_state, run, run_classical, StateVector};
use crate::circuit::Location;
use crate::code::CodeDef;
use crate::error::Error;
use crate::fault::ideal::assignments;
use crate::fault::{Engine, FaultEvent, Frame, Judge};
use crate::gadgets::{build_circuit, GadgetCircuit, GadgetKind, GadgetSpec};
use crate::pauli::{Pauli, PauliString};

pub const SUITES: &[&str] = &["majority", "parity", "cooling", "cat", "steane", "ec", "prep", "agreement"];

const TOL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub suite: String,
    pub case: String,
    pub pass: bool,
    pub detail: String,
}

struct Cases {
    suite: &'static str,
    out: Vec<CaseResult>,
}

impl Cases {
    fn push(&mut self, case: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.out.push(CaseResult { suite: self.suite.into(), case: case.into(), pass, detail: detail.into() });
    }
}

/// Runs one suite, or every suite for `"oracle"` / `"all"`.
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<CaseResult>, Error> {
    if name == "oracle" || name == "all" {
        let mut all = Vec::new();
        for s in SUITES {
            all.extend(run_suite(s, seed)?);
        }
        return Ok(all);
    }
    let suite = SUITES.iter().copied().find(|s| *s == name).ok_or_else(|| Error::InvalidArgument(format!("unknown suite {name}")))?;
    let mut c = Cases { suite, out: Vec::new() };
    match suite {
        "majority" => majority(&mut c)?,
        "parity" => parity(&mut c)?,
        "cooling" => cooling(&mut c)?,
        "cat" => cat(&mut c)?,
        "steane" => steane(&mut c)?,
        "ec" => ec(&mut c, seed)?,
        "prep" => prep(&mut c)?,
        _ => agreement(&mut c, seed, 500)?,
    }
    Ok(c.out)
}

fn gadget(kind: GadgetKind) -> Result<GadgetCircuit, Error> {
    build_circuit(GadgetSpec::new(kind))
}

fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense run on a basis input; returns the dominant output basis string and
/// its probability.
fn dense_basis(g: &GadgetCircuit, input: u64) -> Result<(u64, f64, usize), Error> {
    let sv = StateVector::basis(g.circuit.inputs().len(), input)?;
    let out = run(&g.circuit, &sv, &[], 0)?;
    let (b, p) = out.state.dominant();
    Ok((b, p, out.entangled_discards))
}

fn positions(list: &[usize], qs: &[usize]) -> Vec<usize> {
    qs.iter().map(|q| list.iter().position(|x| x == q).expect("qubit in list")).collect()
}

fn majority(c: &mut Cases) -> Result<(), Error> {
    for (kind, n) in [(GadgetKind::MX, 3usize), (GadgetKind::MN(5), 5), (GadgetKind::MN(7), 7)] {
        let g = gadget(kind.clone())?;
        let mut bad = 0;
        for input in 0..1u64 << n {
            let want = if 2 * input.count_ones() as usize > n { (1u64 << n) - 1 } else { 0 };
            let cl = run_classical(&g.circuit, input as u128, &[]).map(|v| v as u64);
            let mut ok = cl == Some(want);
            if g.circuit.n_qubits <= 20 {
                let (b, p, _) = dense_basis(&g, input)?;
                ok &= b == want && (p - 1.0).abs() < TOL;
            }
            bad += usize::from(!ok);
        }
        c.push(format!("{} truth table", kind.name()), bad == 0, format!("{bad} of {} inputs wrong", 1 << n));
    }
    let g = gadget(GadgetKind::MX)?;
    let (a, b) = (cplx(0.6, 0.0), cplx(0.0, 0.8));
    let mut target = vec![Complex64::new(0.0, 0.0); 8];
    target[0] = a;
    target[7] = b;
    let target = StateVector::from_amplitudes(3, target)?;
    for (label, lo, hi) in [("a|000>+b|111>", 0usize, 7usize), ("a|010>+b|101>", 2, 5)] {
        let mut amps = vec![Complex64::new(0.0, 0.0); 8];
        amps[lo] = a;
        amps[hi] = b;
        let out = run(&g.circuit, &StateVector::from_amplitudes(3, amps)?, &[], 0)?;
        let f = out.state.overlap_on(&[0, 1, 2], &target);
        c.push(format!("M_X on {label}"), (f - 1.0).abs() < TOL && out.entangled_discards == 0, format!("fidelity {f:.12}, entangled discards {}", out.entangled_discards));
    }
    // Phase voting: the same superposition in the Hadamard basis.
    let g = gadget(GadgetKind::MZ)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[2] = a;
    amps[5] = b;
    let mut input = StateVector::from_amplitudes(3, amps)?;
    let mut want = target.clone();
    for q in 0..3 {
        input.apply_h(q);
        want.apply_h(q);
    }
    let out = run(&g.circuit, &input, &[], 0)?;
    let f = out.state.overlap_on(&[0, 1, 2], &want);
    c.push("M_Z on phase-flipped superposition", (f - 1.0).abs() < TOL && out.entangled_discards == 0, format!("fidelity {f:.12}"));
    Ok(())
}

fn parity(c: &mut Cases) -> Result<(), Error> {
    for n in [2usize, 3, 4] {
        let g = gadget(GadgetKind::ParityVoter(n))?;
        let mut bad = 0;
        for input in 0..1u64 << n {
            let want = if input.count_ones() % 2 == 1 { (1u64 << n) - 1 } else { 0 };
            let (b, p, _) = dense_basis(&g, input)?;
            let cl = run_classical(&g.circuit, input as u128, &[]);
            bad += usize::from(b != want || (p - 1.0).abs() > TOL || cl != Some(want as u128));
        }
        c.push(format!("parity voter n={n}"), bad == 0, format!("{bad} of {} inputs wrong", 1 << n));
    }
    Ok(())
}

fn cooling(c: &mut Cases) -> Result<(), Error> {
    for j in [1usize, 2] {
        let g = gadget(GadgetKind::CoolingTree(j))?;
        let n = 3usize.pow(j as u32);
        let mut bad = 0;
        for input in 0..1u64 << n {
            // Recursive majority of the leaves.
            let mut level: Vec<u64> = (0..n).map(|i| input >> i & 1).collect();
            while level.len() > 1 {
                level = level.chunks(3).map(|t| u64::from(t.iter().sum::<u64>() >= 2)).collect();
            }
            let (b, p, _) = dense_basis(&g, input)?;
            let cl = run_classical(&g.circuit, input as u128, &[]).map(|v| v as u64);
            bad += usize::from(b != level[0] || (p - 1.0).abs() > TOL || cl != Some(level[0]));
        }
        c.push(format!("cooling tree j={j}"), bad == 0, format!("{bad} of {} inputs wrong", 1 << n));
    }
    Ok(())
}

fn cat_state(n: usize) -> Result<StateVector, Error> {
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
    amps[0] = cplx(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[(1 << n) - 1] = amps[0];
    StateVector::from_amplitudes(n, amps)
}

/// Weight of `sv` inside the span of cat states with at most one bit flip,
/// either phase.
fn near_cat_weight(sv: &StateVector, slots: &[usize]) -> Result<f64, Error> {
    let n = slots.len();
    let cat = cat_state(n)?;
    let mut w = 0.0;
    for flip in 0..=n {
        for phase in [false, true] {
            let mut t = cat.clone();
            if flip < n {
                t.apply_x(flip);
            }
            if phase {
                t.apply_z(0);
            }
            w += sv.overlap_on(slots, &t);
        }
    }
    Ok(w)
}

fn all_single_faults(g: &GadgetCircuit) -> Vec<(Location, PauliString)> {
    let n = g.circuit.n_qubits;
    let mut out = Vec::new();
    for loc in g.circuit.locations() {
        let qs = &g.circuit.gate(loc).qubits;
        for code in 1..4usize.pow(qs.len() as u32) {
            let mut p = PauliString::identity(n);
            let mut k = code;
            for &q in qs {
                p.set(q, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][k % 4]);
                k /= 4;
            }
            out.push((loc, p));
        }
    }
    out
}

fn cat(c: &mut Cases) -> Result<(), Error> {
    let g = gadget(GadgetKind::CatVerify(4))?;
    let empty = StateVector::zero(0)?;
    let outputs = g.circuit.outputs();
    let slots = positions(&outputs, &g.outputs[0].qubits);
    let out = run(&g.circuit, &empty, &[], 0)?;
    let cat = cat_state(4)?;
    let f = out.state.overlap_on(&slots, &cat);
    c.push("fault-free cat", (f - 1.0).abs() < TOL && slots == [0, 1, 2, 3], format!("fidelity {f:.12}"));
    let faults = all_single_faults(&g);
    let mut bad = 0;
    let mut worst = 1.0f64;
    for (i, f) in faults.iter().enumerate() {
        let out = run(&g.circuit, &empty, std::slice::from_ref(f), i as u64)?;
        let w = near_cat_weight(&out.state, &slots)?;
        worst = worst.min(w);
        bad += usize::from((w - 1.0).abs() > 1e-8);
    }
    c.push("every single fault leaves a correctable cat", bad == 0, format!("{} faults, {bad} bad, worst weight {worst:.12}", faults.len()));
    Ok(())
}

fn steane(c: &mut Cases) -> Result<(), Error> {
    let m7 = gadget(GadgetKind::MN(7))?;
    let input = 0b0000111u128;
    let out = run_classical(&m7.circuit, input, &[]);
    c.push("M(7) on 1110000", out == Some(0), format!("{out:?}"));
    let code = CodeDef::steane();
    let g = gadget(GadgetKind::SteaneN)?;
    let z_checks: Vec<u128> = code.stabilizers.iter().map(|s| s.z_mask()).filter(|&m| m != 0).collect();
    let zl = code.logical_z.z_mask();
    let mut words = 0;
    let mut bad = 0;
    for x in 0..128u128 {
        if z_checks.iter().any(|m| (x & m).count_ones() % 2 == 1) {
            continue;
        }
        words += 1;
        let bit = (x & zl).count_ones() % 2 == 1;
        let want = if bit { 0x7f } else { 0 };
        for e in std::iter::once(0u128).chain((0..7).map(|i| 1u128 << i)) {
            let got = run_classical(&g.circuit, x ^ e, &[]);
            bad += usize::from(got != Some(want));
        }
    }
    c.push("SteaneN on codewords with at most one flip", bad == 0 && words == 16, format!("{words} codewords, {bad} wrong"));
    Ok(())
}

const GENERIC: [f64; 3] = [0.577_350_269_189_625_8, 0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

fn generic_state(code: &CodeDef) -> Result<StateVector, Error> {
    // Bloch vector (1,1,1)/sqrt(3)
    let theta = (GENERIC[2]).acos();
    let a = cplx((theta / 2.0).cos(), 0.0);
    let b = Complex64::from_polar((theta / 2.0).sin(), std::f64::consts::FRAC_PI_4);
    logical_state(code, a, b)
}

fn ec(c: &mut Cases, seed: u64) -> Result<(), Error> {
    let code = CodeDef::bacon_shor();
    let g = gadget(GadgetKind::ECFull)?;
    let psi = generic_state(&code)?;
    let outputs = g.circuit.outputs();
    let slots = positions(&outputs, &g.outputs[0].qubits);
    let in_slots = positions(&g.circuit.inputs(), &g.inputs[0].qubits);
    let case = |x: u64, z: u64, seed: u64| -> Result<(f64, usize, usize), Error> {
        let mut s = psi.clone();
        let map = |m: u64| (0..9).filter(|q| m >> q & 1 == 1).fold(0u64, |a, q| a | 1 << in_slots[q]);
        s.apply_pauli(map(x), map(z));
        let out = run(&g.circuit, &s, &[], seed)?;
        Ok((logical_fidelity(&code, &out.state, &slots, GENERIC)?, out.entangled_discards, out.peak_slots))
    };
    let (f, _, peak) = case(0, 0, seed)?;
    c.push("clean codeword", (f - 1.0).abs() < TOL, format!("fidelity {f:.12}, peak {peak} qubits"));
    let mut bad = Vec::new();
    for q in 0..9 {
        for (p, x, z) in [("X", 1u64 << q, 0u64), ("Y", 1 << q, 1 << q), ("Z", 0, 1 << q)] {
            let (f, _, _) = case(x, z, seed)?;
            if (f - 1.0).abs() > TOL {
                bad.push(format!("{p}{q}:{f:.6}"));
            }
        }
    }
    c.push("all 27 single data Paulis corrected", bad.is_empty(), bad.join(" "));
    let mut bad = Vec::new();
    for r in 0..3 {
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let row = (1u64 << (3 * r + i)) | (1 << (3 * r + j));
            let col = (1u64 << (3 * i + r)) | (1 << (3 * j + r));
            for (label, x, z) in [("XX row", row, 0u64), ("ZZ column", 0, col)] {
                let (f, _, _) = case(x, z, seed)?;
                if (f - 1.0).abs() > TOL {
                    bad.push(format!("{label} {r}/{i}{j}:{f:.6}"));
                }
            }
        }
    }
    c.push("gauge pairs pass unchanged", bad.is_empty(), bad.join(" "));
    Ok(())
}

fn prep(c: &mut Cases) -> Result<(), Error> {
    let code = CodeDef::bacon_shor();
    for (kind, r, label) in [(GadgetKind::PrepZeroL, [0.0, 0.0, 1.0], "|0_L>"), (GadgetKind::PrepPlusL, [1.0, 0.0, 0.0], "|+_L>")] {
        let g = gadget(kind)?;
        let out = run(&g.circuit, &StateVector::zero(0)?, &[], 0)?;
        let slots = positions(&out.outputs, &g.outputs[0].qubits);
        let f = logical_fidelity(&code, &out.state, &slots, r)?;
        c.push(format!("prepare {label}"), (f - 1.0).abs() < TOL, format!("fidelity {f:.12}"));
    }
    // Row-wise phase voting tags the |1...1> branch with a sign that depends
    // on each row's syndrome, so the encoded coherence shrinks by (-1/2)^3.
    let g = gadget(GadgetKind::Encoder)?;
    let out = run(&g.circuit, &StateVector::zero(0)?, &[], 0)?;
    let slots = positions(&out.outputs, &g.outputs[0].qubits);
    let axis = |r: [f64; 3]| logical_fidelity(&code, &out.state, &slots, r).map(|f| 2.0 * f - 1.0);
    let (x, y, z) = (axis([1.0, 0.0, 0.0])?, axis([0.0, 1.0, 0.0])?, axis([0.0, 0.0, 1.0])?);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ok = z.abs() < TOL && (x + h / 8.0).abs() < TOL && (y + h / 8.0).abs() < TOL;
    c.push("encoder on |H>: populations kept, coherence scaled by -1/8", ok, format!("logical Bloch ({x:.6}, {y:.6}, {z:.6})"));
    Ok(())
}

/// Random single faults on the X stage of EC, with an optional incoming data
/// X error: the oracle's decoded verdict must match the fault engine's.
/// Returns the number of failing scenarios and the mismatches.
pub fn agreement_cases(seed: u64, count: usize) -> Result<(usize, Vec<String>), Error> {
    let mut failing = 0;
    let code = CodeDef::bacon_shor();
    let g = gadget(GadgetKind::ECX)?;
    let zero = logical_state(&code, cplx(1.0, 0.0), cplx(0.0, 0.0))?;
    let in_slots = positions(&g.circuit.inputs(), &g.inputs[0].qubits);
    let out_slots = positions(&g.circuit.outputs(), &g.outputs[0].qubits);
    let judge = Judge::new(&g);
    let engines: Vec<Engine> = assignments(&g).iter().map(|iv| Engine::new(&g, iv)).collect();
    let faults = all_single_faults(&g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = Vec::new();
    for case in 0..count {
        let (loc, p) = faults[rng.gen_range(0..faults.len())].clone();
        let incoming = rng.gen_range(0..10usize);
        let engine_fail = engines.iter().any(|e| {
            let idx = e.location_index(loc).expect("location");
            let mut init = Frame::ID;
            if incoming < 9 {
                init.x |= 1 << g.inputs[0].qubits[incoming];
            }
            e.run(init, &[FaultEvent { location: idx, frame: Frame::from_pauli(&p) }]).iter().any(|f| judge.fails(f))
        });
        let mut s = zero.clone();
        if incoming < 9 {
            s.apply_x(in_slots[incoming]);
        }
        let out = run(&g.circuit, &s, &[(loc, p.clone())], seed ^ case as u64)?;
        let f = decoded_fidelity(&code, &out.state, &out_slots, [0.0, 0.0, 1.0])?;
        let oracle_fail = f < 1.0 - 1e-6;
        failing += usize::from(oracle_fail && engine_fail);
        if oracle_fail != engine_fail {
            mismatches.push(format!("{loc:?} {p} incoming {incoming}: oracle {f:.6}, engine fail {engine_fail}"));
        }
    }
    Ok((failing, mismatches))
}

fn agreement(c: &mut Cases, seed: u64, count: usize) -> Result<(), Error> {
    let (failing, bad) = agreement_cases(seed, count)?;
    let mut detail = format!("{failing} logical failures seen by both, {} mismatches", bad.len());
    for b in bad.iter().take(5) {
        detail.push_str("; ");
        detail.push_str(b);
    }
    c.push(format!("{count} random single-fault scenarios on EC_X"), bad.is_empty(), detail);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truth_table_suites_pass() {
        for s in ["majority", "parity", "cooling", "steane"] {
            for r in run_suite(s, 0).unwrap() {
                assert!(r.pass, "{} / {}: {}", r.suite, r.case, r.detail);
            }
        }
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("nope", 0).is_err());
    }
}
