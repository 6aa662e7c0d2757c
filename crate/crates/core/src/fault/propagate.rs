//! Pauli frame propagation with classically controlled non-Clifford gates.

use serde::{Deserialize, Serialize};

use crate::circuit::{GateKind, Location};
use crate::error::Error;
use crate::gadgets::GadgetCircuit;
use crate::pauli::{Pauli, PauliString};

use super::ideal::IdealValues;

/// Phase-free Pauli frame over the whole register. `v` marks qubits that
/// also carry a pending square root of X, left by a controlled-V whose
/// control was flipped; it is resolved into I or X when anything other
/// than another controlled-V target acts on the qubit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Frame {
    pub x: u128,
    pub z: u128,
    #[serde(default)]
    pub v: u128,
}

impl Frame {
    pub const ID: Frame = Frame { x: 0, z: 0, v: 0 };

    pub fn from_pauli(p: &PauliString) -> Self {
        Frame { x: p.x_mask(), z: p.z_mask(), v: 0 }
    }

    pub fn single(q: usize, p: Pauli) -> Self {
        let (x, z) = p.bits();
        Frame { x: (x as u128) << q, z: (z as u128) << q, v: 0 }
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0 && self.v == 0
    }

    fn xb(&self, q: usize) -> bool {
        self.x >> q & 1 == 1
    }

    fn zb(&self, q: usize) -> bool {
        self.z >> q & 1 == 1
    }

    fn flip_x(&mut self, q: usize, on: bool) {
        self.x ^= (on as u128) << q;
    }

    fn flip_z(&mut self, q: usize, on: bool) {
        self.z ^= (on as u128) << q;
    }
}

impl std::ops::BitXor for Frame {
    type Output = Frame;
    fn bitxor(self, o: Frame) -> Frame {
        Frame { x: self.x ^ o.x, z: self.z ^ o.z, v: self.v ^ o.v }
    }
}

/// A Pauli fault attached to a location; applied after the gate, or before
/// it for measurements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FaultEvent {
    pub location: usize,
    pub frame: Frame,
}

#[derive(Clone, Debug)]
pub(crate) struct FlatGate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub controls: Vec<Option<bool>>,
}

impl FlatGate {
    pub fn nonlinear(&self) -> bool {
        matches!(self.kind, GateKind::TOFFOLI | GateKind::ZTOFFOLI | GateKind::MCX | GateKind::CV | GateKind::CVDG)
    }
}

/// Operand bits of a frame at a non-Clifford gate: x bits low, z bits high.
pub(crate) type Touch = (u32, u32);

/// Propagation engine for one gadget under one assignment of the logical
/// control values.
#[derive(Clone, Debug)]
pub struct Engine {
    pub(crate) gates: Vec<FlatGate>,
    pub(crate) locations: Vec<Location>,
    pub n_qubits: usize,
}

impl Engine {
    pub fn new(gc: &GadgetCircuit, iv: &IdealValues) -> Self {
        let mut gates = Vec::new();
        let mut locations = Vec::new();
        for (s, step) in gc.circuit.steps.iter().enumerate() {
            for (gi, g) in step.iter().enumerate() {
                let idx = gates.len();
                gates.push(FlatGate { kind: g.kind, qubits: g.qubits.clone(), controls: iv.controls.get(idx).cloned().unwrap_or_default() });
                locations.push(Location { step: s, gate: gi });
            }
        }
        Engine { gates, locations, n_qubits: gc.circuit.n_qubits }
    }

    pub fn n_locations(&self) -> usize {
        self.gates.len()
    }

    pub fn location(&self, idx: usize) -> Location {
        self.locations[idx]
    }

    pub fn location_index(&self, loc: Location) -> Option<usize> {
        self.locations.iter().position(|&l| l == loc)
    }

    /// Nontrivial fault frames available at a location.
    pub fn alphabet(&self, idx: usize) -> Vec<Frame> {
        let g = &self.gates[idx];
        let q0 = g.qubits[0];
        match g.kind {
            GateKind::PREP0 | GateKind::MEASZ => vec![Frame::single(q0, Pauli::X)],
            GateKind::PREPPLUS | GateKind::MEASX => vec![Frame::single(q0, Pauli::Z)],
            GateKind::PREPH => vec![Frame::single(q0, Pauli::Y)],
            _ => {
                let k = g.qubits.len();
                (1..1u32 << (2 * k))
                    .map(|code| {
                        let mut f = Frame::ID;
                        for (i, &q) in g.qubits.iter().enumerate() {
                            let p = code >> (2 * i) & 3;
                            f.flip_x(q, p & 1 == 1);
                            f.flip_z(q, p & 2 == 2);
                        }
                        f
                    })
                    .collect()
            }
        }
    }

    // x bits low, z bits from 8, pending-V bits from 16. A pending V that
    // the gate resolves may become an X, so it also counts as an x bit.
    fn touch_bits(&self, g: &FlatGate, f: &Frame) -> u32 {
        let mut b = 0u32;
        let cv = matches!(g.kind, GateKind::CV | GateKind::CVDG);
        for (i, &q) in g.qubits.iter().enumerate() {
            let vb = f.v >> q & 1 == 1;
            let resolved = vb && !(cv && i == 1);
            b |= ((f.xb(q) || resolved) as u32) << i;
            b |= (f.zb(q) as u32) << (8 + i);
            b |= (vb as u32) << (16 + i);
        }
        b
    }

    /// Replaces a pending V on any qubit in `mask` by the two branches I, X.
    fn resolve(frames: &mut Vec<Frame>, mask: u128) {
        if !frames.iter().any(|f| f.v & mask != 0) {
            return;
        }
        let mut out = Vec::with_capacity(frames.len() * 2);
        for f in frames.iter() {
            let hit = f.v & mask;
            let mut base = *f;
            base.v &= !hit;
            let bits: Vec<usize> = super::super::pauli::bits(hit).collect();
            for m in 0..1u32 << bits.len() {
                let mut h = base;
                for (j, &q) in bits.iter().enumerate() {
                    h.flip_x(q, m >> j & 1 == 1);
                }
                out.push(h);
            }
        }
        out.sort_unstable();
        out.dedup();
        *frames = out;
    }

    /// Applies gate `idx` to every frame in `frames`, branching where a
    /// control value is unknown or a square-root gate is hit on its control.
    pub(crate) fn apply(&self, idx: usize, frames: &mut Vec<Frame>) {
        let g = &self.gates[idx];
        let q = &g.qubits;
        let known_cv = matches!(g.kind, GateKind::CV | GateKind::CVDG) && g.controls.first().copied().flatten().is_some();
        match g.kind {
            GateKind::WAIT => {}
            GateKind::PREP0 | GateKind::PREPPLUS | GateKind::PREPH => {}
            _ => {
                let mask = if known_cv { 1u128 << q[0] } else { q.iter().fold(0u128, |m, &x| m | 1u128 << x) };
                Self::resolve(frames, mask);
            }
        }
        match g.kind {
            GateKind::WAIT | GateKind::X | GateKind::Z | GateKind::MEASX | GateKind::MEASZ => {}
            GateKind::H => {
                for f in frames.iter_mut() {
                    let (xb, zb) = (f.xb(q[0]), f.zb(q[0]));
                    f.flip_x(q[0], xb ^ zb);
                    f.flip_z(q[0], xb ^ zb);
                }
            }
            GateKind::PREP0 | GateKind::PREPPLUS | GateKind::PREPH => {
                let m = !(1u128 << q[0]);
                for f in frames.iter_mut() {
                    f.x &= m;
                    f.z &= m;
                    f.v &= m;
                }
            }
            GateKind::CNOT => {
                for f in frames.iter_mut() {
                    let xc = f.xb(q[0]);
                    let zt = f.zb(q[1]);
                    f.flip_x(q[1], xc);
                    f.flip_z(q[0], zt);
                }
            }
            GateKind::TOFFOLI | GateKind::MCX | GateKind::ZTOFFOLI => self.apply_controlled(g, frames),
            GateKind::CV | GateKind::CVDG => {
                let (c, t) = (q[0], q[1]);
                let v = g.controls.first().copied().flatten();
                let mut out = Vec::with_capacity(frames.len());
                for f in frames.iter() {
                    // Z on the target becomes Y when the control is set.
                    let mut variants: Vec<Frame> = Vec::new();
                    let zt = f.zb(t);
                    let xc = f.xb(c);
                    match v {
                        Some(v) => {
                            // Conjugate by the actual power, then add the
                            // excess power over the ideal one to the pending V.
                            let mut g0 = *f;
                            g0.flip_x(t, zt && (v ^ xc));
                            if xc {
                                let up = (g.kind == GateKind::CV) != v;
                                let d = if up { 1 } else { 3 };
                                let s = (g0.v >> t & 1) as u32 + d;
                                g0.flip_x(t, s % 4 >= 2);
                                g0.v = (g0.v & !(1u128 << t)) | (((s & 1) as u128) << t);
                            }
                            out.push(g0);
                            continue;
                        }
                        None => {
                            let mut a = *f;
                            let mut b = *f;
                            b.flip_x(t, zt);
                            a.flip_z(c, zt);
                            b.flip_z(c, zt);
                            variants.push(*f);
                            variants.push(a);
                            variants.push(b);
                            if zt {
                                let mut d = *f;
                                d.flip_x(t, true);
                                variants.push(d);
                            }
                        }
                    }
                    for mut h in variants {
                        if xc {
                            out.push(h);
                            h.flip_x(t, true);
                            out.push(h);
                        } else {
                            out.push(h);
                        }
                    }
                }
                out.sort_unstable();
                out.dedup();
                *frames = out;
            }
        }
    }

    fn apply_controlled(&self, g: &FlatGate, frames: &mut Vec<Frame>) {
        let dual = g.kind == GateKind::ZTOFFOLI;
        let k = g.qubits.len() - 1;
        let ctrls = &g.qubits[..k];
        let t = g.qubits[k];
        // "flip" bits move a control's value, "kick" bits live on the target
        // and pick up the controls' phase.
        let flip = |f: &Frame, q: usize| if dual { f.zb(q) } else { f.xb(q) };
        let kick = |f: &Frame, q: usize| if dual { f.xb(q) } else { f.zb(q) };
        let toggle_t = |f: &mut Frame, on: bool| if dual { f.flip_z(t, on) } else { f.flip_x(t, on) };
        let toggle_c = |f: &mut Frame, q: usize, on: bool| if dual { f.flip_x(q, on) } else { f.flip_z(q, on) };
        let unknown: Vec<usize> = (0..k).filter(|&i| g.controls.get(i).copied().flatten().is_none()).collect();
        let mut out = Vec::with_capacity(frames.len());
        for f in frames.iter() {
            let fl: Vec<bool> = ctrls.iter().map(|&c| flip(f, c)).collect();
            let kt = kick(f, t);
            if unknown.is_empty() && !kt && fl.iter().all(|b| !b) {
                out.push(*f);
                continue;
            }
            for assign in 0..1usize << unknown.len() {
                let mut v: Vec<bool> = (0..k).map(|i| g.controls.get(i).copied().flatten().unwrap_or(false)).collect();
                for (j, &i) in unknown.iter().enumerate() {
                    v[i] = assign >> j & 1 == 1;
                }
                let ideal = v.iter().all(|&b| b);
                let actual = v.iter().zip(&fl).all(|(&a, &b)| a ^ b);
                let mut h = *f;
                toggle_t(&mut h, ideal ^ actual);
                if kt {
                    for i in 0..k {
                        let others = (0..k).filter(|&j| j != i).all(|j| v[j] ^ fl[j]);
                        toggle_c(&mut h, ctrls[i], others);
                    }
                }
                out.push(h);
            }
        }
        if !unknown.is_empty() || out.len() != frames.len() {
            out.sort_unstable();
            out.dedup();
        }
        *frames = out;
    }

    /// Runs the circuit from the start with `initial` frames and faults;
    /// returns the distinct final frames.
    pub fn run(&self, initial: Frame, faults: &[FaultEvent]) -> Vec<Frame> {
        self.run_inner(initial, faults, None)
    }

    /// Like [`Engine::run`] for a single fault, also returning the operand
    /// bits seen at every non-Clifford gate.
    pub(crate) fn run_traced(&self, initial: Frame, faults: &[FaultEvent]) -> (Vec<Frame>, Vec<Touch>) {
        let mut trace = Vec::new();
        let frames = self.run_inner(initial, faults, Some(&mut trace));
        (frames, trace)
    }

    fn run_inner(&self, initial: Frame, faults: &[FaultEvent], mut trace: Option<&mut Vec<Touch>>) -> Vec<Frame> {
        let mut sorted: Vec<FaultEvent> = faults.to_vec();
        sorted.sort_by_key(|f| f.location);
        let start = if initial.is_identity() { sorted.first().map_or(self.gates.len(), |f| f.location) } else { 0 };
        let mut frames = vec![initial];
        let mut next = 0;
        for idx in start..self.gates.len() {
            let g = &self.gates[idx];
            let is_meas = matches!(g.kind, GateKind::MEASX | GateKind::MEASZ);
            if is_meas {
                while next < sorted.len() && sorted[next].location == idx {
                    for f in frames.iter_mut() {
                        *f = *f ^ sorted[next].frame;
                    }
                    next += 1;
                }
            }
            if let Some(tr) = trace.as_deref_mut() {
                let pending = g.kind != GateKind::WAIT && g.qubits.iter().any(|&q| frames.iter().any(|f| f.v >> q & 1 == 1));
                if g.nonlinear() || pending {
                    let bits = frames.iter().fold(0u32, |acc, f| acc | self.touch_bits(g, f));
                    if bits != 0 {
                        tr.push((idx as u32, bits));
                    }
                }
            }
            self.apply(idx, &mut frames);
            while next < sorted.len() && sorted[next].location == idx {
                for f in frames.iter_mut() {
                    *f = *f ^ sorted[next].frame;
                }
                next += 1;
            }
        }
        Self::resolve(&mut frames, u128::MAX);
        frames.sort_unstable();
        frames.dedup();
        frames
    }

    /// Whether two single-fault traces can be combined by XOR. Requires that
    /// no non-Clifford gate sees both faults in a way that interacts.
    pub(crate) fn traces_compatible(&self, a: &[Touch], b: &[Touch]) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let g = &self.gates[a[i].0 as usize];
                    if !Self::cross_free(g, a[i].1, b[j].1) {
                        return false;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        true
    }

    fn cross_free(g: &FlatGate, a: u32, b: u32) -> bool {
        // Two pending V on one qubit multiply to X.
        if (a & b) >> 16 != 0 {
            return false;
        }
        if !g.nonlinear() {
            return true;
        }
        if g.controls.iter().any(|v| v.is_none()) {
            return false;
        }
        if matches!(g.kind, GateKind::CV | GateKind::CVDG) {
            // A control flip interacts with another flip, a target Z, or a
            // pending V on the target.
            let xc = |m: u32| m & 1;
            let zt = |m: u32| m >> 9 & 1;
            let vt = |m: u32| m >> 17 & 1;
            return (xc(a) & (xc(b) | zt(b) | vt(b))) | (xc(b) & (zt(a) | vt(a))) == 0;
        }
        if g.kind != GateKind::TOFFOLI && g.kind != GateKind::ZTOFFOLI {
            return false;
        }
        // Bilinear terms of the Toffoli rule: c1*c2, t*c1, t*c2, where c is
        // the control flip and t the kick bit on the target.
        let (fl, kk) = if g.kind == GateKind::TOFFOLI { (0, 8) } else { (8, 0) };
        let c1 = |m: u32| m >> fl & 1;
        let c2 = |m: u32| m >> (fl + 1) & 1;
        let t = |m: u32| m >> (kk + 2) & 1;
        // Bits are unions over branches, so each product must vanish alone.
        let cross = (c1(a) & c2(b)) | (c2(a) & c1(b));
        let cross_t1 = (t(a) & c1(b)) | (c1(a) & t(b));
        let cross_t2 = (t(a) & c2(b)) | (c2(a) & t(b));
        cross == 0 && cross_t1 == 0 && cross_t2 == 0
    }
}

/// `propagate` on a gadget: every assignment of its logical control values,
/// returning the union of residual frames.
pub fn propagate(gc: &GadgetCircuit, faults: &[(Location, PauliString)]) -> Result<Vec<Frame>, Error> {
    let mut all = Vec::new();
    for iv in super::ideal::assignments(gc) {
        let eng = Engine::new(gc, &iv);
        let mut evs = Vec::new();
        for (loc, p) in faults {
            let idx = eng.location_index(*loc).ok_or(Error::NoSuchLocation { step: loc.step, qubit: p.support().first().copied().unwrap_or(0) })?;
            let support = &eng.gates[idx].qubits;
            if p.support().iter().any(|q| !support.contains(q)) {
                return Err(Error::InvalidArgument(format!("fault {p} outside the support of location {:?}", loc)));
            }
            evs.push(FaultEvent { location: idx, frame: Frame::from_pauli(p) });
        }
        all.extend(eng.run(Frame::ID, &evs));
    }
    all.sort_unstable();
    all.dedup();
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Circuit, Gate};
    use crate::fault::ideal::analyze_circuit;

    fn engine_for(c: &Circuit) -> Engine {
        let iv = analyze_circuit(c);
        let gc = GadgetCircuit {
            spec: crate::gadgets::GadgetSpec::new(crate::gadgets::GadgetKind::ECX),
            circuit: c.clone(),
            data_qubits: (0..c.n_qubits).collect(),
            ancilla_qubits: vec![],
            inputs: vec![],
            outputs: vec![],
        };
        Engine::new(&gc, &iv)
    }

    fn one_step(n: usize, gates: Vec<Gate>) -> Circuit {
        let mut c = Circuit::empty(n);
        let used: Vec<usize> = gates.iter().flat_map(|g| g.qubits.clone()).collect();
        let mut step = gates;
        for q in 0..n {
            if !used.contains(&q) {
                step.push(Gate::wait(q));
            }
        }
        c.steps.push(vec![Gate::wait(0)].into_iter().chain((1..n).map(Gate::wait)).collect());
        c.steps.push(step);
        c
    }

    fn run_from(c: &Circuit, p: &str) -> Vec<String> {
        let e = engine_for(c);
        let f = Frame::from_pauli(&PauliString::parse(p).unwrap());
        let mut out: Vec<String> = e.run(Frame::ID, &[FaultEvent { location: 0, frame: f }]).iter().map(|f| PauliString::from_masks(c.n_qubits, f.x, f.z).unwrap().to_string()).collect();
        out.sort();
        out
    }

    // the fault is injected after the first WAIT on qubit 0
    #[test]
    fn cnot_rules() {
        let c = one_step(2, vec![Gate::cnot(0, 1)]);
        assert_eq!(run_from(&c, "XI"), vec!["XX"]);
        let c2 = one_step(2, vec![Gate::cnot(1, 0)]);
        assert_eq!(run_from(&c2, "ZI"), vec!["ZZ"]);
    }

    #[test]
    fn unknown_toffoli_control_branches() {
        let c = one_step(3, vec![Gate::toffoli(0, 1, 2)]);
        assert_eq!(run_from(&c, "XII"), vec!["XII", "XIX"]);
    }

    #[test]
    fn known_zero_control_blocks_the_flip() {
        let mut c = Circuit::empty(3);
        c.steps.push(vec![Gate::one(GateKind::PREP0, 0), Gate::one(GateKind::PREP0, 1), Gate::one(GateKind::PREP0, 2)]);
        c.steps.push(vec![Gate::toffoli(0, 1, 2)]);
        let e = engine_for(&c);
        let f = Frame::single(0, Pauli::X);
        let out = e.run(Frame::ID, &[FaultEvent { location: 0, frame: f }]);
        assert_eq!(out, vec![f]);
        let both = e.run(Frame::ID, &[FaultEvent { location: 0, frame: f }, FaultEvent { location: 1, frame: Frame::single(1, Pauli::X) }]);
        assert_eq!(both, vec![Frame { x: 0b111, z: 0, v: 0 }]);
    }

    #[test]
    fn alphabet_sizes() {
        let c = one_step(3, vec![Gate::toffoli(0, 1, 2)]);
        let e = engine_for(&c);
        assert_eq!(e.alphabet(0).len(), 3);
        assert_eq!(e.alphabet(3).len(), 63);
    }
}
