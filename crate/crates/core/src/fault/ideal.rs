//! Fault-free classical values of every qubit, tracked as affine GF(2) forms
//! over the input codeword and preparation variables.
//!
//! Both computational-basis and conjugate-basis values are tracked. A value
//! that stops being affine (or is genuinely quantum) becomes `None`. The
//! propagation rules only need the values read by non-Clifford controls.

use std::collections::{BTreeMap, BTreeSet};

use crate::circuit::{Circuit, GateKind};
use crate::code::CodeDef;
use crate::gadgets::{BlockCode, GadgetCircuit};
use crate::pauli::bits;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Affine {
    pub constant: bool,
    words: Vec<u64>,
}

impl Affine {
    pub fn constant(c: bool) -> Self {
        Affine { constant: c, words: Vec::new() }
    }

    pub fn var(i: usize) -> Self {
        let mut words = vec![0; i / 64 + 1];
        words[i / 64] = 1 << (i % 64);
        Affine { constant: false, words }
    }

    pub fn xor(&self, o: &Affine) -> Affine {
        let (long, short) = if self.words.len() >= o.words.len() { (self, o) } else { (o, self) };
        let mut words = long.words.clone();
        for (w, s) in words.iter_mut().zip(&short.words) {
            *w ^= s;
        }
        Affine { constant: self.constant ^ o.constant, words }
    }

    pub fn flip(&mut self) {
        self.constant = !self.constant;
    }

    pub fn as_const(&self) -> Option<bool> {
        if self.words.iter().all(|&w| w == 0) {
            Some(self.constant)
        } else {
            None
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| bits(w as u128).map(move |b| 64 * i + b))
    }
}

#[derive(Clone, Debug, Default)]
struct QubitValue {
    z: Option<Affine>,
    x: Option<Affine>,
    /// Pending power of sqrt(X) on this qubit, mod 4.
    vpow: u8,
}

impl QubitValue {
    fn z_read(&self) -> Option<&Affine> {
        if self.vpow % 2 == 1 {
            None
        } else {
            self.z.as_ref()
        }
    }

    fn settle(&mut self) {
        if self.vpow % 2 == 1 {
            self.z = None;
        }
        self.vpow = 0;
    }
}

/// Control values read by each gate, in flattened gate order. Only
/// non-Clifford gates carry entries.
#[derive(Clone, Debug, Default)]
pub struct IdealValues {
    pub controls: Vec<Vec<Option<bool>>>,
    /// Logical variables that alone make some control non-constant.
    pub pending_logicals: BTreeSet<usize>,
    pub n_vars: usize,
}

struct Vars<'a> {
    next: usize,
    logical: Vec<bool>,
    assignment: &'a BTreeMap<usize, bool>,
}

impl Vars<'_> {
    fn fresh(&mut self, logical: bool) -> Affine {
        let id = self.next;
        self.next += 1;
        self.logical.push(logical);
        match self.assignment.get(&id) {
            Some(&b) => Affine::constant(b),
            None => Affine::var(id),
        }
    }
}

fn block_code(code: BlockCode, n: usize) -> Option<CodeDef> {
    match code {
        BlockCode::BaconShor => Some(CodeDef::bacon_shor()),
        BlockCode::Repetition(b) => Some(CodeDef::repetition(n, b)),
        BlockCode::Steane => Some(CodeDef::steane()),
        BlockCode::Raw => None,
    }
}

/// Values of a codeword block in one basis: one variable per group
/// generator, one logical variable.
fn codeword_values(vars: &mut Vars, group: &[u128], logical: u128, n: usize) -> Vec<Affine> {
    let mut vals = vec![Affine::constant(false); n];
    for &g in group {
        let v = vars.fresh(false);
        for q in bits(g) {
            vals[q] = vals[q].xor(&v);
        }
    }
    let l = vars.fresh(true);
    for q in bits(logical) {
        vals[q] = vals[q].xor(&l);
    }
    vals
}

pub fn analyze(gc: &GadgetCircuit, assignment: &BTreeMap<usize, bool>) -> IdealValues {
    let c = &gc.circuit;
    let mut vars = Vars { next: 0, logical: Vec::new(), assignment };
    let mut state: Vec<QubitValue> = vec![QubitValue::default(); c.n_qubits];
    let mut seeded = vec![false; c.n_qubits];
    for blk in &gc.inputs {
        let n = blk.qubits.len();
        match block_code(blk.code, n) {
            Some(code) => {
                let z = codeword_values(&mut vars, &code.x_group_basis(), code.logical_x.x_mask(), n);
                let x = codeword_values(&mut vars, &code.z_group_basis(), code.logical_z.z_mask(), n);
                for (i, &q) in blk.qubits.iter().enumerate() {
                    state[q].z = Some(z[i].clone());
                    state[q].x = Some(x[i].clone());
                    seeded[q] = true;
                }
            }
            None => {
                for &q in &blk.qubits {
                    state[q].z = Some(vars.fresh(false));
                    state[q].x = Some(vars.fresh(false));
                    seeded[q] = true;
                }
            }
        }
    }
    for q in c.inputs() {
        if !seeded[q] {
            state[q].z = Some(vars.fresh(false));
            state[q].x = Some(vars.fresh(false));
        }
    }
    let mut out = IdealValues::default();
    for gates in &c.steps {
        for g in gates {
            let q = &g.qubits;
            let mut reads = Vec::new();
            match g.kind {
                GateKind::WAIT | GateKind::MEASX | GateKind::MEASZ => {}
                GateKind::X => {
                    state[q[0]].settle();
                    if let Some(z) = state[q[0]].z.as_mut() {
                        z.flip();
                    }
                }
                GateKind::Z => {
                    if let Some(x) = state[q[0]].x.as_mut() {
                        x.flip();
                    }
                }
                GateKind::H => {
                    let s = &mut state[q[0]];
                    s.settle();
                    std::mem::swap(&mut s.z, &mut s.x);
                }
                GateKind::PREP0 => {
                    state[q[0]] = QubitValue { z: Some(Affine::constant(false)), x: Some(vars.fresh(false)), vpow: 0 };
                }
                GateKind::PREPPLUS => {
                    state[q[0]] = QubitValue { z: Some(vars.fresh(false)), x: Some(Affine::constant(false)), vpow: 0 };
                }
                GateKind::PREPH => {
                    state[q[0]] = QubitValue { z: Some(vars.fresh(false)), x: Some(vars.fresh(false)), vpow: 0 };
                }
                GateKind::CNOT => {
                    let (a, t) = (q[0], q[1]);
                    state[a].settle();
                    state[t].settle();
                    state[t].z = match (&state[t].z, &state[a].z) {
                        (Some(zt), Some(za)) => Some(zt.xor(za)),
                        _ => None,
                    };
                    state[a].x = match (&state[a].x, &state[t].x) {
                        (Some(xa), Some(xt)) => Some(xa.xor(xt)),
                        _ => None,
                    };
                }
                GateKind::TOFFOLI | GateKind::MCX | GateKind::ZTOFFOLI => {
                    let dual = g.kind == GateKind::ZTOFFOLI;
                    let (ctrls, t) = q.split_at(q.len() - 1);
                    let t = t[0];
                    for &cq in ctrls.iter().chain([t].iter()) {
                        state[cq].settle();
                    }
                    let forms: Vec<Option<Affine>> =
                        ctrls.iter().map(|&cq| if dual { state[cq].x.clone() } else { state[cq].z.clone() }).collect();
                    reads = forms.clone();
                    let consts: Vec<Option<bool>> = forms.iter().map(|f| f.as_ref().and_then(Affine::as_const)).collect();
                    if consts.contains(&Some(false)) {
                        // acts as the identity
                    } else if consts.iter().all(|v| *v == Some(true)) {
                        let tv = if dual { &mut state[t].x } else { &mut state[t].z };
                        if let Some(v) = tv.as_mut() {
                            v.flip();
                        }
                    } else {
                        if dual {
                            state[t].x = None;
                        } else {
                            state[t].z = None;
                        }
                        for &cq in ctrls {
                            if dual {
                                state[cq].z = None;
                            } else {
                                state[cq].x = None;
                            }
                        }
                    }
                }
                GateKind::CV | GateKind::CVDG => {
                    let (a, t) = (q[0], q[1]);
                    state[a].settle();
                    let form = state[a].z_read().cloned();
                    reads = vec![form.clone()];
                    match form.as_ref().and_then(Affine::as_const) {
                        Some(false) => {}
                        Some(true) => {
                            let s = &mut state[t];
                            s.vpow = (s.vpow + if g.kind == GateKind::CV { 1 } else { 3 }) % 4;
                            if s.vpow == 2 {
                                if let Some(z) = s.z.as_mut() {
                                    z.flip();
                                }
                                s.vpow = 0;
                            }
                        }
                        None => {
                            state[t].z = None;
                            state[t].vpow = 0;
                            state[a].x = None;
                        }
                    }
                }
            }
            if !reads.is_empty() {
                for f in reads.iter().flatten() {
                    if f.as_const().is_none() && f.vars().all(|v| vars.logical[v]) {
                        out.pending_logicals.extend(f.vars());
                    }
                }
                out.controls.push(reads.iter().map(|f| f.as_ref().and_then(Affine::as_const)).collect());
            } else {
                out.controls.push(Vec::new());
            }
        }
    }
    out.n_vars = vars.next;
    out
}

/// Every assignment of the logical variables that decide a control value.
/// Each entry is analysed with those variables fixed.
pub fn assignments(gc: &GadgetCircuit) -> Vec<IdealValues> {
    let mut fixed: BTreeSet<usize> = BTreeSet::new();
    for _ in 0..8 {
        let a: BTreeMap<usize, bool> = fixed.iter().map(|&v| (v, false)).collect();
        let iv = analyze(gc, &a);
        let before = fixed.len();
        fixed.extend(iv.pending_logicals.iter().copied());
        if fixed.len() == before {
            break;
        }
    }
    let fixed: Vec<usize> = fixed.into_iter().take(10).collect();
    (0..1usize << fixed.len())
        .map(|mask| {
            let a: BTreeMap<usize, bool> = fixed.iter().enumerate().map(|(i, &v)| (v, mask >> i & 1 == 1)).collect();
            analyze(gc, &a)
        })
        .collect()
}

/// Values for a bare circuit whose inputs are all free.
pub fn analyze_circuit(c: &Circuit) -> IdealValues {
    let gc = GadgetCircuit {
        spec: crate::gadgets::GadgetSpec::new(crate::gadgets::GadgetKind::ECX),
        circuit: c.clone(),
        data_qubits: (0..c.n_qubits).collect(),
        ancilla_qubits: Vec::new(),
        inputs: Vec::new(),
        outputs: Vec::new(),
    };
    analyze(&gc, &BTreeMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{build_circuit, GadgetKind, GadgetSpec};

    fn all_controls_known(iv: &IdealValues) -> bool {
        iv.controls.iter().flatten().all(|v| v.is_some())
    }

    #[test]
    fn ec_syndrome_controls_are_constant_zero() {
        for k in [GadgetKind::ECX, GadgetKind::ECZ, GadgetKind::ECFull, GadgetKind::ExRecCNOT, GadgetKind::ExRecVN] {
            let g = build_circuit(GadgetSpec::new(k)).unwrap();
            let a = assignments(&g);
            assert_eq!(a.len(), 1, "{}", k.name());
            assert!(all_controls_known(&a[0]), "{}", k.name());
            assert!(a[0].controls.iter().flatten().all(|v| *v == Some(false)), "{}", k.name());
        }
    }

    #[test]
    fn btoff_enumerates_the_two_control_logicals() {
        let g = build_circuit(GadgetSpec::new(GadgetKind::ExRecBTOFF)).unwrap();
        let a = assignments(&g);
        assert_eq!(a.len(), 4);
        for iv in &a {
            assert!(all_controls_known(iv));
        }
        let g2 = build_circuit(GadgetSpec::new(GadgetKind::ExRecBTOFF).two_qubit()).unwrap();
        let a2 = assignments(&g2);
        assert_eq!(a2.len(), 4);
        for iv in &a2 {
            assert!(all_controls_known(iv));
        }
    }

    #[test]
    fn affine_algebra() {
        let a = Affine::var(3);
        let b = Affine::var(70);
        let s = a.xor(&b);
        assert_eq!(s.vars().collect::<Vec<_>>(), vec![3, 70]);
        assert_eq!(s.xor(&a).xor(&b).as_const(), Some(false));
    }
}
