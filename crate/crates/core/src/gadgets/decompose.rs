//! Rewrites every TOFFOLI and ZTOFFOLI of a circuit into one- and
//! two-qubit gates, stretching the steps that contain them.

use crate::circuit::{Circuit, Gate, GateKind};

use super::bacon_shor::toffoli_decomposition;
use super::GadgetCircuit;

fn expand(g: &Gate, width: usize) -> Vec<Vec<Gate>> {
    let mut sub: Vec<Vec<Gate>> = vec![Vec::new(); width];
    let (a, b, t) = (g.qubits[0], g.qubits[1], g.qubits[2]);
    let off = usize::from(width == 7);
    let seq = toffoli_decomposition(a, b, t);
    for (i, x) in seq.into_iter().enumerate() {
        sub[off + i].push(x);
    }
    if g.kind == GateKind::ZTOFFOLI {
        for q in [a, b, t] {
            sub[0].push(Gate::one(GateKind::H, q));
            sub[6].push(Gate::one(GateKind::H, q));
        }
    }
    sub
}

pub fn decompose_circuit(c: &Circuit) -> Circuit {
    let last = c.steps.len().saturating_sub(1);
    let mut next_use = vec![vec![false; c.n_qubits]; c.steps.len()];
    for s in 1..c.steps.len() {
        for g in &c.steps[s] {
            for &q in &g.qubits {
                next_use[s - 1][q] = true;
            }
        }
    }
    let mut steps: Vec<Vec<Gate>> = Vec::new();
    for (s, gates) in c.steps.iter().enumerate() {
        let width = if gates.iter().any(|g| g.kind == GateKind::ZTOFFOLI) {
            7
        } else if gates.iter().any(|g| g.kind == GateKind::TOFFOLI) {
            5
        } else {
            1
        };
        let mut sub: Vec<Vec<Gate>> = vec![Vec::new(); width];
        let mut busy = vec![vec![false; c.n_qubits]; width];
        for g in gates {
            let parts = match g.kind {
                GateKind::TOFFOLI | GateKind::ZTOFFOLI => expand(g, width),
                k if k.is_prep() => {
                    let mut p = vec![Vec::new(); width];
                    p[width - 1].push(g.clone());
                    p
                }
                GateKind::WAIT => vec![vec![g.clone()]; width],
                _ => {
                    let mut p = vec![Vec::new(); width];
                    p[0].push(g.clone());
                    p
                }
            };
            for (i, p) in parts.into_iter().enumerate() {
                for x in p {
                    for &q in &x.qubits {
                        busy[i][q] = true;
                    }
                    sub[i].push(x);
                }
            }
        }
        // Fill idle slots of qubits whose life spans the whole stretched step.
        for g in gates {
            if g.kind.is_prep() || g.kind == GateKind::WAIT || g.kind.is_meas() {
                continue;
            }
            for &q in &g.qubits {
                let continues = if s == last { !c.discard.contains(&q) } else { next_use[s][q] };
                let lastu = sub.iter().rposition(|st| st.iter().any(|x| x.qubits.contains(&q))).unwrap_or(0);
                let end = if continues { width - 1 } else { lastu };
                for i in 0..=end {
                    if !busy[i][q] {
                        busy[i][q] = true;
                        sub[i].push(Gate::wait(q));
                    }
                }
            }
        }
        for mut st in sub {
            st.sort_by_key(|g| g.qubits[0]);
            steps.push(st);
        }
    }
    Circuit { n_qubits: c.n_qubits, steps, discard: c.discard.clone(), roles: c.roles.clone() }
}

pub fn decompose_gadget(gc: &GadgetCircuit) -> GadgetCircuit {
    let mut out = gc.clone();
    out.circuit = decompose_circuit(&gc.circuit);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{build_circuit, GadgetKind, GadgetSpec};

    #[test]
    fn no_three_qubit_gates_remain() {
        for k in [GadgetKind::ECFull, GadgetKind::MX, GadgetKind::ExRecCNOT] {
            let g = build_circuit(GadgetSpec::new(k)).unwrap();
            let d = decompose_circuit(&g.circuit);
            assert!(d.is_valid(), "{:?}", d.validate());
            let n3 = g.circuit.count_kind(GateKind::TOFFOLI) + g.circuit.count_kind(GateKind::ZTOFFOLI);
            assert_eq!(d.count_kind(GateKind::TOFFOLI) + d.count_kind(GateKind::ZTOFFOLI), 0);
            assert_eq!(d.count_kind(GateKind::CV), 2 * n3);
            assert_eq!(d.count_kind(GateKind::CVDG), n3);
        }
    }
}
