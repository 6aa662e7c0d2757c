//! Level-k gadgets described over level-(k-1) gate symbols.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::circuit::GateKind;
use crate::error::Error;

use super::{build_circuit, GadgetKind, GadgetSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolicGate {
    pub name: String,
    /// Concatenation level of the blocks the symbol acts on.
    pub level: usize,
    /// Indices of level-(k-1) blocks.
    pub operands: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schematic {
    pub spec: GadgetSpec,
    pub n_blocks: usize,
    pub steps: Vec<Vec<SymbolicGate>>,
}

fn symbol(kind: GateKind, level: usize) -> String {
    match kind {
        GateKind::TOFFOLI => format!("bTOFF({level})"),
        GateKind::ZTOFFOLI => format!("bZTOFF({level})"),
        GateKind::MCX => format!("bMCX({level})"),
        GateKind::PREP0 => format!("PREP0_L({level})"),
        GateKind::PREPPLUS => format!("PREPPLUS_L({level})"),
        GateKind::PREPH => format!("PREPH_L({level})"),
        GateKind::WAIT => format!("W({level})"),
        other => format!("{}({level})", other.name()),
    }
}

pub(super) fn build_schematic(spec: GadgetSpec) -> Result<Schematic, Error> {
    let lower = spec.level - 1;
    let base = build_circuit(GadgetSpec { level: 1, ..spec })?;
    let c = &base.circuit;
    let mut steps: Vec<Vec<SymbolicGate>> = Vec::new();
    let mut decoded = std::collections::BTreeSet::new();
    let ec_like = matches!(
        spec.kind,
        GadgetKind::ECX | GadgetKind::ECZ | GadgetKind::ECFull | GadgetKind::ExRecCNOT | GadgetKind::ExRecBTOFF | GadgetKind::ExRecVN
    );
    for gates in &c.steps {
        // Ancilla blocks driving a corrective bTOFF are decoded to repetition
        // blocks first, and checked by the repetition-code voter.
        if ec_like && lower >= 1 {
            let mut decode = Vec::new();
            for g in gates {
                let n_sym = match g.kind {
                    GateKind::TOFFOLI => "N_X",
                    GateKind::ZTOFFOLI => "N_Z",
                    _ => continue,
                };
                for &q in &g.qubits[..2] {
                    if c.roles[q] != crate::circuit::Role::Data && decoded.insert(q) {
                        decode.push(SymbolicGate { name: format!("{n_sym}({lower})"), level: lower, operands: vec![q] });
                    }
                }
            }
            if !decode.is_empty() {
                steps.push(decode);
            }
        }
        steps.push(
            gates
                .iter()
                .map(|g| SymbolicGate { name: symbol(g.kind, lower), level: lower, operands: g.qubits.clone() })
                .collect(),
        );
    }
    Ok(Schematic { spec, n_blocks: c.n_qubits, steps })
}

impl Schematic {
    pub fn symbol_counts(&self) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for g in self.steps.iter().flatten() {
            *m.entry(g.name.clone()).or_insert(0) += 1;
        }
        m
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# {} level {}", self.spec.kind.name(), self.spec.level).unwrap();
        writeln!(s, "blocks {}", self.n_blocks).unwrap();
        for (i, gates) in self.steps.iter().enumerate() {
            write!(s, "step {i}:").unwrap();
            for (j, g) in gates.iter().enumerate() {
                if j > 0 {
                    s.push(';');
                }
                write!(s, " {}", g.name).unwrap();
                for q in &g.operands {
                    write!(s, " {q}").unwrap();
                }
            }
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_two_ec_uses_level_one_symbols() {
        let s = build_schematic(GadgetSpec::new(GadgetKind::ECFull).at_level(2)).unwrap();
        let counts = s.symbol_counts();
        assert_eq!(counts["bTOFF(1)"], 3);
        assert_eq!(counts["bZTOFF(1)"], 3);
        assert_eq!(counts["N_X(1)"], 3);
        assert!(s.render().starts_with("# EC_full level 2"));
    }
}
