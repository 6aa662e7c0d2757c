//! Verdicts on residual frames at the gadget outputs.

use crate::code::{Basis, CodeDef};
use crate::gadgets::{Block, BlockCode, GadgetCircuit};

use super::propagate::Frame;

#[derive(Clone, Debug)]
struct OutBlock {
    qubits: Vec<usize>,
    code: BlockCode,
    defn: Option<CodeDef>,
    x: bool,
    z: bool,
}

/// Ideal decoding on every output block of a gadget.
#[derive(Clone, Debug)]
pub struct Judge {
    blocks: Vec<OutBlock>,
}

fn gather(m: u128, qs: &[usize]) -> u128 {
    qs.iter().enumerate().fold(0, |acc, (i, &q)| acc | ((m >> q & 1) << i))
}

impl Judge {
    pub fn new(gc: &GadgetCircuit) -> Self {
        Self::from_blocks(&gc.outputs)
    }

    pub fn from_blocks(blocks: &[Block]) -> Self {
        let blocks = blocks
            .iter()
            .map(|b| {
                let n = b.qubits.len();
                let defn = match b.code {
                    BlockCode::BaconShor => Some(CodeDef::bacon_shor()),
                    BlockCode::Steane => Some(CodeDef::steane()),
                    BlockCode::Repetition(basis) => Some(CodeDef::repetition(n, basis)),
                    BlockCode::Raw => None,
                };
                OutBlock { qubits: b.qubits.clone(), code: b.code, defn, x: b.sector.has_x(), z: b.sector.has_z() }
            })
            .collect();
        Judge { blocks }
    }

    /// True iff some output block is left with a logical error after one
    /// ideal decoding round.
    pub fn fails(&self, f: &Frame) -> bool {
        self.blocks.iter().any(|b| {
            let xm = if b.x { gather(f.x, &b.qubits) } else { 0 };
            let zm = if b.z { gather(f.z, &b.qubits) } else { 0 };
            match (&b.code, &b.defn) {
                (BlockCode::Raw, _) => xm != 0 || zm != 0,
                (BlockCode::Repetition(Basis::Z), _) => {
                    2 * xm.count_ones() as usize > b.qubits.len() || zm.count_ones() % 2 == 1
                }
                (BlockCode::Repetition(Basis::X), _) => {
                    2 * zm.count_ones() as usize > b.qubits.len() || xm.count_ones() % 2 == 1
                }
                (_, Some(d)) => d.x_failure(xm) || d.z_failure(zm),
                (_, None) => unreachable!(),
            }
        })
    }

    /// True iff the frame is not a stabilizer or gauge element on some block.
    pub fn nontrivial(&self, f: &Frame) -> bool {
        self.blocks.iter().any(|b| {
            let xm = if b.x { gather(f.x, &b.qubits) } else { 0 };
            let zm = if b.z { gather(f.z, &b.qubits) } else { 0 };
            match &b.defn {
                Some(d) => !d.x_in_group(xm) || !d.z_in_group(zm),
                None => xm != 0 || zm != 0,
            }
        })
    }

    /// Output qubits carrying the frame (in the judged sectors).
    pub fn support(&self, f: &Frame) -> Vec<usize> {
        let mut s = Vec::new();
        for b in &self.blocks {
            for &q in &b.qubits {
                if (b.x && f.x >> q & 1 == 1) || (b.z && f.z >> q & 1 == 1) {
                    s.push(q);
                }
            }
        }
        s
    }

    pub fn output_qubits(&self) -> Vec<usize> {
        self.blocks.iter().flat_map(|b| b.qubits.iter().copied()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::Sector;
    use crate::pauli::{Pauli, PauliString};

    fn judge() -> Judge {
        Judge::from_blocks(&[Block::new("data", &(0..9).collect::<Vec<_>>(), BlockCode::BaconShor, Sector::Both)])
    }

    #[test]
    fn same_column_pair_fails_row_pair_passes() {
        let j = judge();
        let col = Frame::from_pauli(&PauliString::x_on(9, &[0, 3]));
        let row = Frame::from_pauli(&PauliString::x_on(9, &[0, 1]));
        assert!(j.fails(&col));
        assert!(!j.fails(&row));
        assert!(!j.nontrivial(&row));
        assert!(j.nontrivial(&Frame::single(4, Pauli::Y)));
        assert!(!j.fails(&Frame::single(4, Pauli::Y)));
    }
}
