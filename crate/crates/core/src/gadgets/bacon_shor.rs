//! Bacon-Shor gadgets. A block is nine qubits indexed `3 * row + col`.

use crate::circuit::{CircuitBuilder, Gate, GateKind, Role};
use crate::code::Basis;
use crate::error::Error;

use super::majority::append_m_basis;
use super::{bs_block, Block, BlockCode, GadgetCircuit, GadgetSpec, Sector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EcStage {
    /// Corrects bit flips only.
    X,
    /// Corrects phase flips only.
    Z,
    Full,
}

pub fn bs_row(block: &[usize], r: usize) -> [usize; 3] {
    [block[3 * r], block[3 * r + 1], block[3 * r + 2]]
}

fn at(block: &[usize], r: usize, c: usize) -> usize {
    block[3 * (r % 3) + c % 3]
}

/// Ancillas of one stage, `anc[string][entry]`.
struct StageAnc([[usize; 3]; 3]);

// X stage: string j copies column j; entry r holds d(r,j) ^ d(r+1,j).
fn x_extract(b: &mut CircuitBuilder, d: &[usize]) -> StageAnc {
    let mut a = [[0; 3]; 3];
    for row in a.iter_mut() {
        for q in row.iter_mut() {
            *q = b.fresh(GateKind::PREP0, Role::Ancilla);
            b.discard(*q);
        }
    }
    for r in 0..3 {
        for (j, row) in a.iter().enumerate() {
            b.push(Gate::cnot(at(d, r, j), row[r]));
        }
    }
    for r in 0..3 {
        for (j, row) in a.iter().enumerate() {
            b.push(Gate::cnot(at(d, r + 1, j), row[r]));
        }
    }
    StageAnc(a)
}

// Votes s1 ^ s2 ^ s3 into the third string.
fn x_process(b: &mut CircuitBuilder, a: &StageAnc) {
    let a = &a.0;
    for r in 0..3 {
        b.push(Gate::cnot(a[0][r], a[2][r]));
    }
    for r in 0..3 {
        b.push(Gate::cnot(a[1][r], a[2][r]));
    }
}

fn x_correct(b: &mut CircuitBuilder, d: &[usize], a: &StageAnc) {
    let f = &a.0[2];
    for r in 0..3 {
        b.push(Gate::toffoli(f[(r + 2) % 3], f[r], at(d, r, 0)));
    }
}

// Z stage: string i copies row i in the conjugate basis.
fn z_extract(b: &mut CircuitBuilder, d: &[usize]) -> StageAnc {
    let mut a = [[0; 3]; 3];
    for row in a.iter_mut() {
        for q in row.iter_mut() {
            *q = b.fresh(GateKind::PREPPLUS, Role::Ancilla);
            b.discard(*q);
        }
    }
    for c in 0..3 {
        for (i, row) in a.iter().enumerate() {
            b.push(Gate::cnot(row[c], at(d, i, c)));
        }
    }
    for c in 0..3 {
        for (i, row) in a.iter().enumerate() {
            b.push(Gate::cnot(row[c], at(d, i, c + 1)));
        }
    }
    StageAnc(a)
}

fn z_process(b: &mut CircuitBuilder, a: &StageAnc) {
    let a = &a.0;
    for c in 0..3 {
        b.push(Gate::cnot(a[2][c], a[0][c]));
    }
    for c in 0..3 {
        b.push(Gate::cnot(a[2][c], a[1][c]));
    }
}

fn z_correct(b: &mut CircuitBuilder, d: &[usize], a: &StageAnc) {
    let g = &a.0[2];
    for c in 0..3 {
        b.push(Gate::ztoffoli(g[(c + 2) % 3], g[c], at(d, 0, c)));
    }
}

pub fn append_ec_x(b: &mut CircuitBuilder, d: &[usize]) {
    let a = x_extract(b, d);
    x_process(b, &a);
    x_correct(b, d, &a);
}

pub fn append_ec_z(b: &mut CircuitBuilder, d: &[usize]) {
    let a = z_extract(b, d);
    z_process(b, &a);
    z_correct(b, d, &a);
}

/// Both stages, interleaved so the Z extraction runs while the X syndrome
/// is being processed.
pub fn append_ec(b: &mut CircuitBuilder, d: &[usize]) {
    let ax = x_extract(b, d);
    let az = z_extract(b, d);
    x_process(b, &ax);
    z_process(b, &az);
    x_correct(b, d, &ax);
    z_correct(b, d, &az);
}

fn append_stage(b: &mut CircuitBuilder, d: &[usize], stage: EcStage) {
    match stage {
        EcStage::X => append_ec_x(b, d),
        EcStage::Z => append_ec_z(b, d),
        EcStage::Full => append_ec(b, d),
    }
}

/// Row parities into column 2; returns the repetition block (column 2).
pub fn append_n_x(b: &mut CircuitBuilder, d: &[usize]) -> [usize; 3] {
    for r in 0..3 {
        b.push(Gate::cnot(at(d, r, 0), at(d, r, 2)));
    }
    for r in 0..3 {
        b.push(Gate::cnot(at(d, r, 1), at(d, r, 2)));
    }
    [at(d, 0, 2), at(d, 1, 2), at(d, 2, 2)]
}

/// Column phase parities into row 2; returns row 2.
pub fn append_n_z(b: &mut CircuitBuilder, d: &[usize]) -> [usize; 3] {
    for c in 0..3 {
        b.push(Gate::cnot(at(d, 2, c), at(d, 0, c)));
    }
    for c in 0..3 {
        b.push(Gate::cnot(at(d, 2, c), at(d, 1, c)));
    }
    [at(d, 2, 0), at(d, 2, 1), at(d, 2, 2)]
}

fn discard_except(b: &mut CircuitBuilder, qs: &[usize], keep: &[usize]) {
    for &q in qs {
        if !keep.contains(&q) {
            b.discard(q);
        }
    }
}

pub(super) fn build_ec(spec: GadgetSpec, stage: EcStage) -> Result<GadgetCircuit, Error> {
    let mut b = CircuitBuilder::new();
    let d = b.inputs(Role::Data, 9);
    append_stage(&mut b, &d, stage);
    let sector = match stage {
        EcStage::X => Sector::X,
        EcStage::Z => Sector::Z,
        EcStage::Full => Sector::Both,
    };
    let blk = bs_block("data", &d, sector);
    Ok(GadgetCircuit::from_builder(spec, b, vec![blk.clone()], vec![blk]))
}

pub(super) fn build_n(spec: GadgetSpec, basis: Basis) -> Result<GadgetCircuit, Error> {
    let mut b = CircuitBuilder::new();
    let d = b.inputs(Role::Data, 9);
    let (qr, sector) = match basis {
        Basis::Z => (append_n_x(&mut b, &d), Sector::X),
        Basis::X => (append_n_z(&mut b, &d), Sector::Z),
    };
    discard_except(&mut b, &d, &qr);
    let input = bs_block("data", &d, sector);
    let out = Block::new("qr", &qr, BlockCode::Repetition(basis), sector);
    Ok(GadgetCircuit::from_builder(spec, b, vec![input], vec![out]))
}

// Three ancilla blocks of one row: B1 and B2 into B3, then decode B3.
fn vn_body(b: &mut CircuitBuilder, blocks: &[Vec<usize>; 3]) -> [usize; 3] {
    for q in 0..9 {
        b.push(Gate::cnot(blocks[0][q], blocks[2][q]));
    }
    for q in 0..9 {
        b.push(Gate::cnot(blocks[1][q], blocks[2][q]));
    }
    let qr = append_n_x(b, &blocks[2]);
    discard_except(b, &blocks[0], &[]);
    discard_except(b, &blocks[1], &[]);
    discard_except(b, &blocks[2], &qr);
    qr
}

pub(super) fn build_vn_row(spec: GadgetSpec) -> Result<GadgetCircuit, Error> {
    let mut b = CircuitBuilder::new();
    let blocks = [b.inputs(Role::Data, 9), b.inputs(Role::Data, 9), b.inputs(Role::Data, 9)];
    let qr = vn_body(&mut b, &blocks);
    let inputs = (0..3).map(|i| bs_block(&format!("b{}", i + 1), &blocks[i], Sector::X)).collect();
    let out = Block::new("qr", &qr, BlockCode::Repetition(Basis::Z), Sector::X);
    Ok(GadgetCircuit::from_builder(spec, b, inputs, vec![out]))
}

pub(super) fn build_exrec_vn(spec: GadgetSpec) -> Result<GadgetCircuit, Error> {
    let mut b = CircuitBuilder::new();
    let blocks = [b.inputs(Role::Data, 9), b.inputs(Role::Data, 9), b.inputs(Role::Data, 9)];
    for blk in &blocks {
        append_ec_x(&mut b, blk);
    }
    b.barrier();
    let qr = vn_body(&mut b, &blocks);
    b.barrier();
    append_m_basis(&mut b, &qr, Basis::Z);
    let inputs = (0..3).map(|i| bs_block(&format!("b{}", i + 1), &blocks[i], Sector::X)).collect();
    let out = Block::new("qr", &qr, BlockCode::Repetition(Basis::Z), Sector::X);
    Ok(GadgetCircuit::from_builder(spec, b, inputs, vec![out]))
}

pub(super) fn build_exrec_cnot(spec: GadgetSpec) -> Result<GadgetCircuit, Error> {
    let mut b = CircuitBuilder::new();
    let ctl = b.inputs(Role::Data, 9);
    let tgt = b.inputs(Role::Data, 9);
    append_ec(&mut b, &ctl);
    append_ec(&mut b, &tgt);
    b.barrier();
    for q in 0..9 {
        b.push(Gate::cnot(ctl[q], tgt[q]));
    }
    b.barrier();
    append_ec(&mut b, &ctl);
    append_ec(&mut b, &tgt);
    let blocks = vec![bs_block("control", &ctl, Sector::Both), bs_block("target", &tgt, Sector::Both)];
    Ok(GadgetCircuit::from_builder(spec, b, blocks.clone(), blocks))
}

/// Toffoli from two-qubit gates: V^a V^b V^-(a^b) = X^(ab) on the target.
pub fn toffoli_decomposition(a: usize, bq: usize, t: usize) -> Vec<Gate> {
    vec![
        Gate::new(GateKind::CV, &[bq, t]),
        Gate::cnot(a, bq),
        Gate::new(GateKind::CVDG, &[bq, t]),
        Gate::cnot(a, bq),
        Gate::new(GateKind::CV, &[a, t]),
    ]
}

pub(super) fn build_exrec_btoff(spec: GadgetSpec) -> Result<GadgetCircuit, Error> {
    let mut b = CircuitBuilder::new();
    let d = b.inputs(Role::Data, 9);
    let c1 = b.inputs(Role::Data, 3);
    let c2 = b.inputs(Role::Data, 3);
    append_ec(&mut b, &d);
    append_m_basis(&mut b, &c1, Basis::Z);
    append_m_basis(&mut b, &c2, Basis::Z);
    b.barrier();
    for r in 0..3 {
        b.push(Gate::toffoli(c1[r], c2[r], at(&d, r, 0)));
    }
    b.barrier();
    append_ec(&mut b, &d);
    append_m_basis(&mut b, &c1, Basis::Z);
    append_m_basis(&mut b, &c2, Basis::Z);
    let blocks = vec![
        bs_block("data", &d, Sector::Both),
        Block::new("control1", &c1, BlockCode::Repetition(Basis::Z), Sector::X),
        Block::new("control2", &c2, BlockCode::Repetition(Basis::Z), Sector::X),
    ];
    Ok(GadgetCircuit::from_builder(spec, b, blocks.clone(), blocks))
}

/// |0_L>: |0> everywhere, then phase voting along each row fixes the X gauge.
/// |+_L>: the dual, bit voting down each column.
pub(super) fn build_prep(spec: GadgetSpec, basis: Basis) -> Result<GadgetCircuit, Error> {
    let mut b = CircuitBuilder::new();
    let kind = if basis == Basis::Z { GateKind::PREP0 } else { GateKind::PREPPLUS };
    let d = b.fresh_many(kind, Role::Data, 9);
    for &q in &d {
        b.prep_now(q);
    }
    for i in 0..3 {
        match basis {
            Basis::Z => {
                append_m_basis(&mut b, &bs_row(&d, i), Basis::X);
            }
            Basis::X => {
                append_m_basis(&mut b, &[at(&d, 0, i), at(&d, 1, i), at(&d, 2, i)], Basis::Z);
            }
        }
    }
    let out = bs_block("data", &d, Sector::Both);
    Ok(GadgetCircuit::from_builder(spec, b, vec![], vec![out]))
}

/// Encodes a |H> preparation on qubit 0 by a CNOT fan-out (eight CNOTs over
/// four steps), then phase voting along each row.
pub(super) fn build_encoder(spec: GadgetSpec) -> Result<GadgetCircuit, Error> {
    let mut b = CircuitBuilder::new();
    let mut d = vec![b.fresh(GateKind::PREPH, Role::Data)];
    d.extend(b.fresh_many(GateKind::PREP0, Role::Data, 8));
    for &q in &d {
        b.prep_now(q);
    }
    for (c, t) in [(0, 1), (0, 2), (1, 3), (0, 4), (1, 5), (2, 6), (3, 7), (0, 8)] {
        b.push(Gate::cnot(d[c], d[t]));
    }
    b.barrier();
    for i in 0..3 {
        append_m_basis(&mut b, &bs_row(&d, i), Basis::X);
    }
    let out = bs_block("data", &d, Sector::Both);
    Ok(GadgetCircuit::from_builder(spec, b, vec![], vec![out]))
}
