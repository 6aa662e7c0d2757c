//! Repetition-code gadgets: majority voters, parity voter, cat verification,
//! cooling tree and the Steane-code decoder.

use crate::circuit::{CircuitBuilder, Gate, GateKind, Role};
use crate::code::{Basis, CodeDef};
use crate::error::Error;

use super::{Block, BlockCode, GadgetCircuit, GadgetSpec, Sector};

/// Sizes of the multi-controlled NOTs in the correction of M(n).
///
/// Bit i is in the minority iff at least (n+1)/2 of its n-1 disagreement
/// bits are set. Expanding that threshold function over GF(2) in elementary
/// symmetric polynomials gives the sizes with odd coefficient.
pub fn k_set(n: usize) -> Vec<usize> {
    let m = n - 1;
    let t = n.div_ceil(2);
    let f = |w: usize| usize::from(w >= t);
    let mut c = vec![0usize; m + 1];
    for w in 0..=m {
        let mut acc = 0;
        for (k, ck) in c.iter().enumerate().take(w) {
            acc ^= ck & binom_parity(w, k);
        }
        c[w] = acc ^ f(w);
    }
    (0..=m).rev().filter(|&k| c[k] == 1).collect()
}

fn binom_parity(n: usize, k: usize) -> usize {
    usize::from(k & !n == 0)
}

fn subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let n = items.len();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Appends M(n) acting on the bit-flip repetition block `data`.
/// Returns the ancillas; they are marked discarded.
pub fn append_m(b: &mut CircuitBuilder, data: &[usize]) -> Vec<usize> {
    let n = data.len();
    let strings = (n - 1) / 2;
    let mut anc: Vec<Vec<usize>> = Vec::new();
    for _ in 0..strings {
        anc.push(b.fresh_many(GateKind::PREP0, Role::Ancilla, n));
    }
    for (k, row) in anc.iter().enumerate() {
        let shift = k + 1;
        for i in 0..n {
            b.push(Gate::cnot(data[i], row[i]));
        }
        for i in 0..n {
            b.push(Gate::cnot(data[(i + shift) % n], row[i]));
        }
    }
    for i in 0..n {
        let mut disagree = Vec::new();
        for (k, row) in anc.iter().enumerate() {
            let shift = k + 1;
            disagree.push(row[(i + n - shift) % n]);
            disagree.push(row[i]);
        }
        for size in k_set(n) {
            for ctrl in subsets(&disagree, size) {
                let mut qs = ctrl.clone();
                qs.push(data[i]);
                let kind = if size == 2 { GateKind::TOFFOLI } else { GateKind::MCX };
                b.push(Gate::new(kind, &qs));
            }
        }
    }
    let all: Vec<usize> = anc.into_iter().flatten().collect();
    for &q in &all {
        b.discard(q);
    }
    all
}

/// M(3) in either basis: `Basis::Z` votes bit values, `Basis::X` is the
/// Hadamard conjugate and votes phase values.
pub fn append_m_basis(b: &mut CircuitBuilder, data: &[usize], basis: Basis) -> Vec<usize> {
    match basis {
        Basis::Z => append_m(b, data),
        Basis::X => {
            assert_eq!(data.len(), 3);
            let anc = b.fresh_many(GateKind::PREPPLUS, Role::Ancilla, 3);
            for i in 0..3 {
                b.push(Gate::cnot(anc[i], data[i]));
            }
            for i in 0..3 {
                b.push(Gate::cnot(anc[i], data[(i + 1) % 3]));
            }
            for i in 0..3 {
                b.push(Gate::ztoffoli(anc[(i + 2) % 3], anc[i], data[i]));
            }
            for &q in &anc {
                b.discard(q);
            }
            anc
        }
    }
}

pub(super) fn build_m(spec: GadgetSpec, basis: Basis, n: usize) -> Result<GadgetCircuit, Error> {
    if !matches!(n, 3 | 5 | 7) {
        return Err(Error::UnsupportedGadget(format!("M({n}) needs n in {{3, 5, 7}}")));
    }
    let mut b = CircuitBuilder::new();
    let data = b.inputs(Role::Data, n);
    append_m_basis(&mut b, &data, basis);
    let sector = if basis == Basis::Z { Sector::X } else { Sector::Z };
    let block = Block::new("data", &data, BlockCode::Repetition(basis), sector);
    Ok(GadgetCircuit::from_builder(spec, b, vec![block.clone()], vec![block]))
}

pub(super) fn build_parity_voter(spec: GadgetSpec, n: usize) -> Result<GadgetCircuit, Error> {
    if n < 2 {
        return Err(Error::UnsupportedGadget(format!("parity voter needs n >= 2, got {n}")));
    }
    let mut b = CircuitBuilder::new();
    let data = b.inputs(Role::Data, n);
    let anc: Vec<Vec<usize>> = (1..n).map(|_| b.fresh_many(GateKind::PREP0, Role::Ancilla, n)).collect();
    for (k, row) in anc.iter().enumerate() {
        for i in 0..n {
            b.push(Gate::cnot(data[(i + k + 1) % n], row[i]));
        }
    }
    for i in 0..n {
        for row in &anc {
            b.push(Gate::cnot(row[i], data[i]));
        }
    }
    for (k, row) in anc.iter().enumerate() {
        for i in 0..n {
            b.push(Gate::cnot(data[(i + k + 1) % n], row[i]));
        }
    }
    for q in anc.into_iter().flatten() {
        b.discard(q);
    }
    let block = Block::new("data", &data, BlockCode::Raw, Sector::X);
    Ok(GadgetCircuit::from_builder(spec, b, vec![block.clone()], vec![block]))
}

/// CNOT-chain cat preparation followed by M on overlapping windows of three.
pub(super) fn build_cat_verify(spec: GadgetSpec, n: usize) -> Result<GadgetCircuit, Error> {
    if n < 3 {
        return Err(Error::UnsupportedGadget(format!("cat verification needs n >= 3, got {n}")));
    }
    let mut b = CircuitBuilder::new();
    let mut cat = vec![b.fresh(GateKind::PREPPLUS, Role::Data)];
    cat.extend(b.fresh_many(GateKind::PREP0, Role::Data, n - 1));
    for i in 0..n - 1 {
        b.push(Gate::cnot(cat[i], cat[i + 1]));
    }
    for w in 0..n - 2 {
        append_m(&mut b, &cat[w..w + 3]);
    }
    let block = Block::new("cat", &cat, BlockCode::Raw, Sector::X);
    Ok(GadgetCircuit::from_builder(spec, b, vec![], vec![block]))
}

/// Three-qubit cooling step leaving the majority on `a`.
pub(crate) fn append_cooling_step(b: &mut CircuitBuilder, a: usize, bq: usize, c: usize) {
    b.push(Gate::cnot(a, bq));
    b.push(Gate::cnot(a, c));
    b.push(Gate::toffoli(c, bq, a));
}

pub(super) fn build_cooling_tree(spec: GadgetSpec, rounds: usize) -> Result<GadgetCircuit, Error> {
    if rounds == 0 || rounds > 3 {
        return Err(Error::UnsupportedGadget(format!("cooling tree supports 1 to 3 rounds, got {rounds}")));
    }
    let mut b = CircuitBuilder::new();
    let n = 3usize.pow(rounds as u32);
    let qs = b.inputs(Role::Data, n);
    let mut level: Vec<usize> = qs.clone();
    while level.len() > 1 {
        let mut next = Vec::new();
        for t in level.chunks(3) {
            append_cooling_step(&mut b, t[0], t[1], t[2]);
            b.discard(t[1]);
            b.discard(t[2]);
            next.push(t[0]);
        }
        level = next;
    }
    let root = level[0];
    let input = Block::new("input", &qs, BlockCode::Raw, Sector::X);
    let out = Block::new("root", &[root], BlockCode::Raw, Sector::X);
    Ok(GadgetCircuit::from_builder(spec, b, vec![input], vec![out]))
}

/// Weight-3 logical X representatives of the Steane code, as qubit triples.
pub fn steane_x_logicals() -> Vec<[usize; 3]> {
    let code = CodeDef::steane();
    let mut out = Vec::new();
    for a in 0..7 {
        for bq in a + 1..7 {
            for c in bq + 1..7 {
                let p = crate::pauli::PauliString::x_on(7, &[a, bq, c]);
                if code.reduce_mod_gauge(&p).ok() == Some(crate::code::LogicalVerdict::X) {
                    out.push([a, bq, c]);
                }
            }
        }
    }
    out
}

/// Steane-code coherent decoder: parity of each weight-3 logical into a fresh
/// triple's last qubit, then M(7) on those seven bits.
pub(super) fn build_steane_n(spec: GadgetSpec) -> Result<GadgetCircuit, Error> {
    let mut b = CircuitBuilder::new();
    let data = b.inputs(Role::Data, 7);
    let mut string = Vec::new();
    for rep in steane_x_logicals() {
        let anc = b.fresh_many(GateKind::PREP0, Role::Ancilla, 3);
        for (k, &q) in rep.iter().enumerate() {
            b.push(Gate::cnot(data[q], anc[k]));
        }
        b.push(Gate::cnot(anc[0], anc[2]));
        b.push(Gate::cnot(anc[1], anc[2]));
        b.discard(anc[0]);
        b.discard(anc[1]);
        string.push(anc[2]);
    }
    for &q in &data {
        b.discard(q);
    }
    append_m(&mut b, &string);
    let input = Block::new("data", &data, BlockCode::Steane, Sector::X);
    let out = Block::new("qr", &string, BlockCode::Repetition(Basis::Z), Sector::X);
    Ok(GadgetCircuit::from_builder(spec, b, vec![input], vec![out]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::GadgetKind;

    #[test]
    fn k_sets() {
        assert_eq!(k_set(3), vec![2]);
        assert_eq!(k_set(5), vec![4, 3]);
        assert_eq!(k_set(7), vec![4]);
    }

    #[test]
    fn k_set_expansion_is_the_threshold_function() {
        for n in [3usize, 5, 7] {
            let ks = k_set(n);
            for w in 0..n {
                let v = ks.iter().map(|&k| binom_parity(w, k)).fold(0, |a, b| a ^ b);
                assert_eq!(v, usize::from(w >= n.div_ceil(2)), "n={n} w={w}");
            }
        }
    }

    #[test]
    fn subsets_count() {
        assert_eq!(subsets(&[1, 2, 3, 4], 2).len(), 6);
        assert_eq!(subsets(&[1, 2, 3, 4, 5, 6], 4).len(), 15);
        assert_eq!(subsets(&[1, 2], 2), vec![vec![1, 2]]);
    }

    #[test]
    fn m3_shape() {
        let g = build_m(GadgetSpec::new(GadgetKind::MX), Basis::Z, 3).unwrap();
        assert_eq!(g.circuit.n_qubits, 6);
        assert_eq!(g.circuit.count_kind(GateKind::TOFFOLI), 3);
        assert_eq!(g.circuit.count_kind(GateKind::CNOT), 6);
        assert_eq!(g.circuit.depth(), 6);
        let g5 = build_m(GadgetSpec::new(GadgetKind::MN(5)), Basis::Z, 5).unwrap();
        assert_eq!(g5.circuit.n_qubits, 15);
        let g7 = build_m(GadgetSpec::new(GadgetKind::MN(7)), Basis::Z, 7).unwrap();
        assert_eq!(g7.circuit.n_qubits, 28);
    }

    #[test]
    fn steane_has_seven_representatives() {
        let reps = steane_x_logicals();
        assert_eq!(reps.len(), 7);
    }
}
