//! Code definitions and the ideal-decoder judgment.
//!
//! Every code here is CSS, so membership in the stabilizer/gauge group and
//! logical classification split into independent X and Z problems over GF(2).

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::pauli::PauliString;

/// Basis of a repetition code: `Z` protects against bit flips (`a|000> + b|111>`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CodeName {
    BaconShor3x3,
    Repetition { distance: usize, basis: Basis },
    Steane,
}

/// Logical class of a residual error.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LogicalVerdict {
    I,
    X,
    Z,
    Y,
    Uncorrectable,
}

impl LogicalVerdict {
    fn from_flags(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => LogicalVerdict::I,
            (true, false) => LogicalVerdict::X,
            (false, true) => LogicalVerdict::Z,
            (true, true) => LogicalVerdict::Y,
        }
    }
}

/// A GF(2) row space with a cached reduced basis, used for membership tests.
#[derive(Clone, Debug)]
struct Span {
    /// (pivot bit, row) pairs in echelon form.
    rows: Vec<(u32, u128)>,
}

impl Span {
    fn new(gens: impl IntoIterator<Item = u128>) -> Self {
        let mut s = Span { rows: Vec::new() };
        for g in gens {
            s.insert(g);
        }
        s
    }

    fn reduce(&self, mut v: u128) -> u128 {
        for &(pivot, row) in &self.rows {
            if v >> pivot & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    fn insert(&mut self, v: u128) {
        let r = self.reduce(v);
        if r != 0 {
            let pivot = 127 - r.leading_zeros();
            for entry in self.rows.iter_mut() {
                if entry.1 >> pivot & 1 == 1 {
                    entry.1 ^= r;
                }
            }
            self.rows.push((pivot, r));
        }
    }

    fn contains(&self, v: u128) -> bool {
        self.reduce(v) == 0
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }
}

#[derive(Clone, Debug)]
pub struct CodeDef {
    pub name: CodeName,
    pub n: usize,
    pub stabilizers: Vec<PauliString>,
    pub gauge_ops: Vec<PauliString>,
    pub logical_x: PauliString,
    pub logical_z: PauliString,
    x_group: Span,
    z_group: Span,
    /// Z-type checks used by the ideal decoder for X errors (and vice versa).
    z_checks: Vec<u128>,
    x_checks: Vec<u128>,
    x_table: Vec<u128>,
    z_table: Vec<u128>,
}

/// Qubit index of `(row, col)` in the 3x3 array, rows and columns from 0.
pub fn bs_index(row: usize, col: usize) -> usize {
    3 * row + col
}

impl CodeDef {
    fn assemble(
        name: CodeName,
        n: usize,
        stabilizers: Vec<PauliString>,
        gauge_ops: Vec<PauliString>,
        logical_x: PauliString,
        logical_z: PauliString,
    ) -> Self {
        let all = stabilizers.iter().chain(gauge_ops.iter());
        let x_group = Span::new(all.clone().map(|p| p.x_mask()).filter(|&m| m != 0));
        let z_group = Span::new(all.map(|p| p.z_mask()).filter(|&m| m != 0));
        let z_checks: Vec<u128> = stabilizers.iter().map(|s| s.z_mask()).filter(|&m| m != 0).collect();
        let x_checks: Vec<u128> = stabilizers.iter().map(|s| s.x_mask()).filter(|&m| m != 0).collect();
        let x_table = decoder_table(n, &z_checks);
        let z_table = decoder_table(n, &x_checks);
        CodeDef { name, n, stabilizers, gauge_ops, logical_x, logical_z, x_group, z_group, z_checks, x_checks, x_table, z_table }
    }

    /// The 9-qubit Bacon-Shor code on a 3x3 array, qubit `3*row + col`.
    ///
    /// X stabilizers act on column pairs, Z stabilizers on row pairs; gauge
    /// operators are X pairs inside a row and Z pairs inside a column.
    pub fn bacon_shor() -> Self {
        let n = 9;
        let col = |c: usize| (0..3).map(move |r| bs_index(r, c));
        let row = |r: usize| (0..3).map(move |c| bs_index(r, c));
        let stabilizers = vec![
            PauliString::x_on(n, &col(0).chain(col(1)).collect::<Vec<_>>()),
            PauliString::x_on(n, &col(1).chain(col(2)).collect::<Vec<_>>()),
            PauliString::z_on(n, &row(0).chain(row(1)).collect::<Vec<_>>()),
            PauliString::z_on(n, &row(1).chain(row(2)).collect::<Vec<_>>()),
        ];
        let mut gauge_ops = Vec::new();
        for r in 0..3 {
            for c in 0..2 {
                gauge_ops.push(PauliString::x_on(n, &[bs_index(r, c), bs_index(r, c + 1)]));
            }
        }
        for c in 0..3 {
            for r in 0..2 {
                gauge_ops.push(PauliString::z_on(n, &[bs_index(r, c), bs_index(r + 1, c)]));
            }
        }
        let logical_x = PauliString::x_on(n, &col(0).collect::<Vec<_>>());
        let logical_z = PauliString::z_on(n, &row(0).collect::<Vec<_>>());
        Self::assemble(CodeName::BaconShor3x3, n, stabilizers, gauge_ops, logical_x, logical_z)
    }

    /// Repetition code. `Basis::Z` is the bit-flip code with `ZZ` checks.
    pub fn repetition(distance: usize, basis: Basis) -> Self {
        assert!(distance >= 1 && distance <= 127);
        let n = distance;
        let all: Vec<usize> = (0..n).collect();
        let (stabilizers, logical_x, logical_z) = match basis {
            Basis::Z => (
                (0..n - 1).map(|i| PauliString::z_on(n, &[i, i + 1])).collect(),
                PauliString::x_on(n, &all),
                PauliString::z_on(n, &[0]),
            ),
            Basis::X => (
                (0..n - 1).map(|i| PauliString::x_on(n, &[i, i + 1])).collect(),
                PauliString::x_on(n, &[0]),
                PauliString::z_on(n, &all),
            ),
        };
        Self::assemble(CodeName::Repetition { distance, basis }, n, stabilizers, Vec::new(), logical_x, logical_z)
    }

    /// Concatenated repetition code with `3^levels` qubits, bit-flip basis.
    pub fn repetition_concatenated(levels: u32) -> Self {
        let n = 3usize.pow(levels);
        Self::repetition(n, Basis::Z)
    }

    /// Steane [[7,1,3]] code with the Hamming parity checks.
    pub fn steane() -> Self {
        let n = 7;
        let checks = ["IIIXXXX", "IXXIIXX", "XIXIXIX"];
        let mut stabilizers = Vec::new();
        for c in checks {
            stabilizers.push(PauliString::parse(c).unwrap());
        }
        for c in checks {
            stabilizers.push(PauliString::parse(&c.replace('X', "Z")).unwrap());
        }
        let all: Vec<usize> = (0..n).collect();
        Self::assemble(CodeName::Steane, n, stabilizers, Vec::new(), PauliString::x_on(n, &all), PauliString::z_on(n, &all))
    }

    fn check_size(&self, e: &PauliString) -> Result<(), Error> {
        if e.n() != self.n {
            Err(Error::SizeMismatch { left: self.n, right: e.n() })
        } else {
            Ok(())
        }
    }

    /// Classifies `e` modulo the stabilizer and gauge group.
    pub fn reduce_mod_gauge(&self, e: &PauliString) -> Result<LogicalVerdict, Error> {
        self.check_size(e)?;
        let xl = self.logical_x.x_mask();
        let zl = self.logical_z.z_mask();
        let x_class = if self.x_group.contains(e.x_mask()) {
            false
        } else if self.x_group.contains(e.x_mask() ^ xl) {
            true
        } else {
            return Ok(LogicalVerdict::Uncorrectable);
        };
        let z_class = if self.z_group.contains(e.z_mask()) {
            false
        } else if self.z_group.contains(e.z_mask() ^ zl) {
            true
        } else {
            return Ok(LogicalVerdict::Uncorrectable);
        };
        Ok(LogicalVerdict::from_flags(x_class, z_class))
    }

    /// Logical class left after an ideal minimum-weight decoder acts on `e`.
    pub fn decode(&self, e: &PauliString) -> Result<LogicalVerdict, Error> {
        self.check_size(e)?;
        let x_left = e.x_mask() ^ self.x_table[syndrome(&self.z_checks, e.x_mask())];
        let z_left = e.z_mask() ^ self.z_table[syndrome(&self.x_checks, e.z_mask())];
        let r = PauliString::from_masks(self.n, x_left, z_left)?;
        self.reduce_mod_gauge(&r)
    }

    /// True iff an ideal decoder maps `e` back to the logical identity.
    pub fn correctable_by_ideal_ec(&self, e: &PauliString) -> Result<bool, Error> {
        Ok(self.decode(e)? == LogicalVerdict::I)
    }

    /// Fast X-sector decode on a raw mask: true iff a logical X remains.
    pub fn x_failure(&self, x: u128) -> bool {
        let left = x ^ self.x_table[syndrome(&self.z_checks, x)];
        !self.x_group.contains(left)
    }

    /// Fast Z-sector decode on a raw mask: true iff a logical Z remains.
    pub fn z_failure(&self, z: u128) -> bool {
        let left = z ^ self.z_table[syndrome(&self.x_checks, z)];
        !self.z_group.contains(left)
    }

    /// Every correction an ideal decoder can apply, one per syndrome, as
    /// (x mask, z mask).
    pub fn recovery_table(&self) -> Vec<(u128, u128)> {
        self.x_table.iter().flat_map(|&x| self.z_table.iter().map(move |&z| (x, z))).collect()
    }

    /// True iff the X mask lies in the stabilizer-and-gauge group.
    pub fn x_in_group(&self, x: u128) -> bool {
        self.x_group.contains(x)
    }

    pub fn z_in_group(&self, z: u128) -> bool {
        self.z_group.contains(z)
    }

    /// Basis of the X-type stabilizer-and-gauge masks.
    pub fn x_group_basis(&self) -> Vec<u128> {
        self.x_group.rows.iter().map(|r| r.1).collect()
    }

    pub fn z_group_basis(&self) -> Vec<u128> {
        self.z_group.rows.iter().map(|r| r.1).collect()
    }

    /// Dimension of the X-type part of the stabilizer-and-gauge group.
    pub fn x_group_dim(&self) -> usize {
        self.x_group.dim()
    }

    /// All X-type logical representatives of minimum weight.
    pub fn min_weight_logical_x(&self) -> Vec<PauliString> {
        let gens: Vec<u128> = self.x_group.rows.iter().map(|r| r.1).collect();
        let mut best: Vec<u128> = Vec::new();
        let mut best_w = u32::MAX;
        for sel in 0u64..(1u64 << gens.len()) {
            let mut m = self.logical_x.x_mask();
            for (i, g) in gens.iter().enumerate() {
                if sel >> i & 1 == 1 {
                    m ^= g;
                }
            }
            let w = m.count_ones();
            if w < best_w {
                best_w = w;
                best.clear();
            }
            if w == best_w && !best.contains(&m) {
                best.push(m);
            }
        }
        best.sort();
        best.into_iter().map(|m| PauliString::from_masks(self.n, m, 0).unwrap()).collect()
    }
}

fn syndrome(checks: &[u128], v: u128) -> usize {
    checks.iter().enumerate().fold(0, |acc, (i, c)| acc | (((c & v).count_ones() as usize & 1) << i))
}

/// Minimum-weight correction per syndrome, found by enumerating errors by weight.
fn decoder_table(n: usize, checks: &[u128]) -> Vec<u128> {
    let size = 1usize << checks.len();
    let mut table = vec![None; size];
    table[0] = Some(0u128);
    let mut filled = 1;
    let mut weight = 1;
    while filled < size && weight <= n {
        for_each_combination(n, weight, |m| {
            let s = syndrome(checks, m);
            if table[s].is_none() {
                table[s] = Some(m);
                filled += 1;
            }
        });
        weight += 1;
    }
    table.into_iter().map(|t| t.unwrap_or(0)).collect()
}

fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(u128)) {
    fn rec(start: usize, n: usize, k: usize, acc: u128, f: &mut dyn FnMut(u128)) {
        if k == 0 {
            f(acc);
            return;
        }
        for i in start..n {
            rec(i + 1, n, k - 1, acc | 1 << i, f);
        }
    }
    rec(0, n, k, 0, &mut f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;

    fn brute_force_decoder_ok(code: &CodeDef, e: &PauliString) -> bool {
        // Independent decoder: try every correction of weight <= 1 in each
        // sector that clears the syndrome, keep the lightest, then check the
        // remainder commutes with both logicals and lies in the group.
        let clear = |checks: &[PauliString], part: PauliString| -> Option<PauliString> {
            let mut cands = vec![PauliString::identity(code.n)];
            for q in 0..code.n {
                for p in [Pauli::X, Pauli::Z] {
                    cands.push(PauliString::single(code.n, q, p));
                }
            }
            cands.into_iter().find(|c| {
                let r = part * *c;
                checks.iter().all(|s| s.commutes_with(&r))
            })
        };
        let xpart = e.x_part();
        let zpart = e.z_part();
        let cx = match clear(&code.stabilizers, xpart) {
            Some(c) => c.x_part(),
            None => return false,
        };
        let cz = match clear(&code.stabilizers, zpart) {
            Some(c) => c.z_part(),
            None => return false,
        };
        let r = *e * cx * cz;
        r.commutes_with(&code.logical_x) && r.commutes_with(&code.logical_z)
    }

    #[test]
    fn bacon_shor_commutation_structure() {
        let c = CodeDef::bacon_shor();
        for s in &c.stabilizers {
            for t in c.stabilizers.iter().chain(&c.gauge_ops) {
                assert!(s.commutes_with(t));
            }
            assert!(s.commutes_with(&c.logical_x));
            assert!(s.commutes_with(&c.logical_z));
        }
        for g in &c.gauge_ops {
            assert!(g.commutes_with(&c.logical_x));
            assert!(g.commutes_with(&c.logical_z));
        }
        assert!(!c.logical_x.commutes_with(&c.logical_z));
        assert_eq!(c.stabilizers[0].to_string(), "XXIXXIXXI");
        assert_eq!(c.stabilizers[2].to_string(), "ZZZZZZIII");
    }

    #[test]
    fn gauge_pair_and_logicals() {
        let c = CodeDef::bacon_shor();
        let e = PauliString::x_on(9, &[bs_index(1, 0), bs_index(1, 1)]);
        assert_eq!(c.reduce_mod_gauge(&e).unwrap(), LogicalVerdict::I);
        let col = PauliString::x_on(9, &[0, 3, 6]);
        assert_eq!(c.reduce_mod_gauge(&col).unwrap(), LogicalVerdict::X);
        assert_eq!(c.reduce_mod_gauge(&PauliString::identity(9)).unwrap(), LogicalVerdict::I);
        let single = PauliString::single(9, 4, Pauli::X);
        assert_eq!(c.reduce_mod_gauge(&single).unwrap(), LogicalVerdict::Uncorrectable);
    }

    #[test]
    fn all_single_paulis_correctable() {
        let c = CodeDef::bacon_shor();
        for q in 0..9 {
            for p in Pauli::NONTRIVIAL {
                let e = PauliString::single(9, q, p);
                assert!(brute_force_decoder_ok(&c, &e));
                assert!(c.correctable_by_ideal_ec(&e).unwrap(), "{e}");
            }
        }
    }

    #[test]
    fn weight_two_matches_brute_force() {
        let c = CodeDef::bacon_shor();
        let ps = [Pauli::X, Pauli::Y, Pauli::Z];
        for a in 0..9 {
            for b in a + 1..9 {
                for &pa in &ps {
                    for &pb in &ps {
                        let mut e = PauliString::identity(9);
                        e.set(a, pa);
                        e.set(b, pb);
                        assert_eq!(c.correctable_by_ideal_ec(&e).unwrap(), brute_force_decoder_ok(&c, &e), "{e}");
                    }
                }
            }
        }
        let same_col = PauliString::x_on(9, &[bs_index(0, 0), bs_index(1, 0)]);
        assert!(!c.correctable_by_ideal_ec(&same_col).unwrap());
    }

    #[test]
    fn verdicts_compose_as_pauli_classes() {
        let c = CodeDef::bacon_shor();
        let mut errs = vec![PauliString::identity(9)];
        for a in 0..9 {
            for pa in Pauli::NONTRIVIAL {
                errs.push(PauliString::single(9, a, pa));
                for b in a + 1..9 {
                    for pb in Pauli::NONTRIVIAL {
                        let mut e = PauliString::single(9, a, pa);
                        e.set(b, pb);
                        errs.push(e);
                    }
                }
            }
        }
        let class = |v: LogicalVerdict| match v {
            LogicalVerdict::I => Some((false, false)),
            LogicalVerdict::X => Some((true, false)),
            LogicalVerdict::Z => Some((false, true)),
            LogicalVerdict::Y => Some((true, true)),
            LogicalVerdict::Uncorrectable => None,
        };
        let classified: Vec<_> = errs
            .iter()
            .filter_map(|e| class(c.reduce_mod_gauge(e).unwrap()).map(|k| (*e, k)))
            .collect();
        assert!(classified.len() > 1);
        for (a, ka) in &classified {
            for (b, kb) in &classified {
                let kab = class(c.reduce_mod_gauge(&(*a * *b)).unwrap()).unwrap();
                assert_eq!(kab, (ka.0 ^ kb.0, ka.1 ^ kb.1));
            }
        }
        for g in c.stabilizers.iter().chain(&c.gauge_ops) {
            for l in [c.logical_x, c.logical_z, c.logical_x * c.logical_z] {
                assert_eq!(c.reduce_mod_gauge(&(*g * l)).unwrap(), c.reduce_mod_gauge(&l).unwrap());
            }
        }
    }

    #[test]
    fn row_and_column_permutations_preserve_verdicts() {
        let c = CodeDef::bacon_shor();
        let perms = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [1, 2, 0]];
        let apply = |e: &PauliString, rp: &[usize; 3], cp: &[usize; 3]| {
            let mut out = PauliString::identity(9);
            for r in 0..3 {
                for col in 0..3 {
                    out.set(bs_index(rp[r], cp[col]), e.get(bs_index(r, col)));
                }
            }
            out
        };
        let mut errs = Vec::new();
        for a in 0..9 {
            for b in 0..9 {
                for p in Pauli::NONTRIVIAL {
                    let mut e = PauliString::single(9, a, p);
                    e.set(b, Pauli::X);
                    errs.push(e);
                }
            }
        }
        for e in &errs {
            let v = c.decode(e).unwrap();
            for rp in &perms {
                for cp in &perms {
                    assert_eq!(c.decode(&apply(e, rp, cp)).unwrap(), v);
                }
            }
        }
    }

    #[test]
    fn repetition_majority() {
        let c = CodeDef::repetition(3, Basis::Z);
        for pattern in 0u128..8 {
            let e = PauliString::from_masks(3, pattern, 0).unwrap();
            let flagged = c.decode(&e).unwrap() == LogicalVerdict::X;
            assert_eq!(flagged, pattern.count_ones() >= 2, "pattern {pattern:03b}");
        }
    }

    #[test]
    fn steane_has_seven_weight_three_logicals() {
        let c = CodeDef::steane();
        let reps = c.min_weight_logical_x();
        assert_eq!(reps.len(), 7);
        assert!(reps.iter().all(|r| r.weight() == 3));
        for r in &reps {
            for s in &c.stabilizers {
                assert!(r.commutes_with(s));
            }
            assert_eq!(c.reduce_mod_gauge(r).unwrap(), LogicalVerdict::X);
        }
    }
}
