//! Timed circuits over the physical gate library.
//!
//! A circuit is a list of steps. A qubit is live from its first gate (a
//! preparation, or step 0 for inputs) to its last gate; while live it carries
//! exactly one gate per step, idling being an explicit `WAIT`. Discarded and
//! measured qubits may end early, every other qubit is an output and stays
//! live until the final step.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Z,
    H,
    CNOT,
    TOFFOLI,
    ZTOFFOLI,
    /// NOT controlled by two or more qubits; last operand is the target.
    MCX,
    /// Controlled square root of X, and its inverse.
    CV,
    CVDG,
    PREP0,
    PREPPLUS,
    PREPH,
    MEASX,
    MEASZ,
    WAIT,
}

impl GateKind {
    pub const ALL: [GateKind; 15] = [
        GateKind::X,
        GateKind::Z,
        GateKind::H,
        GateKind::CNOT,
        GateKind::TOFFOLI,
        GateKind::ZTOFFOLI,
        GateKind::MCX,
        GateKind::CV,
        GateKind::CVDG,
        GateKind::PREP0,
        GateKind::PREPPLUS,
        GateKind::PREPH,
        GateKind::MEASX,
        GateKind::MEASZ,
        GateKind::WAIT,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::H => "H",
            GateKind::CNOT => "CNOT",
            GateKind::TOFFOLI => "TOFFOLI",
            GateKind::ZTOFFOLI => "ZTOFFOLI",
            GateKind::MCX => "MCX",
            GateKind::CV => "CV",
            GateKind::CVDG => "CVDG",
            GateKind::PREP0 => "PREP0",
            GateKind::PREPPLUS => "PREPPLUS",
            GateKind::PREPH => "PREPH",
            GateKind::MEASX => "MEASX",
            GateKind::MEASZ => "MEASZ",
            GateKind::WAIT => "WAIT",
        }
    }

    /// Required operand count; `None` for variable arity (`MCX`, at least 3).
    pub fn arity(self) -> Option<usize> {
        match self {
            GateKind::CNOT | GateKind::CV | GateKind::CVDG => Some(2),
            GateKind::TOFFOLI | GateKind::ZTOFFOLI => Some(3),
            GateKind::MCX => None,
            _ => Some(1),
        }
    }

    pub fn is_prep(self) -> bool {
        matches!(self, GateKind::PREP0 | GateKind::PREPPLUS | GateKind::PREPH)
    }

    pub fn is_meas(self) -> bool {
        matches!(self, GateKind::MEASX | GateKind::MEASZ)
    }
}

impl FromStr for GateKind {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        GateKind::ALL.iter().copied().find(|k| k.name() == s).ok_or(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    /// Controls first, target last.
    pub qubits: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Self {
        Gate { kind, qubits: qubits.to_vec() }
    }
    pub fn one(kind: GateKind, q: usize) -> Self {
        Gate { kind, qubits: vec![q] }
    }
    pub fn cnot(c: usize, t: usize) -> Self {
        Gate { kind: GateKind::CNOT, qubits: vec![c, t] }
    }
    pub fn toffoli(c1: usize, c2: usize, t: usize) -> Self {
        Gate { kind: GateKind::TOFFOLI, qubits: vec![c1, c2, t] }
    }
    pub fn ztoffoli(c1: usize, c2: usize, t: usize) -> Self {
        Gate { kind: GateKind::ZTOFFOLI, qubits: vec![c1, c2, t] }
    }
    pub fn wait(q: usize) -> Self {
        Gate::one(GateKind::WAIT, q)
    }

    fn check(&self, n: usize) -> Result<(), String> {
        let ok_arity = match self.kind.arity() {
            Some(a) => self.qubits.len() == a,
            None => self.qubits.len() >= 3,
        };
        if !ok_arity {
            return Err(format!("{} takes {} operands, got {}", self.kind.name(), self.kind.arity().map_or("3+".to_string(), |a| a.to_string()), self.qubits.len()));
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= n {
                return Err(format!("qubit {q} out of range"));
            }
            if self.qubits[..i].contains(&q) {
                return Err(format!("repeated operand {q}"));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        for q in &self.qubits {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Data,
    Ancilla,
    Verifier,
}

impl Role {
    fn letter(self) -> char {
        match self {
            Role::Data => 'd',
            Role::Ancilla => 'a',
            Role::Verifier => 'v',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub steps: Vec<Vec<Gate>>,
    pub discard: BTreeSet<usize>,
    pub roles: Vec<Role>,
}

/// A fault site: one gate in one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Location {
    pub step: usize,
    pub gate: usize,
}

/// One invariant violation found by [`Circuit::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub step: usize,
    pub qubit: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.qubit {
            Some(q) => write!(f, "step {}, qubit {}: {}", self.step, q, self.message),
            None => write!(f, "step {}: {}", self.step, self.message),
        }
    }
}

impl Circuit {
    pub fn empty(n_qubits: usize) -> Self {
        Circuit { n_qubits, steps: Vec::new(), discard: BTreeSet::new(), roles: vec![Role::Data; n_qubits] }
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    pub fn gate(&self, loc: Location) -> &Gate {
        &self.steps[loc.step][loc.gate]
    }

    pub fn locations(&self) -> impl Iterator<Item = Location> + '_ {
        self.steps.iter().enumerate().flat_map(|(s, gates)| (0..gates.len()).map(move |g| Location { step: s, gate: g }))
    }

    pub fn location_count(&self) -> usize {
        self.steps.iter().map(Vec::len).sum()
    }

    /// Number of (step, qubit) slots covered by gates.
    pub fn live_slots(&self) -> usize {
        self.steps.iter().flatten().map(|g| g.qubits.len()).sum()
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        self.steps.iter().flatten().filter(|g| g.kind == kind).count()
    }

    /// Qubits whose first gate is not a preparation.
    pub fn inputs(&self) -> Vec<usize> {
        let mut first = vec![None; self.n_qubits];
        for gates in &self.steps {
            for g in gates {
                for &q in &g.qubits {
                    if first[q].is_none() {
                        first[q] = Some(g.kind.is_prep());
                    }
                }
            }
        }
        (0..self.n_qubits).filter(|&q| first[q] != Some(true)).collect()
    }

    /// Qubits alive after the final step.
    pub fn outputs(&self) -> Vec<usize> {
        let measured: BTreeSet<usize> = self.steps.iter().flatten().filter(|g| g.kind.is_meas()).flat_map(|g| g.qubits.clone()).collect();
        (0..self.n_qubits).filter(|q| !self.discard.contains(q) && !measured.contains(q)).collect()
    }

    /// Empty list iff every structural invariant holds.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let last = self.steps.len().saturating_sub(1);
        let mut seen: Vec<Vec<usize>> = vec![Vec::new(); self.n_qubits];
        let mut ended = vec![false; self.n_qubits];
        if self.roles.len() != self.n_qubits {
            out.push(Violation { step: 0, qubit: None, message: format!("{} roles for {} qubits", self.roles.len(), self.n_qubits) });
        }
        for &q in &self.discard {
            if q >= self.n_qubits {
                out.push(Violation { step: 0, qubit: Some(q), message: "discarded qubit out of range".into() });
            }
        }
        for (s, gates) in self.steps.iter().enumerate() {
            let mut used = BTreeSet::new();
            for g in gates {
                if let Err(m) = g.check(self.n_qubits) {
                    out.push(Violation { step: s, qubit: g.qubits.first().copied(), message: m });
                    continue;
                }
                for &q in &g.qubits {
                    if !used.insert(q) {
                        out.push(Violation { step: s, qubit: Some(q), message: "qubit used by two gates in one step".into() });
                    }
                    if ended[q] {
                        out.push(Violation { step: s, qubit: Some(q), message: "gate after measurement".into() });
                    }
                    if g.kind.is_prep() && !seen[q].is_empty() {
                        out.push(Violation { step: s, qubit: Some(q), message: "preparation after first use".into() });
                    }
                    if !g.kind.is_prep() && seen[q].is_empty() && s != 0 {
                        out.push(Violation { step: s, qubit: Some(q), message: "input qubit idle before its first gate".into() });
                    }
                    if let Some(&prev) = seen[q].last() {
                        if prev + 1 != s {
                            out.push(Violation { step: s, qubit: Some(q), message: format!("idle without WAIT since step {prev}") });
                        }
                    }
                    seen[q].push(s);
                    if g.kind.is_meas() {
                        ended[q] = true;
                    }
                }
            }
        }
        if !self.steps.is_empty() {
            for q in 0..self.n_qubits {
                if self.discard.contains(&q) || ended[q] {
                    continue;
                }
                match seen[q].last() {
                    Some(&l) if l == last => {}
                    _ => out.push(Violation { step: last, qubit: Some(q), message: "output qubit not live at final step".into() }),
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Canonical text form; see the crate README for the grammar.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        writeln!(s, "qubits {}", self.n_qubits).unwrap();
        s.push_str("roles ");
        s.extend(self.roles.iter().map(|r| r.letter()));
        s.push('\n');
        if !self.discard.is_empty() {
            s.push_str("discard");
            for q in &self.discard {
                write!(s, " {q}").unwrap();
            }
            s.push('\n');
        }
        for (i, gates) in self.steps.iter().enumerate() {
            write!(s, "step {i}:").unwrap();
            for (j, g) in gates.iter().enumerate() {
                if j > 0 {
                    s.push(';');
                }
                write!(s, " {g}").unwrap();
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Circuit, Error> {
        let perr = |line: usize, token: &str, reason: &str| Error::Parse { line, token: token.to_string(), reason: reason.to_string() };
        let mut n: Option<usize> = None;
        let mut c = Circuit::empty(0);
        let mut roles_seen = false;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (head, rest) = line.split_once(' ').unwrap_or((line, ""));
            match head {
                "qubits" => {
                    let v = rest.trim().parse::<usize>().map_err(|_| perr(line_no, rest.trim(), "expected a qubit count"))?;
                    n = Some(v);
                    c = Circuit::empty(v);
                }
                "roles" => {
                    let nq = n.ok_or_else(|| perr(line_no, head, "roles before qubits"))?;
                    let letters: Vec<char> = rest.trim().chars().collect();
                    if letters.len() != nq {
                        return Err(perr(line_no, rest.trim(), "one role letter per qubit expected"));
                    }
                    c.roles = letters
                        .iter()
                        .map(|ch| match ch {
                            'd' => Ok(Role::Data),
                            'a' => Ok(Role::Ancilla),
                            'v' => Ok(Role::Verifier),
                            other => Err(perr(line_no, &other.to_string(), "role must be d, a or v")),
                        })
                        .collect::<Result<_, _>>()?;
                    roles_seen = true;
                }
                "discard" => {
                    let nq = n.ok_or_else(|| perr(line_no, head, "discard before qubits"))?;
                    for tok in rest.split_whitespace() {
                        let q = tok.parse::<usize>().map_err(|_| perr(line_no, tok, "expected a qubit index"))?;
                        if q >= nq {
                            return Err(perr(line_no, tok, "qubit out of range"));
                        }
                        c.discard.insert(q);
                    }
                }
                "step" => {
                    let nq = n.ok_or_else(|| perr(line_no, head, "step before qubits"))?;
                    let (label, body) = rest.split_once(':').ok_or_else(|| perr(line_no, rest, "missing ':'"))?;
                    let t = label.trim().parse::<usize>().map_err(|_| perr(line_no, label.trim(), "expected a step index"))?;
                    if t != c.steps.len() {
                        return Err(perr(line_no, label.trim(), "steps must be numbered consecutively from 0"));
                    }
                    let mut gates = Vec::new();
                    for part in body.split(';') {
                        let mut toks = part.split_whitespace();
                        let Some(name) = toks.next() else { continue };
                        let kind = name.parse::<GateKind>().map_err(|_| perr(line_no, name, "unknown gate"))?;
                        let mut qubits = Vec::new();
                        for tok in toks {
                            let q = tok.parse::<usize>().map_err(|_| perr(line_no, tok, "expected a qubit index"))?;
                            if q >= nq {
                                return Err(perr(line_no, tok, "qubit out of range"));
                            }
                            if qubits.contains(&q) {
                                return Err(perr(line_no, tok, "repeated operand"));
                            }
                            qubits.push(q);
                        }
                        let g = Gate { kind, qubits };
                        g.check(nq).map_err(|m| perr(line_no, name, &m))?;
                        gates.push(g);
                    }
                    c.steps.push(gates);
                }
                other => return Err(perr(line_no, other, "unknown directive")),
            }
        }
        if n.is_none() {
            return Err(perr(1, "", "missing `qubits` header"));
        }
        if !roles_seen {
            c.roles = vec![Role::Data; c.n_qubits];
        }
        Ok(c)
    }
}

/// Packs gates into the earliest legal step, preparing fresh qubits just in
/// time, then fills idle live slots with `WAIT`.
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    n: usize,
    roles: Vec<Role>,
    discard: BTreeSet<usize>,
    placed: Vec<(usize, Gate)>,
    ready: Vec<usize>,
    pending_prep: Vec<Option<GateKind>>,
    floor: usize,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        CircuitBuilder { n: 0, roles: Vec::new(), discard: BTreeSet::new(), placed: Vec::new(), ready: Vec::new(), pending_prep: Vec::new(), floor: 0 }
    }

    /// Adds an input qubit, live from step 0.
    pub fn input(&mut self, role: Role) -> usize {
        self.roles.push(role);
        self.ready.push(0);
        self.pending_prep.push(None);
        self.n += 1;
        self.n - 1
    }

    pub fn inputs(&mut self, role: Role, count: usize) -> Vec<usize> {
        (0..count).map(|_| self.input(role)).collect()
    }

    /// Adds a qubit prepared by `kind` in the step just before its first use.
    /// The preparation may overlap the step before the current barrier.
    pub fn fresh(&mut self, kind: GateKind, role: Role) -> usize {
        assert!(kind.is_prep());
        self.roles.push(role);
        self.ready.push(1.max(self.floor));
        self.pending_prep.push(Some(kind));
        self.n += 1;
        self.n - 1
    }

    pub fn fresh_many(&mut self, kind: GateKind, role: Role, count: usize) -> Vec<usize> {
        (0..count).map(|_| self.fresh(kind, role)).collect()
    }

    /// Places the pending preparation of `q` now, at its earliest step.
    pub fn prep_now(&mut self, q: usize) {
        if let Some(kind) = self.pending_prep[q].take() {
            let s = self.ready[q] - 1;
            self.placed.push((s, Gate::one(kind, q)));
        }
    }

    pub fn discard(&mut self, q: usize) {
        self.discard.insert(q);
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Next step every gate added from now on must respect.
    pub fn barrier(&mut self) {
        self.floor = self.depth();
        for r in self.ready.iter_mut() {
            *r = (*r).max(self.floor);
        }
    }

    pub fn depth(&self) -> usize {
        self.placed.iter().map(|(s, _)| s + 1).max().unwrap_or(0)
    }

    pub fn push(&mut self, gate: Gate) -> usize {
        let s = gate.qubits.iter().map(|&q| self.ready[q]).max().unwrap_or(0).max(self.floor);
        for &q in &gate.qubits {
            if let Some(kind) = self.pending_prep[q].take() {
                self.placed.push((s - 1, Gate::one(kind, q)));
            }
            self.ready[q] = s + 1;
        }
        self.placed.push((s, gate));
        s
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) {
        for g in gates {
            self.push(g);
        }
    }

    pub fn build(mut self) -> Circuit {
        for q in 0..self.n {
            self.prep_now(q);
        }
        let depth = self.depth();
        let mut steps: Vec<Vec<Gate>> = vec![Vec::new(); depth];
        let mut first = vec![usize::MAX; self.n];
        let mut last = vec![0usize; self.n];
        let mut is_input = vec![true; self.n];
        let mut measured = vec![false; self.n];
        for (s, g) in self.placed {
            for &q in &g.qubits {
                first[q] = first[q].min(s);
                last[q] = last[q].max(s);
                if g.kind.is_prep() {
                    is_input[q] = false;
                }
                if g.kind.is_meas() {
                    measured[q] = true;
                }
            }
            steps[s].push(g);
        }
        let mut busy = vec![vec![false; self.n]; depth];
        for (s, gates) in steps.iter().enumerate() {
            for g in gates {
                for &q in &g.qubits {
                    busy[s][q] = true;
                }
            }
        }
        for q in 0..self.n {
            if depth == 0 {
                break;
            }
            let start = if is_input[q] { 0 } else { first[q] };
            let end = if self.discard.contains(&q) || measured[q] {
                if first[q] == usize::MAX {
                    continue;
                }
                last[q]
            } else {
                depth - 1
            };
            for s in start..=end {
                if !busy[s][q] {
                    steps[s].push(Gate::wait(q));
                }
            }
        }
        for gates in steps.iter_mut() {
            gates.sort_by_key(|g| g.qubits[0]);
        }
        Circuit { n_qubits: self.n, steps, discard: self.discard, roles: self.roles }
    }
}

impl Default for CircuitBuilder {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_circuit_is_valid() {
        assert!(Circuit::empty(3).is_valid());
    }

    #[test]
    fn shared_target_is_a_violation() {
        let mut c = Circuit::empty(3);
        c.steps.push(vec![Gate::cnot(0, 2), Gate::cnot(1, 2)]);
        let v = c.validate();
        assert!(v.iter().any(|v| v.step == 0 && v.qubit == Some(2)), "{v:?}");
    }

    #[test]
    fn one_qubit_prep_wait() {
        let mut c = Circuit::empty(1);
        c.steps.push(vec![Gate::one(GateKind::PREP0, 0)]);
        c.steps.push(vec![Gate::wait(0)]);
        assert!(c.is_valid());
        let text = c.serialize();
        assert_eq!(text, "qubits 1\nroles d\nstep 0: PREP0 0\nstep 1: WAIT 0\n");
        assert_eq!(text.lines().filter(|l| l.starts_with("step")).count(), 2);
        assert_eq!(Circuit::parse(&text).unwrap(), c);
    }

    #[test]
    fn repeated_operand_rejected_with_line() {
        let err = Circuit::parse("qubits 2\nstep 0: CNOT 0 0\n").unwrap_err();
        match err {
            Error::Parse { line, token, .. } => {
                assert_eq!(line, 2);
                assert_eq!(token, "0");
            }
            other => panic!("{other:?}"),
        }
        assert!(Circuit::parse("qubits 2\nstep 0: FOO 1\n").is_err());
        assert!(Circuit::parse("qubits 2\nstep 0: CNOT 0 5\n").is_err());
    }

    #[test]
    fn builder_prepares_just_in_time() {
        let mut b = CircuitBuilder::new();
        let d = b.inputs(Role::Data, 2);
        b.push(Gate::cnot(d[0], d[1]));
        b.push(Gate::cnot(d[0], d[1]));
        let a = b.fresh(GateKind::PREP0, Role::Ancilla);
        b.push(Gate::cnot(d[1], a));
        b.discard(a);
        let c = b.build();
        assert!(c.is_valid(), "{:?}", c.validate());
        assert_eq!(c.depth(), 3);
        assert_eq!(c.steps[1].iter().find(|g| g.qubits == vec![a]).unwrap().kind, GateKind::PREP0);
        assert_eq!(c.count_kind(GateKind::WAIT), 1);
    }

    fn arb_circuit() -> impl Strategy<Value = Circuit> {
        (1usize..7, 1usize..6, proptest::collection::vec(any::<u32>(), 1..40)).prop_map(|(n_in, n_fresh, ops)| {
            let mut b = CircuitBuilder::new();
            let mut qs = b.inputs(Role::Data, n_in);
            for i in 0..n_fresh {
                let kind = if i % 2 == 0 { GateKind::PREP0 } else { GateKind::PREPPLUS };
                let q = b.fresh(kind, Role::Ancilla);
                qs.push(q);
            }
            let n = qs.len();
            for op in ops {
                let a = (op as usize) % n;
                let bq = (op as usize / 7) % n;
                let c = (op as usize / 49) % n;
                match op % 5 {
                    0 => {
                        b.push(Gate::one(GateKind::H, a));
                    }
                    1 if a != bq => {
                        b.push(Gate::cnot(a, bq));
                    }
                    2 if a != bq && bq != c && a != c => {
                        b.push(Gate::toffoli(a, bq, c));
                    }
                    3 => {
                        b.push(Gate::one(GateKind::X, a));
                    }
                    _ => {}
                }
            }
            for q in n_in..n {
                if q % 2 == 0 {
                    b.discard(q);
                }
            }
            b.build()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn round_trip_is_identity(c in arb_circuit()) {
            prop_assert!(c.is_valid(), "{:?}", c.validate());
            let text = c.serialize();
            let back = Circuit::parse(&text).unwrap();
            prop_assert_eq!(&back, &c);
            prop_assert_eq!(back.serialize(), text);
        }

        #[test]
        fn locations_partition_live_slots(c in arb_circuit()) {
            let mut slots = std::collections::HashSet::new();
            for loc in c.locations() {
                for &q in &c.gate(loc).qubits {
                    prop_assert!(slots.insert((loc.step, q)));
                }
            }
            prop_assert_eq!(slots.len(), c.live_slots());
        }
    }
}
