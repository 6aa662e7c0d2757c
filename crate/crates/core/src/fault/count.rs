//! Exhaustive single and pair fault enumeration, sampled triples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::GateKind;
use crate::gadgets::{BlockCode, GadgetCircuit, GadgetSpec};
use crate::pauli::Pauli;

use super::ideal::assignments;
use super::judge::Judge;
use super::propagate::{Engine, FaultEvent, Frame, Touch};

#[derive(Clone, Debug)]
pub(crate) struct Single {
    pub frames: Vec<Frame>,
    pub trace: Vec<Touch>,
}

/// Single-fault results of one gadget under one control assignment.
#[derive(Clone, Debug)]
pub(crate) struct Table {
    pub engine: Engine,
    pub alphabets: Vec<Vec<Frame>>,
    pub singles: Vec<Vec<Single>>,
}

impl Table {
    fn new(engine: Engine, prep_faulty: bool) -> Self {
        let n = engine.n_locations();
        let alphabets: Vec<Vec<Frame>> = (0..n)
            .map(|i| {
                let k = engine.gates[i].kind;
                if !prep_faulty && matches!(k, GateKind::PREP0 | GateKind::PREPPLUS | GateKind::PREPH) {
                    Vec::new()
                } else {
                    engine.alphabet(i)
                }
            })
            .collect();
        let singles = (0..n)
            .into_par_iter()
            .map(|i| {
                alphabets[i]
                    .iter()
                    .map(|&f| {
                        let (frames, trace) = engine.run_traced(Frame::ID, &[FaultEvent { location: i, frame: f }]);
                        Single { frames, trace }
                    })
                    .collect()
            })
            .collect();
        Table { engine, alphabets, singles }
    }

    /// Residual frames of two faults at distinct locations.
    pub(crate) fn pair(&self, i: usize, a: usize, j: usize, b: usize) -> Vec<Frame> {
        let sa = &self.singles[i][a];
        let sb = &self.singles[j][b];
        if self.engine.traces_compatible(&sa.trace, &sb.trace) {
            let mut out = Vec::with_capacity(sa.frames.len() * sb.frames.len());
            for fa in &sa.frames {
                for fb in &sb.frames {
                    out.push(*fa ^ *fb);
                }
            }
            out
        } else {
            self.engine.run(
                Frame::ID,
                &[FaultEvent { location: i, frame: self.alphabets[i][a] }, FaultEvent { location: j, frame: self.alphabets[j][b] }],
            )
        }
    }

    fn pair_fails(&self, judge: &Judge, i: usize, j: usize) -> bool {
        for a in 0..self.alphabets[i].len() {
            for b in 0..self.alphabets[j].len() {
                if self.pair(i, a, j, b).iter().any(|f| judge.fails(f)) {
                    return true;
                }
            }
        }
        false
    }

    /// Locations where some fault, together with an incoming frame, fails.
    fn with_incoming(&self, judge: &Judge, incoming: Frame) -> usize {
        let (base, trace) = self.engine.run_traced(incoming, &[]);
        (0..self.alphabets.len())
            .filter(|&i| {
                (0..self.alphabets[i].len()).any(|a| {
                    let s = &self.singles[i][a];
                    let frames: Vec<Frame> = if self.engine.traces_compatible(&trace, &s.trace) {
                        base.iter().flat_map(|fa| s.frames.iter().map(move |fb| *fa ^ *fb)).collect()
                    } else {
                        self.engine.run(incoming, &[FaultEvent { location: i, frame: self.alphabets[i][a] }])
                    };
                    frames.iter().any(|f| judge.fails(f))
                })
            })
            .count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TripleMode {
    Skip,
    Sample(u64),
    Exhaustive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountOptions {
    /// When false, preparation locations never fail.
    pub prep_faulty: bool,
    pub triples: TripleMode,
    /// Random fault assignments tried per sampled triple without a malignant pair.
    pub triple_tries: u32,
    pub seed: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { prep_faulty: true, triples: TripleMode::Skip, triple_tries: 16, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleEstimate {
    pub sampled: u64,
    pub malignant: u64,
    pub total_triples: f64,
    /// Estimated number of malignant triples.
    pub b: f64,
    pub exhaustive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub gadget: GadgetSpec,
    pub n_locations: usize,
    pub n_fault_assignments: usize,
    pub prep_faulty: bool,
    pub a: u64,
    pub u: Option<u64>,
    pub u_bar: Option<u64>,
    pub alpha: Option<u64>,
    pub m: Option<u64>,
    pub m_bar: Option<u64>,
    pub beta: Option<u64>,
    pub malignant_singles: u64,
    pub b: Option<TripleEstimate>,
    pub notes: Vec<String>,
}

/// Everything the enumeration learnt about a gadget, kept for reuse by the
/// Monte-Carlo sampler.
pub struct Enumeration {
    pub(crate) tables: Vec<Table>,
    pub(crate) judge: Judge,
    /// Row i lists, as a bitset, the j > i forming a malignant pair with i.
    pub(crate) malignant_pairs: Vec<Vec<u64>>,
}

impl Enumeration {
    pub fn new(gc: &GadgetCircuit, prep_faulty: bool) -> Self {
        let tables: Vec<Table> = assignments(gc).iter().map(|iv| Table::new(Engine::new(gc, iv), prep_faulty)).collect();
        Enumeration { tables, judge: Judge::new(gc), malignant_pairs: Vec::new() }
    }

    pub fn n_locations(&self) -> usize {
        self.tables[0].alphabets.len()
    }

    fn pairs(&mut self, progress: Option<&(dyn Fn(usize, usize) + Sync)>) {
        let n = self.n_locations();
        let words = n.div_ceil(64);
        let done = std::sync::atomic::AtomicUsize::new(0);
        let rows: Vec<Vec<u64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row = vec![0u64; words];
                for j in i + 1..n {
                    if self.tables.iter().any(|t| t.pair_fails(&self.judge, i, j)) {
                        row[j / 64] |= 1 << (j % 64);
                    }
                }
                let d = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                if let Some(p) = progress {
                    p(d, n);
                }
                row
            })
            .collect();
        self.malignant_pairs = rows;
    }

    pub(crate) fn is_malignant_pair(&self, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.malignant_pairs[a][b / 64] >> (b % 64) & 1 == 1
    }

    pub fn pair_count(&self) -> u64 {
        self.malignant_pairs.iter().flatten().map(|w| w.count_ones() as u64).sum()
    }

    fn triple_fails(&self, locs: [usize; 3], faults: [usize; 3], table: &Table) -> bool {
        let evs: Vec<FaultEvent> = (0..3).map(|k| FaultEvent { location: locs[k], frame: table.alphabets[locs[k]][faults[k]] }).collect();
        table.engine.run(Frame::ID, &evs).iter().any(|f| self.judge.fails(f))
    }

    fn triple_malignant_exhaustive(&self, t: [usize; 3]) -> bool {
        if self.is_malignant_pair(t[0], t[1]) || self.is_malignant_pair(t[0], t[2]) || self.is_malignant_pair(t[1], t[2]) {
            return true;
        }
        self.tables.iter().any(|tab| {
            let [a, b, c] = t.map(|l| tab.alphabets[l].len());
            (0..a).any(|x| (0..b).any(|y| (0..c).any(|z| self.triple_fails(t, [x, y, z], tab))))
        })
    }

    fn triples(&self, mode: TripleMode, tries: u32, seed: u64) -> Option<TripleEstimate> {
        let n = self.n_locations();
        let nf = n as f64;
        let total = nf * (nf - 1.0) * (nf - 2.0) / 6.0;
        let faulty: Vec<usize> = (0..n).filter(|&i| !self.tables[0].alphabets[i].is_empty()).collect();
        match mode {
            TripleMode::Skip => None,
            TripleMode::Exhaustive => {
                let m = faulty.len();
                let count: u64 = (0..m)
                    .into_par_iter()
                    .map(|a| {
                        let mut c = 0u64;
                        for b in a + 1..m {
                            for cc in b + 1..m {
                                if self.triple_malignant_exhaustive([faulty[a], faulty[b], faulty[cc]]) {
                                    c += 1;
                                }
                            }
                        }
                        c
                    })
                    .sum();
                Some(TripleEstimate { sampled: (m * (m.saturating_sub(1)) * (m.saturating_sub(2)) / 6) as u64, malignant: count, total_triples: total, b: count as f64, exhaustive: true })
            }
            TripleMode::Sample(samples) => {
                let m = faulty.len();
                if m < 3 {
                    return Some(TripleEstimate { sampled: 0, malignant: 0, total_triples: total, b: 0.0, exhaustive: false });
                }
                let hits: u64 = (0..samples)
                    .into_par_iter()
                    .map(|s| {
                        let mut rng = ChaCha8Rng::seed_from_u64(super::mc::mix(seed, s));
                        let t = loop {
                            let t = [0, 0, 0].map(|_| faulty[rng.gen_range(0..m)]);
                            if t[0] != t[1] && t[0] != t[2] && t[1] != t[2] {
                                break t;
                            }
                        };
                        if self.is_malignant_pair(t[0], t[1]) || self.is_malignant_pair(t[0], t[2]) || self.is_malignant_pair(t[1], t[2]) {
                            return 1;
                        }
                        for _ in 0..tries {
                            let tab = &self.tables[rng.gen_range(0..self.tables.len())];
                            let f = t.map(|l| rng.gen_range(0..tab.alphabets[l].len()));
                            if self.triple_fails(t, f, tab) {
                                return 1;
                            }
                        }
                        0
                    })
                    .sum();
                let mf = m as f64;
                let faulty_total = mf * (mf - 1.0) * (mf - 2.0) / 6.0;
                Some(TripleEstimate { sampled: samples, malignant: hits, total_triples: total, b: faulty_total * hits as f64 / samples as f64, exhaustive: false })
            }
        }
    }
}

fn is_repetition_gadget(gc: &GadgetCircuit) -> bool {
    gc.outputs.iter().all(|b| matches!(b.code, BlockCode::Repetition(_)))
}

/// Single-failure statistics: (u, u_bar, alpha) in the block code's sense.
fn single_stats(en: &Enumeration, gc: &GadgetCircuit) -> (u64, u64, u64, u64) {
    let n = en.n_locations();
    let outs = en.judge.output_qubits();
    let mut u = 0u64;
    let mut malignant = 0u64;
    let mut only_on = vec![0u64; outs.len()];
    for i in 0..n {
        let mut nontrivial = false;
        let mut sole: Option<Option<usize>> = None;
        for t in &en.tables {
            for s in &t.singles[i] {
                for f in &s.frames {
                    if en.judge.fails(f) {
                        malignant += 1;
                    }
                    if en.judge.nontrivial(f) {
                        nontrivial = true;
                        let sup = en.judge.support(f);
                        let this = if sup.len() == 1 { Some(sup[0]) } else { None };
                        sole = match sole {
                            None => Some(this),
                            Some(prev) if prev == this => Some(prev),
                            Some(_) => Some(None),
                        };
                    }
                }
            }
        }
        if nontrivial {
            u += 1;
            if let Some(Some(q)) = sole {
                if let Some(k) = outs.iter().position(|&o| o == q) {
                    only_on[k] += 1;
                }
            }
        }
    }
    let u_bar = u - only_on.iter().copied().max().unwrap_or(0);
    let mut alpha = 0u64;
    for blk in &gc.inputs {
        for &q in &blk.qubits {
            for p in Pauli::NONTRIVIAL {
                let inc = Frame::single(q, p);
                let c = en.tables.iter().map(|t| t.with_incoming(&en.judge, inc)).max().unwrap_or(0) as u64;
                alpha = alpha.max(c);
            }
        }
    }
    (u, u_bar, alpha, malignant)
}

/// Full parameter count of a level-1 gadget.
pub fn count_parameters(gc: &GadgetCircuit, opts: &CountOptions, progress: Option<&(dyn Fn(usize, usize) + Sync)>) -> CountReport {
    let mut en = Enumeration::new(gc, opts.prep_faulty);
    en.pairs(progress);
    report_from(&en, gc, opts)
}

pub(crate) fn report_from(en: &Enumeration, gc: &GadgetCircuit, opts: &CountOptions) -> CountReport {
    let (u, u_bar, alpha, malignant_singles) = single_stats(en, gc);
    let rep = is_repetition_gadget(gc);
    let mut notes = Vec::new();
    if en.tables.len() > 1 {
        notes.push(format!("worst case over {} assignments of the logical control values", en.tables.len()));
    }
    if !opts.prep_faulty {
        notes.push("preparation locations treated as fault-free".into());
    }
    let b = en.triples(opts.triples, opts.triple_tries, opts.seed);
    if let Some(t) = &b {
        if !t.exhaustive {
            notes.push(format!("B sampled from {} triples out of C(n,3) = {:.0}; bracket [0, {:.0}]", t.sampled, t.total_triples, t.b));
        }
    }
    let n_fault_assignments = en.tables[0].alphabets.iter().map(Vec::len).sum();
    CountReport {
        gadget: gc.spec,
        n_locations: en.n_locations(),
        n_fault_assignments,
        prep_faulty: opts.prep_faulty,
        a: en.pair_count(),
        u: (!rep).then_some(u),
        u_bar: (!rep).then_some(u_bar),
        alpha: (!rep).then_some(alpha),
        m: rep.then_some(u),
        m_bar: rep.then_some(u_bar),
        beta: rep.then_some(alpha),
        malignant_singles,
        b,
        notes,
    }
}

/// Count plus the enumeration, for callers that sample afterwards.
pub fn enumerate(gc: &GadgetCircuit, opts: &CountOptions) -> (CountReport, Enumeration) {
    let mut en = Enumeration::new(gc, opts.prep_faulty);
    en.pairs(None);
    let r = report_from(&en, gc, opts);
    (r, en)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{build_circuit, GadgetKind};

    #[test]
    fn xor_combination_matches_joint_runs() {
        for spec in [GadgetSpec::new(GadgetKind::ECFull), GadgetSpec::new(GadgetKind::ECX).two_qubit(), GadgetSpec::new(GadgetKind::MX).two_qubit()] {
            let g = build_circuit(spec).unwrap();
            let t = Table::new(Engine::new(&g, &crate::fault::ideal::assignments(&g)[0]), true);
            let n = t.alphabets.len();
            let mut checked = 0;
            for i in (0..n).step_by(3) {
                for j in (i + 1..n).step_by(5) {
                    for a in 0..t.alphabets[i].len() {
                        for b in 0..t.alphabets[j].len() {
                            let mut fast = t.pair(i, a, j, b);
                            fast.sort_unstable();
                            fast.dedup();
                            let exact = t.engine.run(
                                Frame::ID,
                                &[FaultEvent { location: i, frame: t.alphabets[i][a] }, FaultEvent { location: j, frame: t.alphabets[j][b] }],
                            );
                            assert_eq!(fast, exact, "{:?} locations {i} {j}", spec.kind);
                            checked += 1;
                        }
                    }
                }
            }
            assert!(checked > 1000);
        }
    }

    #[test]
    fn m3_has_no_malignant_singles() {
        let g = build_circuit(GadgetSpec::new(GadgetKind::MX)).unwrap();
        let r = count_parameters(&g, &CountOptions { triples: TripleMode::Exhaustive, ..Default::default() }, None);
        assert_eq!(r.malignant_singles, 0);
        assert!(r.a > 0);
        assert!(r.m.unwrap() >= r.m_bar.unwrap());
        let b = r.b.unwrap();
        assert!(b.malignant as f64 <= b.total_triples);
    }

    #[test]
    fn a_is_bounded_by_location_pairs() {
        let g = build_circuit(GadgetSpec::new(GadgetKind::ECX)).unwrap();
        let r = count_parameters(&g, &CountOptions::default(), None);
        let n = r.n_locations as u64;
        assert!(r.a <= n * (n - 1) / 2);
        assert_eq!(r.malignant_singles, 0);
        assert!(r.u.unwrap() >= r.u_bar.unwrap());
    }
}
