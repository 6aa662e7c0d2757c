//! The full reproduction pipeline: derived counts, thresholds under both
//! parameter sources, level iteration, encoder budget, cooling, magic-state
//! feasibility, Monte-Carlo cross-check and the acceptance list.

use std::time::Instant;

use serde::Serialize;

use crate::analytics::{
    self, eval_exrec_formulas, iterate_levels, measurement_recursion, msd_feasible, ExRecCounts, LevelTag, MsdFeasibility, ParamTable,
    Source, ThresholdResult, MEASUREMENT_THRESHOLD, QUOTED_A1_PRIME,
};
use crate::error::Error;
use crate::fault::{count_parameters, enumerate, fit_exponent, monte_carlo, CountOptions, CountReport, McResult, TripleMode};
use crate::gadgets::{build_circuit, GadgetKind, GadgetSpec};
use crate::oracle::{run_suite, CaseResult};
use crate::timing::TimingModel;

pub const TARGET_THRESHOLD: f64 = 3.76e-5;
pub const TARGET_TWO_QUBIT: f64 = 2.68e-5;
pub const TARGET_TWO_QUBIT_ALT: f64 = 2.69e-5;
pub const TARGET_ENCODER_BOUND: f64 = 8.32e-3;
pub const TARGET_COOLING_PG: f64 = 2.32e-6;
pub const TARGET_P6: f64 = 1e-13;
/// Fraction of the threshold granted to cooled preparations.
pub const PREP_SHARE: f64 = 0.75;

#[derive(Clone, Debug, Serialize)]
pub struct ReportConfig {
    pub seed: u64,
    /// Sampled triples per B estimate; 0 skips B.
    pub b_samples: u64,
    /// Monte-Carlo trials at the largest p; smaller p get proportionally more.
    pub mc_trials: u64,
    pub mc_ps: Vec<f64>,
    /// Enumerate the two-qubit exRecs to measure the level-1 inflation.
    pub two_qubit: bool,
    pub p0: f64,
    pub levels: usize,
    pub eps0: f64,
    pub rounds: u32,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            seed: 0,
            b_samples: 20_000,
            mc_trials: 1_000_000,
            mc_ps: vec![1e-4, 3e-4, 1e-3],
            two_qubit: true,
            p0: 2.82e-5,
            levels: 6,
            eps0: 0.01,
            rounds: 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FormulaSection {
    pub quoted_k1: ExRecCounts,
    pub quoted_kn: ExRecCounts,
    pub derived_k1: Option<ExRecCounts>,
    pub derived_kn: Option<ExRecCounts>,
    pub derived_table_k1: Option<ParamTable>,
    pub derived_table_kn: Option<ParamTable>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExRecSection {
    pub cnot: CountReport,
    pub cnot_higher: CountReport,
    pub vn: CountReport,
    pub btoff: CountReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdSection {
    /// Quoted level-1 coefficient with the k>1 formula value.
    pub quoted: ThresholdResult,
    /// Both levels straight from the printed polynomials.
    pub quoted_formula: ThresholdResult,
    pub derived: Option<ThresholdResult>,
    /// Derived threshold with B set to zero.
    pub derived_b0: Option<ThresholdResult>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwoQubitSection {
    pub a_cnot_native: u64,
    pub a_cnot_two_qubit: u64,
    pub a_btoff_two_qubit: u64,
    pub inflation: f64,
    pub quoted_driven: f64,
    pub derived_driven: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BudgetSection {
    pub p0: f64,
    pub p_levels: Vec<f64>,
    pub encoder_bound: f64,
    pub measurement_levels: Vec<f64>,
    pub measurement_threshold: f64,
    pub msd: MsdFeasibility,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoolingSection {
    pub eps0: f64,
    pub rounds: u32,
    pub eps: Vec<f64>,
    pub target: f64,
    pub required_pg: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct McSection {
    pub a_prime: f64,
    pub points: Vec<McResult>,
    pub exponent: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub config: ReportConfig,
    pub formulas: FormulaSection,
    pub exrecs: Option<ExRecSection>,
    pub thresholds: ThresholdSection,
    pub two_qubit: Option<TwoQubitSection>,
    pub budget: BudgetSection,
    pub cooling: CoolingSection,
    pub mc: Option<McSection>,
    pub timing_failures: Vec<String>,
    pub oracle: Vec<CaseResult>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn levels_csv(&self) -> String {
        analytics::levels_csv(&self.budget.p_levels)
    }

    pub fn cooling_csv(&self) -> String {
        analytics::cooling_csv(&self.cooling.eps)
    }

    pub fn mc_csv(&self) -> String {
        let mut s = String::from("p,trials,failures,estimate,wilson_low,wilson_high,bound\n");
        if let Some(mc) = &self.mc {
            for m in &mc.points {
                s.push_str(&format!("{:e},{},{},{:e},{:e},{:e},{:e}\n", m.p, m.trials, m.failures, m.estimate, m.wilson_low, m.wilson_high, mc.a_prime * m.p * m.p));
            }
        }
        s
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Parameter table from enumerated EC_full, EC_X and M_X counts.
pub fn derived_table(level: LevelTag, prep_faulty: bool) -> Result<ParamTable, Error> {
    let opts = CountOptions { prep_faulty, ..CountOptions::default() };
    let count = |k: GadgetKind| build_circuit(GadgetSpec::new(k)).map(|g| count_parameters(&g, &opts, None));
    let ec = count(GadgetKind::ECFull)?;
    let ecx = count(GadgetKind::ECX)?;
    let m = count(GadgetKind::MX)?;
    let get = |v: Option<u64>| v.unwrap_or(0);
    Ok(ParamTable {
        level,
        source: Source::Derived,
        a_ec: ec.a,
        u: get(ec.u),
        u_bar: get(ec.u_bar),
        alpha: get(ec.alpha),
        a_ecx: ecx.a,
        u_x: get(ecx.u),
        u_bar_x: get(ecx.u_bar),
        alpha_x: get(ecx.alpha),
        a_m: m.a,
        m: get(m.m),
        m_bar: get(m.m_bar),
        beta: get(m.beta),
    })
}

/// Threshold anchored on the quoted coefficients.
pub fn quoted_threshold() -> ThresholdSection {
    let kn = eval_exrec_formulas(&ParamTable::QUOTED_KN);
    let k1 = eval_exrec_formulas(&ParamTable::QUOTED_K1);
    ThresholdSection {
        quoted: analytics::threshold(QUOTED_A1_PRIME, 0.0, kn.a_cnot as f64, 0.0),
        quoted_formula: analytics::threshold(k1.a_cnot as f64, 0.0, kn.a_cnot as f64, 0.0),
        derived: None,
        derived_b0: None,
    }
}

pub fn budget(p0: f64, levels: usize) -> BudgetSection {
    let p_levels = iterate_levels(p0, QUOTED_A1_PRIME, eval_exrec_formulas(&ParamTable::QUOTED_KN).a_cnot as f64, levels);
    let encoder_bound = analytics::encoder_budget(&p_levels, levels);
    let measurement_levels = measurement_recursion(0.3, &vec![0.0; levels], &ParamTable::QUOTED_KN);
    BudgetSection { p0, p_levels, encoder_bound, measurement_levels, measurement_threshold: MEASUREMENT_THRESHOLD, msd: msd_feasible(encoder_bound) }
}

pub fn cooling(eps0: f64, rounds: u32, p_thresh: f64) -> CoolingSection {
    let target = PREP_SHARE * p_thresh;
    CoolingSection { eps0, rounds, eps: analytics::cooling_sequence(eps0, rounds), target, required_pg: analytics::required_gate_error(eps0, rounds, target) }
}

fn exrec(kind: GadgetKind, prep_faulty: bool, b_samples: u64, seed: u64) -> Result<(CountReport, crate::fault::Enumeration), Error> {
    let g = build_circuit(GadgetSpec::new(kind))?;
    let triples = if b_samples == 0 { TripleMode::Skip } else { TripleMode::Sample(b_samples) };
    Ok(enumerate(&g, &CountOptions { prep_faulty, triples, seed, ..CountOptions::default() }))
}

fn b_of(r: &CountReport) -> f64 {
    r.b.as_ref().map_or(0.0, |b| b.b)
}

/// Runs every stage. `log` receives one line per stage.
pub fn reproduce(cfg: &ReportConfig, log: &dyn Fn(&str)) -> Result<Report, Error> {
    let mut checks = Vec::new();

    // 1. printed polynomials
    let t0 = Instant::now();
    let quoted_k1 = eval_exrec_formulas(&ParamTable::QUOTED_K1);
    let quoted_kn = eval_exrec_formulas(&ParamTable::QUOTED_KN);
    let fast = t0.elapsed().as_secs_f64() < 1e-3;
    let want = (32640, 14586, 14493, 21294);
    let got = (quoted_k1.a_cnot, quoted_k1.a_btoff, quoted_k1.a_vn, quoted_kn.a_cnot);
    checks.push(Check {
        id: 1,
        name: "formula reproduction".into(),
        pass: got == want && fast,
        detail: format!("A_CNOT(1)={} A_bTOFF(1)={} A_VN(1)={} A_CNOT(k>1)={}", got.0, got.1, got.2, got.3),
    });

    log("deriving EC and M parameter tables");
    let derived_k1 = derived_table(LevelTag::One, true)?;
    let derived_kn = derived_table(LevelTag::Higher, false)?;
    let formulas = FormulaSection {
        quoted_k1,
        quoted_kn,
        derived_k1: Some(eval_exrec_formulas(&derived_k1)),
        derived_kn: Some(eval_exrec_formulas(&derived_kn)),
        derived_table_k1: Some(derived_k1),
        derived_table_kn: Some(derived_kn),
    };

    log("enumerating level-1 exRecs");
    let (cnot, cnot_en) = exrec(GadgetKind::ExRecCNOT, true, cfg.b_samples, cfg.seed)?;
    let (cnot_higher, _) = exrec(GadgetKind::ExRecCNOT, false, cfg.b_samples, cfg.seed ^ 1)?;
    let (vn, _) = exrec(GadgetKind::ExRecVN, true, 0, cfg.seed)?;
    let (btoff, _) = exrec(GadgetKind::ExRecBTOFF, true, 0, cfg.seed)?;

    // 2 and 5. thresholds
    let mut thresholds = quoted_threshold();
    let derived = analytics::threshold(cnot.a as f64, b_of(&cnot), cnot_higher.a as f64, b_of(&cnot_higher));
    thresholds.derived_b0 = Some(analytics::threshold(cnot.a as f64, 0.0, cnot_higher.a as f64, 0.0));
    thresholds.derived = Some(derived.clone());

    let two_qubit = if cfg.two_qubit {
        log("enumerating two-qubit exRecs");
        let count2 = |k: GadgetKind| build_circuit(GadgetSpec::new(k).two_qubit()).map(|g| count_parameters(&g, &CountOptions::default(), None));
        let c2 = count2(GadgetKind::ExRecCNOT)?;
        let b2 = count2(GadgetKind::ExRecBTOFF)?;
        let inflation = c2.a.max(b2.a) as f64 / cnot.a as f64;
        let quoted = &thresholds.quoted;
        Some(TwoQubitSection {
            a_cnot_native: cnot.a,
            a_cnot_two_qubit: c2.a,
            a_btoff_two_qubit: b2.a,
            inflation,
            quoted_driven: analytics::two_qubit_threshold(quoted.a1_prime, quoted.ak_prime, inflation),
            derived_driven: Some(analytics::two_qubit_threshold(derived.a1_prime, derived.ak_prime, inflation)),
        })
    } else {
        None
    };
    let p_quoted = thresholds.quoted.p_thresh;
    let (two_ok, two_detail) = match &two_qubit {
        Some(t) => (
            rel(t.quoted_driven, TARGET_TWO_QUBIT) <= 0.05,
            format!(
                "two-qubit {:.3e} (inflation {:.2}; off {:.0}% from 2.68e-5, {:.0}% from 2.69e-5)",
                t.quoted_driven,
                t.inflation,
                100.0 * rel(t.quoted_driven, TARGET_TWO_QUBIT),
                100.0 * rel(t.quoted_driven, TARGET_TWO_QUBIT_ALT)
            ),
        ),
        None => (false, "two-qubit pipeline not run".into()),
    };
    checks.push(Check {
        id: 2,
        name: "threshold reproduction".into(),
        pass: rel(p_quoted, TARGET_THRESHOLD) <= 0.01 && two_ok,
        detail: format!("p_thresh {:.3e} (off {:.2}%); {}", p_quoted, 100.0 * rel(p_quoted, TARGET_THRESHOLD), two_detail),
    });

    // 3. budget, cooling, measurement, MSD
    let budget = budget(cfg.p0, cfg.levels);
    let cooling = cooling(cfg.eps0, cfg.rounds, p_quoted);
    let p6 = *budget.p_levels.last().unwrap();
    let fixed = 3.0 * MEASUREMENT_THRESHOLD * MEASUREMENT_THRESHOLD;
    let ok3 = (p6 / TARGET_P6).log10().abs() <= 1.0
        && rel(budget.encoder_bound, TARGET_ENCODER_BOUND) <= 0.05
        && rel(cooling.required_pg, TARGET_COOLING_PG) <= 0.05
        && fixed == MEASUREMENT_THRESHOLD
        && budget.msd.h_distillable
        && budget.encoder_bound < analytics::h_distillation_limit();
    checks.push(Check {
        id: 3,
        name: "budget reproduction".into(),
        pass: ok3,
        detail: format!(
            "p6 {:.2e}, encoder {:.3e}, cooled p_g {:.3e}, measurement fixed point {}, below sin^2(pi/8): {}",
            p6, budget.encoder_bound, cooling.required_pg, MEASUREMENT_THRESHOLD, budget.msd.h_distillable
        ),
    });

    // 4. single faults and EC correction
    log("running EC oracle suite");
    let ec_cases = run_suite("ec", cfg.seed)?;
    let singles = (cnot.malignant_singles, btoff.malignant_singles, vn.malignant_singles);
    checks.push(Check {
        id: 4,
        name: "fault-tolerance property".into(),
        pass: singles == (0, 0, 0) && ec_cases.iter().all(|c| c.pass),
        detail: format!(
            "malignant singles CNOT/bTOFF/VN {}/{}/{}; EC oracle cases passing {}/{}",
            singles.0,
            singles.1,
            singles.2,
            ec_cases.iter().filter(|c| c.pass).count(),
            ec_cases.len()
        ),
    });

    // 5. derived plausibility and hierarchy
    let hier = vn.a <= cnot.a && btoff.a <= cnot.a;
    checks.push(Check {
        id: 5,
        name: "derived-count plausibility".into(),
        pass: (1.5e-5..=8e-5).contains(&derived.p_thresh) && hier,
        detail: format!(
            "derived p_thresh {:.3e} (A1 {} B1 {:.3e}, Ak {} Bk {:.3e}); A_VN {} A_bTOFF {} A_CNOT {}",
            derived.p_thresh,
            cnot.a,
            derived.b1,
            cnot_higher.a,
            derived.bk,
            vn.a,
            btoff.a,
            cnot.a
        ),
    });

    // 6. Monte Carlo
    let mc = if cfg.mc_trials > 0 {
        log("Monte-Carlo sampling of the CNOT exRec");
        let pmax = cfg.mc_ps.iter().cloned().fold(0.0, f64::max);
        let points: Vec<McResult> =
            cfg.mc_ps.iter().map(|&p| monte_carlo(&cnot_en, p, (cfg.mc_trials as f64 * pmax / p).round() as u64, cfg.seed)).collect();
        let exponent = fit_exponent(&points.iter().map(|m| (m.p, m.estimate)).collect::<Vec<_>>());
        Some(McSection { a_prime: derived.a1_prime, points, exponent })
    } else {
        None
    };
    let (ok6, d6) = match &mc {
        Some(mc) => {
            let bounded = mc.points.iter().all(|m| m.wilson_low <= mc.a_prime * m.p * m.p);
            let slope = mc.exponent.is_some_and(|e| (e - 2.0).abs() <= 0.2);
            let ratios: Vec<String> = mc.points.iter().map(|m| format!("{:.0}", m.estimate / (m.p * m.p))).collect();
            (bounded && slope, format!("p_fail/p^2 = [{}] vs A' {:.0}; exponent {:?}", ratios.join(", "), mc.a_prime, mc.exponent.map(|e| (e * 1000.0).round() / 1000.0)))
        }
        None => (false, "Monte Carlo not run".into()),
    };
    checks.push(Check { id: 6, name: "Monte-Carlo consistency".into(), pass: ok6, detail: d6 });

    // 7. oracle suites
    log("running oracle truth-table suites");
    let mut oracle = Vec::new();
    for s in ["majority", "parity", "cooling", "cat", "steane"] {
        oracle.extend(run_suite(s, cfg.seed)?);
    }
    let bad: Vec<String> = oracle.iter().filter(|c| !c.pass).map(|c| format!("{}/{}", c.suite, c.case)).collect();
    checks.push(Check {
        id: 7,
        name: "oracle suites".into(),
        pass: bad.is_empty(),
        detail: if bad.is_empty() { format!("{} cases exact", oracle.len()) } else { bad.join(", ") },
    });
    oracle.extend(ec_cases);

    // 8. timing
    let tm = TimingModel::from_circuits()?;
    let timing_failures: Vec<String> = (1..=10).flat_map(|k| tm.check(k)).collect();
    checks.push(Check {
        id: 8,
        name: "timing calculus".into(),
        pass: timing_failures.is_empty() && tm.gate(0) == 1,
        detail: if timing_failures.is_empty() { format!("k=1..10 hold; T(G(1))={}", tm.gate(1)) } else { timing_failures.join(", ") },
    });

    Ok(Report {
        config: cfg.clone(),
        formulas,
        exrecs: Some(ExRecSection { cnot, cnot_higher, vn, btoff }),
        thresholds,
        two_qubit,
        budget,
        cooling,
        mc,
        timing_failures,
        oracle,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoted_side_numbers() {
        let t = quoted_threshold();
        assert!(rel(t.quoted.p_thresh, 3.77e-5) < 0.005);
        let b = budget(2.82e-5, 6);
        assert!(rel(b.encoder_bound, TARGET_ENCODER_BOUND) < 0.05);
        assert!((b.p_levels[6] / 1e-13).log10().abs() < 1.0);
        let c = cooling(0.01, 2, t.quoted.p_thresh);
        assert!(rel(c.required_pg, TARGET_COOLING_PG) < 0.05);
    }
}
