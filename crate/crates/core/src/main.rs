use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ftqec::analytics;
use ftqec::fault::{count_parameters, enumerate, monte_carlo, CountOptions, TripleMode};
use ftqec::gadgets::{build, build_circuit, Gadget, GadgetKind, GadgetSpec};
use ftqec::oracle::run_suite;
use ftqec::report::{self, ReportConfig};
use ftqec::Error;

#[derive(Parser)]
#[command(name = "ftqec", version, about = "Measurement-free fault-tolerant EC toolkit for the Bacon-Shor code")]
struct Cli {
    /// Print only the JSON report on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Params {
    Paper,
    Derived,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a gadget circuit (level 1) or its schematic (higher levels).
    Build {
        #[arg(long)]
        gadget: String,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long)]
        two_qubit: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive fault counting on a level-1 gadget.
    Count {
        #[arg(long)]
        gadget: String,
        #[arg(long)]
        two_qubit: bool,
        /// Treat preparations as fault-free.
        #[arg(long)]
        no_prep_faults: bool,
        /// Sampled triples for B (0 skips).
        #[arg(long, default_value_t = 0)]
        triples: u64,
    },
    /// Threshold from the quoted or the derived parameter tables.
    Threshold {
        #[arg(long, value_enum, default_value = "paper")]
        params: Params,
        #[arg(long)]
        two_qubit: bool,
        #[arg(long, default_value_t = 20_000)]
        b_samples: u64,
    },
    /// Level iteration and encoder budget.
    Budget {
        #[arg(long, default_value_t = 2.82e-5)]
        p0: f64,
        #[arg(long, default_value_t = 6)]
        levels: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Algorithmic cooling scenario.
    Cooling {
        #[arg(long, default_value_t = 0.01)]
        eps0: f64,
        #[arg(long, default_value_t = 2)]
        rounds: u32,
        /// Gate error used to evaluate the cooled preparation error.
        #[arg(long)]
        pg: Option<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Monte-Carlo failure rate of a level-1 gadget.
    Mc {
        #[arg(long, default_value = "exrec_cnot")]
        gadget: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },
    /// Run exact-simulation suites.
    Verify {
        #[arg(long, default_value = "oracle")]
        suite: String,
    },
    /// Full pipeline with acceptance checks.
    Reproduce {
        #[arg(long, default_value = "report")]
        out: PathBuf,
        /// Skip the two-qubit enumeration.
        #[arg(long)]
        native_only: bool,
        #[arg(long, default_value_t = 20_000)]
        b_samples: u64,
        #[arg(long, default_value_t = 1_000_000)]
        mc_trials: u64,
    },
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
    } else {
        println!("{}", text());
    }
}

fn write(path: &PathBuf, body: &str) -> Result<(), Error> {
    std::fs::write(path, body).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn spec(name: &str, two_qubit: bool) -> Result<GadgetSpec, Error> {
    let s = GadgetSpec::new(GadgetKind::parse(name)?);
    Ok(if two_qubit { s.two_qubit() } else { s })
}

fn run(cli: Cli) -> Result<bool, Error> {
    let json = cli.json;
    let log = |s: &str| {
        if !json {
            eprintln!("{s}");
        }
    };
    match cli.cmd {
        Cmd::Build { gadget, level, two_qubit, out } => {
            let text = match build(spec(&gadget, two_qubit)?.at_level(level))? {
                Gadget::Circuit(g) => g.circuit.serialize(),
                Gadget::Schematic(s) => s.render(),
            };
            match out {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
        }
        Cmd::Count { gadget, two_qubit, no_prep_faults, triples } => {
            let g = build_circuit(spec(&gadget, two_qubit)?)?;
            let triples = if triples == 0 { TripleMode::Skip } else { TripleMode::Sample(triples) };
            let opts = CountOptions { prep_faulty: !no_prep_faults, triples, seed: cli.seed, ..CountOptions::default() };
            let r = count_parameters(&g, &opts, None);
            emit(json, &r, || {
                let f = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
                let mut s = format!(
                    "{}: {} locations, A = {}, u = {}, u_bar = {}, alpha = {}, m = {}, m_bar = {}, beta = {}, malignant singles = {}",
                    g.spec.kind.name(),
                    r.n_locations,
                    r.a,
                    f(r.u),
                    f(r.u_bar),
                    f(r.alpha),
                    f(r.m),
                    f(r.m_bar),
                    f(r.beta),
                    r.malignant_singles
                );
                if let Some(b) = &r.b {
                    s.push_str(&format!(", B ~ {:.4e} ({} of {} sampled triples)", b.b, b.malignant, b.sampled));
                }
                s
            });
        }
        Cmd::Threshold { params, two_qubit, b_samples } => {
            let quoted = report::quoted_threshold();
            let mut value = serde_json::json!({ "quoted": quoted.quoted, "quoted_formula": quoted.quoted_formula });
            let mut result = match params {
                Params::Paper => quoted.quoted.clone(),
                Params::Derived => {
                    log("enumerating CNOT exRec");
                    let g = build_circuit(GadgetSpec::new(GadgetKind::ExRecCNOT))?;
                    let triples = if b_samples == 0 { TripleMode::Skip } else { TripleMode::Sample(b_samples) };
                    let opts = CountOptions { triples, seed: cli.seed, ..CountOptions::default() };
                    let (r1, _) = enumerate(&g, &opts);
                    let (rk, _) = enumerate(&g, &CountOptions { prep_faulty: false, seed: cli.seed ^ 1, ..opts });
                    let b = |r: &ftqec::fault::CountReport| r.b.as_ref().map_or(0.0, |b| b.b);
                    let t = analytics::threshold(r1.a as f64, b(&r1), rk.a as f64, b(&rk));
                    value["derived"] = serde_json::to_value(&t).expect("serializable");
                    t
                }
            };
            if two_qubit {
                log("enumerating two-qubit exRecs");
                let native = count_parameters(&build_circuit(GadgetSpec::new(GadgetKind::ExRecCNOT))?, &CountOptions::default(), None).a;
                let a2 = |k| build_circuit(GadgetSpec::new(k).two_qubit()).map(|g| count_parameters(&g, &CountOptions::default(), None).a);
                let inflation = a2(GadgetKind::ExRecCNOT)?.max(a2(GadgetKind::ExRecBTOFF)?) as f64 / native as f64;
                let p = analytics::two_qubit_threshold(result.a1_prime, result.ak_prime, inflation);
                value["two_qubit"] = serde_json::json!({ "inflation": inflation, "p_thresh": p });
                result.a1_prime *= inflation;
                result.p_thresh = p;
            }
            value["p_thresh"] = serde_json::json!(result.p_thresh);
            emit(json, &value, || format!("A'1 = {:.1}, A'k = {:.1}, p_thresh = {:.3e}", result.a1_prime, result.ak_prime, result.p_thresh));
        }
        Cmd::Budget { p0, levels, csv } => {
            let b = report::budget(p0, levels);
            if let Some(p) = csv {
                write(&p, &analytics::levels_csv(&b.p_levels))?;
            }
            emit(json, &b, || {
                let mut s = String::new();
                for (k, p) in b.p_levels.iter().enumerate() {
                    s.push_str(&format!("p({k}) = {p:.3e}\n"));
                }
                s.push_str(&format!("encoder bound at level {levels}: {:.3e} (sin^2(pi/8) = {:.4})", b.encoder_bound, analytics::h_distillation_limit()));
                s
            });
        }
        Cmd::Cooling { eps0, rounds, pg, csv } => {
            let c = report::cooling(eps0, rounds, report::quoted_threshold().quoted.p_thresh);
            if let Some(p) = csv {
                write(&p, &analytics::cooling_csv(&c.eps))?;
            }
            let cooled = pg.map(|pg| analytics::cooled_prep_error(eps0, rounds, pg));
            let value = serde_json::json!({ "cooling": c, "pg": pg, "cooled_prep_error": cooled });
            emit(json, &value, || {
                let mut s = format!("eps after {rounds} rounds: {:.3e}; required p_g for {:.3e}: {:.3e}", c.eps[rounds as usize], c.target, c.required_pg);
                if let Some(e) = cooled {
                    s.push_str(&format!("\ncooled preparation error at p_g = {:e}: {e:.3e}", pg.unwrap()));
                }
                s
            });
        }
        Cmd::Mc { gadget, p, trials } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("p = {p} outside [0, 1]")));
            }
            let g = build_circuit(spec(&gadget, false)?)?;
            let (_, en) = enumerate(&g, &CountOptions::default());
            let m = monte_carlo(&en, p, trials, cli.seed);
            emit(json, &m, || format!("p = {:e}: {} / {} failed, rate {:.3e} [{:.3e}, {:.3e}]", m.p, m.failures, m.trials, m.estimate, m.wilson_low, m.wilson_high));
        }
        Cmd::Verify { suite } => {
            let cases = run_suite(&suite, cli.seed)?;
            let ok = cases.iter().all(|c| c.pass);
            emit(json, &cases, || {
                cases.iter().map(|c| format!("{} {}/{}: {}", if c.pass { "PASS" } else { "FAIL" }, c.suite, c.case, c.detail)).collect::<Vec<_>>().join("\n")
            });
            return Ok(ok);
        }
        Cmd::Reproduce { out, native_only, b_samples, mc_trials } => {
            let cfg = ReportConfig { seed: cli.seed, b_samples, mc_trials, two_qubit: !native_only, ..ReportConfig::default() };
            let r = report::reproduce(&cfg, &log)?;
            std::fs::create_dir_all(&out).map_err(|e| Error::InvalidArgument(format!("{}: {e}", out.display())))?;
            let body = serde_json::to_string_pretty(&r).expect("serializable");
            write(&out.join("report.json"), &body)?;
            write(&out.join("levels.csv"), &r.levels_csv())?;
            write(&out.join("cooling.csv"), &r.cooling_csv())?;
            write(&out.join("mc.csv"), &r.mc_csv())?;
            if json {
                println!("{body}");
            } else {
                for c in &r.checks {
                    println!("{} {}. {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.name, c.detail);
                }
            }
            if !r.all_pass() {
                let ids: Vec<u32> = r.failures().iter().map(|c| c.id).collect();
                eprintln!("{}", serde_json::json!({ "failed": ids }));
            }
            return Ok(r.all_pass());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("FTQEC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
