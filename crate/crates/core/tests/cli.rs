//! Command-line behaviour: exit codes, round trips, determinism.

use std::process::Command;

use ftqec::circuit::Circuit;

fn ftqec(args: &[&str], threads: &str) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_ftqec")).args(args).env("FTQEC_THREADS", threads).output().expect("binary runs")
}

#[test]
fn build_output_parses_back() {
    let out = ftqec(&["build", "--gadget", "M_X", "--level", "1"], "1");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let c = Circuit::parse(&text).unwrap();
    assert!(c.is_valid());
    assert_eq!(c.serialize(), text);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(ftqec(&["frobnicate"], "1").status.code(), Some(2));
    assert_eq!(ftqec(&["build", "--gadget", "nope"], "1").status.code(), Some(2));
    assert_eq!(ftqec(&["verify", "--suite", "nope"], "1").status.code(), Some(2));
    assert_eq!(ftqec(&["mc", "--p", "2"], "1").status.code(), Some(2));
}

#[test]
fn quoted_threshold_report() {
    let out = ftqec(&["threshold", "--params", "paper", "--json"], "1");
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let p = v["p_thresh"].as_f64().unwrap();
    assert!((p - 3.77e-5).abs() / 3.77e-5 < 0.005, "{p}");
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let args = ["mc", "--gadget", "M_X", "--p", "0.01", "--trials", "20000", "--seed", "5", "--json"];
    let a = ftqec(&args, "1");
    let b = ftqec(&args, "3");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let a = ftqec(&["budget", "--json"], "1");
    let b = ftqec(&["budget", "--json"], "2");
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_prints_a_line_per_case() {
    let out = ftqec(&["verify", "--suite", "cooling"], "1");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);
}

#[test]
fn cooling_and_budget_csv() {
    let dir = tempfile::tempdir().unwrap();
    let levels = dir.path().join("levels.csv");
    let eps = dir.path().join("eps.csv");
    assert!(ftqec(&["budget", "--csv", levels.to_str().unwrap()], "1").status.success());
    assert!(ftqec(&["cooling", "--csv", eps.to_str().unwrap()], "1").status.success());
    assert_eq!(std::fs::read_to_string(levels).unwrap().lines().count(), 8);
    assert_eq!(std::fs::read_to_string(eps).unwrap().lines().next(), Some("round,eps"));
}
