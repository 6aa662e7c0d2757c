//! Acceptance run: one line per criterion, non-zero exit if any fails.

use ftqec::report::{reproduce, ReportConfig};

fn main() {
    let cfg = ReportConfig::default();
    let report = match reproduce(&cfg, &|s| eprintln!("[acceptance] {s}")) {
        Ok(r) => r,
        Err(e) => {
            println!("acceptance: pipeline error: {e}");
            std::process::exit(1);
        }
    };
    for c in &report.checks {
        println!("criterion {} {} ... {}: {}", c.id, c.name, if c.pass { "PASS" } else { "FAIL" }, c.detail);
    }
    let failed: Vec<u32> = report.failures().iter().map(|c| c.id).collect();
    if failed.is_empty() {
        println!("acceptance: all 8 criteria pass");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
