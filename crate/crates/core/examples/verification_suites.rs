//! Runs every verification suite at a small size and prints the checks.

use spinglass_lab::experiments::{verify_suite, SuiteParams, SUITES};

fn main() -> spinglass_lab::Result<()> {
    let mut all = true;
    for name in SUITES {
        let trials = if matches!(*name, "sstypemod" | "backmodify" | "decoupling") { 2000 } else { 50 };
        let r = verify_suite(name, &SuiteParams { trials: Some(trials), seed: 1, ..SuiteParams::default() })?;
        all &= r.passed;
        println!("{} {name} ({trials} trials)", if r.passed { "PASS" } else { "FAIL" });
        for c in &r.checks {
            println!("    {:<5} {:<34} {}", if c.passed { "ok" } else { "FAIL" }, c.name, c.detail);
        }
    }
    println!("all suites passed: {all}");
    Ok(())
}
