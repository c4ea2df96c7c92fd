//! The acceptance battery, one line per criterion. Criteria 1 to 7 run in
//! process; criterion 8 runs `banachlab suite --seed 42` twice and compares
//! the report bytes.

use std::process::{Command, ExitCode};
use std::time::Instant;

use banachlab::suite::{run_criterion, SuiteConfig, CRITERIA};

fn suite_report(dir: &std::path::Path, name: &str) -> Result<Vec<u8>, String> {
    let path = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_banachlab"))
        .args(["suite", "--seed", "42", "--out"])
        .arg(&path)
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("suite exited with {status}"));
    }
    std::fs::read(&path).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cfg = SuiteConfig::new(42);
    let mut failed = 0;
    for (id, title) in CRITERIA {
        let start = Instant::now();
        match run_criterion(id, &cfg) {
            Ok(r) => {
                let verdict = if r.passed { "PASS" } else { "FAIL" };
                println!(
                    "criterion {id} {verdict}: {title} ({} checks, {} violations, {:.1} s)",
                    r.checked,
                    r.violation_count,
                    start.elapsed().as_secs_f64()
                );
                for v in &r.violations {
                    println!("    {v}");
                }
                for (k, v) in &r.summary {
                    println!("    {k} = {v}");
                }
                failed += !r.passed as usize;
            }
            Err(e) => {
                println!("criterion {id} FAIL: {title}: {e}");
                failed += 1;
            }
        }
    }

    let start = Instant::now();
    let dir = tempfile::tempdir().expect("temporary directory");
    let outcome = suite_report(dir.path(), "a.json").and_then(|a| Ok((a, suite_report(dir.path(), "b.json")?)));
    match outcome {
        Ok((a, b)) if a == b => println!(
            "criterion 8 PASS: determinism ({} identical bytes, {:.1} s)",
            a.len(),
            start.elapsed().as_secs_f64()
        ),
        Ok(_) => {
            println!("criterion 8 FAIL: determinism: reports differ");
            failed += 1;
        }
        Err(e) => {
            println!("criterion 8 FAIL: determinism: {e}");
            failed += 1;
        }
    }

    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
