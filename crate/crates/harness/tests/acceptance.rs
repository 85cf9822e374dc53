//! Runs every registered acceptance experiment with its default
//! configuration and prints one verdict line per criterion.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use lqgsim_harness::{by_criterion, report, run_experiment, ExperimentConfig, RunRecord, Verdict};

/// Criteria whose exact computation contradicts the claim; they are run and
/// printed like the others but do not fail this target.
const KNOWN_FAILURES: &[u8] = &[8];

fn out_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance")
}

fn summary_line(record: &RunRecord) -> String {
    let checks: Vec<_> = record.checks.iter().filter(|c| c.claim != "wall time in seconds").collect();
    let est = |c: &lqgsim_harness::Check| c.estimate.map_or("-".to_string(), |e| format!("{e:.6}"));
    if record.verdict == Verdict::Pass {
        return match checks.as_slice() {
            [c] => format!("{} = {} (target {}, {})", c.claim, est(c), c.target, c.tolerance),
            _ => format!("all {} checks pass", checks.len()),
        };
    }
    let failing: Vec<String> = record
        .checks
        .iter()
        .filter(|c| c.verdict != Verdict::Pass)
        .map(|c| match &c.detail {
            Some(d) => format!("{} = {d}", c.claim),
            None => format!("{} = {}", c.claim, est(c)),
        })
        .collect();
    format!("{} of {} checks fail: {}", failing.len(), record.checks.len(), failing.join("; "))
}

fn main() -> ExitCode {
    let filter: Option<u8> = std::env::args().skip(1).find_map(|a| a.parse().ok());
    let dir = out_dir();
    let mut records = Vec::new();
    let mut unexpected = Vec::new();
    for criterion in 1..=14u8 {
        if filter.is_some_and(|f| f != criterion) {
            continue;
        }
        let exp = by_criterion(criterion).expect("every criterion is registered");
        let config = ExperimentConfig::new(exp.id).with_out(&dir);
        let start = Instant::now();
        match run_experiment(&config) {
            Ok(record) => {
                println!(
                    "{:<4} {:>2} {:<22} {:>7.1}s  {}",
                    record.verdict.to_string(),
                    criterion,
                    exp.id,
                    start.elapsed().as_secs_f64(),
                    summary_line(&record)
                );
                if record.verdict != Verdict::Pass && !KNOWN_FAILURES.contains(&criterion) {
                    unexpected.push(criterion);
                }
                records.push(record);
            }
            Err(e) => {
                println!("FAIL {criterion:>2} {:<22} error: {e}", exp.id);
                unexpected.push(criterion);
            }
        }
        if criterion == 8 {
            // the same comparison in the loopless class, for contrast
            let config = ExperimentConfig::new(exp.id)
                .with_out(dir.join("multi-edge"))
                .with_param("class", "MULTI_EDGE");
            match run_experiment(&config) {
                Ok(r) => println!("     note: MULTI_EDGE n ∈ {{4,5,6}}: {} ({})", r.verdict, summary_line(&r)),
                Err(e) => println!("     note: MULTI_EDGE run failed: {e}"),
            }
        }
    }
    if let Ok(doc) = report(&records) {
        if let Err(e) = doc.write(&dir) {
            println!("could not write the report: {e}");
        }
        println!("report: {}", dir.join("report.txt").display());
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected verdicts for criteria {unexpected:?}");
        ExitCode::FAILURE
    }
}
