use std::io::Write;

use profilekit_core::suite;

/// Runs every acceptance criterion in order and reports one PASS/FAIL line each.
///
/// Lines go to the process stdout directly so they show up without `--nocapture`.
#[test]
fn acceptance_criteria() {
    let mut out = std::io::stdout().lock();
    let mut failed = Vec::new();
    for id in 1..=suite::TITLES.len() {
        let o = suite::run(id, suite::DEFAULT_SEED);
        writeln!(out, "{o}").unwrap();
        out.flush().unwrap();
        if !o.passed {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
