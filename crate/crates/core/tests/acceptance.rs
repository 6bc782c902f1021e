//! Prints one line per acceptance criterion; exits non-zero if any fails.

use mlfrac::acceptance::run_criterion;

fn main() {
    let seed = std::env::var("MLFRAC_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(20240607);
    let mut failed = Vec::new();
    for id in 1..=12 {
        let v = run_criterion(id, seed);
        println!("{v}");
        if !v.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: 12/12 passed");
    } else {
        println!("acceptance: {}/12 passed, failing: {failed:?}", 12 - failed.len());
        std::process::exit(1);
    }
}
