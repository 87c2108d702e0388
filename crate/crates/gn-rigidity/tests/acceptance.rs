//! Runs every acceptance criterion at its stated tolerance and runtime budget, one line each.
//!
//! `GNR_QUICK=1` runs the reduced cell sets.

use std::process::ExitCode;

use gn_rigidity::suite::{run_criterion, CRITERIA};

fn main() -> ExitCode {
    let quick = std::env::var_os("GNR_QUICK").is_some();
    let mut failed = 0;
    for &(id, name, _) in &CRITERIA {
        match run_criterion(id, quick) {
            Ok(r) => {
                println!("{}", r.line());
                if !r.pass {
                    failed += 1;
                }
            }
            Err(e) => {
                println!("[FAIL] {id:>2} {name:<28} error: {e}");
                failed += 1;
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        CRITERIA.len() - failed,
        CRITERIA.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
