//! Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

use std::process::ExitCode;

use framelab_cli::suite::{criteria, run_criterion, Context};

fn main() -> ExitCode {
    let mut ctx = Context::default();
    let mut failed = 0;
    for c in criteria() {
        let o = run_criterion(&c, &mut ctx);
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} criterion {:>2}: {} ({:.2} s)", o.number, o.title, o.elapsed.as_secs_f64());
        for ch in o.checks.iter().filter(|ch| !ch.passed()) {
            failed += 1;
            println!("     {}: {}", ch.id, ch.reason.as_deref().unwrap_or("failed"));
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
