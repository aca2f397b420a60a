//! Acceptance gate: one PASS/FAIL line per criterion, each with its
//! sample size and time limit. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Duration;

use ipcmu::prover::DEFAULT_BUDGET;
use ipcmu::semantics::algebras_up_to;
use ipcmu::suites::{
    bound_soundness_suite, lemma_suite, nu_one_step_suite, oracle_agreement_suite, phi_family_suite,
    round_trip_suite, SuiteReport,
};

const SEED: u64 = 42;

struct Criterion {
    id: u32,
    title: &'static str,
    limit: Duration,
    /// Minimum number of checks for the run to count.
    min_checks: usize,
}

fn verdict(c: &Criterion, r: &SuiteReport) -> bool {
    let in_time = r.elapsed <= c.limit;
    let enough = r.checks >= c.min_checks;
    let ok = r.passed() && in_time && enough;
    println!(
        "[{}] criterion {}: {} — {} (limit {}s)",
        if ok { "PASS" } else { "FAIL" },
        c.id,
        c.title,
        r.summary(),
        c.limit.as_secs()
    );
    if !in_time {
        println!("    over time limit");
    }
    if !enough {
        println!("    only {} checks, need {}", r.checks, c.min_checks);
    }
    for f in r.failures.iter().take(5) {
        println!("    {f}");
    }
    ok
}

fn main() -> ExitCode {
    // Accept and ignore libtest flags so `cargo test -- <filter>` works.
    let algs = algebras_up_to(4).expect("algebras of posets up to 4 points");
    println!("acceptance: {} downset algebras of posets with at most 4 points", algs.len());

    let mut all = true;
    let runs: Vec<(Criterion, Box<dyn Fn() -> SuiteReport + '_>)> = vec![
        (
            Criterion { id: 1, title: "phi_n elimination (n = 1..4, both oracles) and exact ordinal n + 1 (n = 1..3)", limit: Duration::from_secs(30), min_checks: 11 },
            Box::new(|| phi_family_suite(&algs, DEFAULT_BUDGET, 4, 3)),
        ),
        (
            Criterion { id: 2, title: "round trip of 500 random formulas", limit: Duration::from_secs(300), min_checks: 500 },
            Box::new(|| round_trip_suite(&algs, SEED, 500)),
        ),
        (
            Criterion { id: 3, title: "nu one step on 500 monotone formulas", limit: Duration::from_secs(120), min_checks: 1000 },
            Box::new(|| nu_one_step_suite(&algs, SEED, 500)),
        ),
        (
            Criterion { id: 4, title: "fixed-point lemma suites, 200 samples per algebra", limit: Duration::from_secs(180), min_checks: 200 * 14 * algs.len() },
            Box::new(|| lemma_suite(&algs, SEED, 200)),
        ),
        (
            Criterion { id: 5, title: "closure-ordinal bounds and combinator bounds", limit: Duration::from_secs(180), min_checks: 500 * algs.len() },
            Box::new(|| bound_soundness_suite(&algs, SEED, 500)),
        ),
        (
            Criterion { id: 6, title: "prover / algebra agreement", limit: Duration::from_secs(120), min_checks: 500 * 6 },
            Box::new(|| oracle_agreement_suite(&algs, SEED, 500, DEFAULT_BUDGET)),
        ),
    ];
    for (c, run) in &runs {
        all &= verdict(c, &run());
    }
    if all {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
