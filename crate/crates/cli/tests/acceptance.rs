// Acceptance run: one line per criterion, nonzero exit if any fails.
//
// Runs without the libtest harness so the table is printed even when every
// criterion passes.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use fslattice_core::selftest::{self, CriterionReport};
use fslattice_core::RunConfig;

/// Wall-clock limits in seconds, by criterion id.
const LIMITS: [(u8, u64); 3] = [(1, 10), (4, 30), (10, 5)];

fn limit_for(id: u8) -> Option<Duration> {
    LIMITS
        .iter()
        .find(|(i, _)| *i == id)
        .map(|&(_, s)| Duration::from_secs(s))
}

/// Two separate `selftest` processes, same seed, compared byte for byte.
fn binary_determinism() -> CriterionReport {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_fslattice"))
            .args(["selftest", "--seed", "0"])
            .output()
            .expect("spawn fslattice")
    };
    let (first, second) = (run(), run());
    let mut rep = selftest::determinism(&RunConfig::default());
    let same = first.status.success() && second.status.success() && first.stdout == second.stdout;
    rep.checked += 1;
    if !same {
        rep.failure_count += 1;
        rep.failures.push(format!(
            "selftest output differs or failed (status {:?} / {:?})",
            first.status.code(),
            second.status.code()
        ));
    }
    rep.passed = rep.failure_count == 0;
    rep.notes.push(format!("{} bytes of JSON per run", first.stdout.len()));
    rep
}

fn main() -> ExitCode {
    let cfg = RunConfig::default();
    let mut all_passed = true;
    println!("acceptance (seed {})", cfg.seed);
    for (i, criterion) in selftest::CRITERIA.iter().enumerate() {
        let id = i as u8 + 1;
        let start = Instant::now();
        let mut rep = if id == 12 { binary_determinism() } else { criterion(&cfg) };
        let elapsed = start.elapsed();
        if let Some(limit) = limit_for(id) {
            if elapsed > limit {
                rep.passed = false;
                rep.failures.push(format!("took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        println!("{}  [{:.2?}]", rep.line(), elapsed);
        for f in &rep.failures {
            println!("        {f}");
        }
        all_passed &= rep.passed;
    }
    if all_passed {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
