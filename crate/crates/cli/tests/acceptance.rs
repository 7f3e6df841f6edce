//! Runs the eight acceptance criteria on the shipped system files and
//! prints one PASS/FAIL line per criterion.
//!
//! The printed Boussinesq antifield dynamics disagree with the dynamics
//! derived from the system, so criterion 4 is expected to fail on exactly
//! those two comparisons and nothing else. Any other outcome fails the
//! target.

use std::path::Path;
use std::process::ExitCode;

use jetham::criteria::{run_all, table, Suite};

const EXPECTED: [bool; 8] = [true, true, true, false, true, true, true, true];
const EXPECTED_FAILURES: [&str; 2] =
    ["  FAIL p_t = v*p[1] + v[1]*p[0] + q[1]", "  FAIL q_t = sigma*p[3] - u[1]*p[0] + v*q[1]"];

fn main() -> ExitCode {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../systems");
    let suite = Suite::load(&dir).expect("system files load");
    let (criteria, _) = run_all(&suite).expect("suite runs");
    for c in &criteria {
        for l in c.lines.iter().filter(|l| l.starts_with("  FAIL")) {
            println!("criterion {}:{l}", c.number);
        }
    }
    for l in table(&criteria) {
        println!("{l}");
    }
    let outcomes: Vec<bool> = criteria.iter().map(|c| c.passed).collect();
    let failures: Vec<&str> =
        criteria.iter().flat_map(|c| c.lines.iter()).filter(|l| l.starts_with("  FAIL")).map(String::as_str).collect();
    if outcomes == EXPECTED && failures == EXPECTED_FAILURES {
        println!("acceptance: outcomes match the expected table");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: unexpected outcomes {outcomes:?}");
        ExitCode::FAILURE
    }
}
