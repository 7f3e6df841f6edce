//! Command line front-end for `jetham-core`.

pub mod commands;
pub mod criteria;
pub mod file;
pub mod random;
pub mod report;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub use commands::{Cli, Command};
pub use file::{Diagnostic, Fixture, SystemFile};

/// Exit status and captured output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `args` (program name first) and runs the command. Exit status 0
/// means success or a passed check, 1 a certified failure, 2 a usage or
/// input error.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    match commands::execute(&cli.command) {
        Ok(report) => {
            Outcome { code: if report.passed { 0 } else { 1 }, stdout: report.render(cli.json), stderr: String::new() }
        }
        Err(msg) if msg.contains(": error: ") => Outcome { code: 2, stdout: String::new(), stderr: format!("{msg}\n") },
        Err(msg) => Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") },
    }
}

/// Sizes the global thread pool from `JETHAM_THREADS` (0 or unset means
/// one thread per core).
pub fn configure_threads() -> Result<(), String> {
    let n = match std::env::var("JETHAM_THREADS") {
        Err(_) => 0,
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .map_err(|_| format!("JETHAM_THREADS must be a non-negative integer, got `{s}`"))?,
    };
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}
