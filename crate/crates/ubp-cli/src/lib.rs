//! `ubp`: one subcommand per analysis, all reading an update family from a
//! JSON file or a bundled name.
//!
//! Exit codes: 0 success, 1 parse or validation failure, 2 unmet precondition
//! (wrong class, non-bracketing bounds), 3 budget abort.

mod commands;
mod families;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use commands::Cli;
pub use families::{bundled, bundled_names, load_family};

#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Precondition(String),
    Budget(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Precondition(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Precondition(m) | Failure::Budget(m) => m,
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            // Help and version requests are not failures.
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match commands::dispatch(cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}
