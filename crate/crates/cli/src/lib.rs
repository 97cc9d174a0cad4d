//! Command-line front end for `dimlab_core`.
//!
//! Exit codes: 0 success, 1 a verification claim failed, 2 bad input
//! (flags, documents, example parameters), 3 an estimator or checker failed
//! at run time. `DIMLAB_THREADS` caps the worker count (0 or unset = all cores).

pub mod args;
mod commands;
pub mod document;
pub mod output;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use args::Cli;
pub use document::{MeasureDocument, ParseError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CLAIM_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    fn input(e: dimlab_core::Error) -> Self {
        CliError::Input(e.to_string())
    }

    /// Parameter errors raised deep inside a run are still the caller's input.
    fn runtime(e: dimlab_core::Error) -> Self {
        match e {
            dimlab_core::Error::InvalidParameters(_) | dimlab_core::Error::UnknownExample(_) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("DIMLAB_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| CliError::Input(format!("DIMLAB_THREADS={v} is not a count")))?;
    if n > 0 {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses `argv`, runs the command and returns the exit code. Summaries go
/// to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if code == EXIT_OK { write!(stdout, "{}", e.render()) } else { write!(stderr, "{}", e.render()) };
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        let _ = writeln!(stderr, "{e}");
        return e.exit_code();
    }
    let (result, out_args) = match &cli.command {
        args::Command::Exact(a) => (commands::exact(a), &a.output),
        args::Command::Estimate(a) => (commands::estimate(a), &a.output),
        args::Command::Tv(a) => (commands::tv(a), &a.output),
        args::Command::Converge(a) => (commands::converge(a), &a.output),
        args::Command::Verify(a) => (commands::verify(a), &a.output),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            return e.exit_code();
        }
    };
    let _ = write!(stdout, "{}", outcome.summary);
    if let Some(dir) = &out_args.out {
        match outcome.outputs.write_to(dir) {
            Ok(paths) => {
                for p in paths {
                    let _ = writeln!(stdout, "wrote {}", p.display());
                }
            }
            Err(e) => {
                let _ = writeln!(stderr, "cannot write to {}: {e}", dir.display());
                return EXIT_INPUT;
            }
        }
    }
    if outcome.passed {
        EXIT_OK
    } else {
        EXIT_CLAIM_FAILED
    }
}
