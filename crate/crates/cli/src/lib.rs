//! `qcap`: command-line experiments over the `qcap-core` library.
//!
//! Every subcommand except `catalog` emits one artifact (JSON for single
//! results, CSV for sweeps) carrying a [`RunManifest`]. Exit codes: 0 ok,
//! 2 validation, 3 enumeration guard, 4 non-convergence.

mod args;
mod commands;
mod input;
mod manifest;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

pub use input::{parse_code_text, parse_probs_text};
pub use manifest::{RunManifest, TOOL_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] qcap_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot access `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("writing output: {0}")]
    Output(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_guard() => EXIT_GUARD,
            CliError::Core(qcap_core::Error::NonConvergence { .. }) => EXIT_NONCONVERGENCE,
            _ => EXIT_VALIDATION,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("QCAP_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Usage(format!("QCAP_THREADS must be a positive integer, got `{raw}`")))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code. Artifacts go to `out` unless `--out` is given;
/// diagnostics go to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match args::Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_VALIDATION
                }
            };
            return code;
        }
    };
    let result = configure_threads().and_then(|()| commands::dispatch(cli.command, &argv, out));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
