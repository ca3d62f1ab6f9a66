//! Command-line experiment runner: builds designs, checks feasibility, and
//! writes robustness estimates and bounds as CSV.

pub mod args;
mod bounds;
pub mod config;
mod design;
mod feasible;
mod output;
mod scan;
mod simulate;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;

use crate::args::{Cli, Command};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INFEASIBLE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, config, or parameters.
    Usage(String),
    Io(std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(msg) => f.write_str(msg),
            Self::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e)
    }
}

impl From<storage_robustness::Error> for CliError {
    fn from(e: storage_robustness::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Io(std::io::Error::other(e))
    }
}

/// Runs the command line `args` and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let args = match config::merge_config(args, |p| std::fs::read_to_string(p)) {
        Ok(a) => a,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_USAGE
                }
            };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, CliError> {
    let pool = {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(w) = cli.global.workers {
            builder = builder.num_threads(w as usize);
        }
        builder.build().map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?
    };
    let mut stdout = Vec::new();
    let mut log = Vec::new();
    let result = pool.install(|| match &cli.command {
        Command::Feasible(a) => feasible::run(a, &mut stdout),
        Command::Design(a) => output::emit(&cli.global, &mut stdout, |w| design::run(a, &cli.global, w, &mut log)),
        Command::Simulate(a) => output::emit(&cli.global, &mut stdout, |w| simulate::run(a, &cli.global, w, &mut log)),
        Command::Bounds(a) => output::emit(&cli.global, &mut stdout, |w| bounds::run(a, &cli.global, w, &mut log)),
        Command::Scan(a) => output::emit(&cli.global, &mut stdout, |w| scan::run(a, &cli.global, w)),
    });
    out.write_all(&stdout)?;
    err.write_all(&log)?;
    result
}
