//! `hyperglass` command-line frontend.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration or domain
//! error, 3 integration failure, 4 non-converged legendre rows.

mod args;
mod commands;
mod config;
mod output;

use clap::Parser;
use hyperglass::Error;

use crate::args::{Cli, Format};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTEGRATION: i32 = 3;

/// A run that produced no artifact.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self { code: EXIT_CONFIG, message: message.into() }
    }

    pub fn context(mut self, what: String) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::StepUnderflow { .. } | Error::NotConverged { .. } => EXIT_INTEGRATION,
            _ => EXIT_CONFIG,
        };
        Self { code, message: e.to_string() }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("HYPERGLASS_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::config(format!("HYPERGLASS_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::config(format!("cannot size the thread pool: {e}")))
}

fn run() -> Result<i32, Failure> {
    let argv = config::expand(std::env::args_os().collect())?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return Ok(e.exit_code());
        }
    };
    configure_threads()?;
    let outcome = commands::dispatch(&cli.command)?;
    let out = cli.command.output();
    let text = match out.format {
        Format::Json => output::render_json(&outcome.artifact),
        Format::Csv => output::render_csv(&outcome.artifact)?,
    };
    output::write_atomic(&out.output, &text)?;
    if let Some(s) = &outcome.summary {
        eprintln!("{s}");
    }
    Ok(outcome.code)
}

fn main() {
    let code = run().unwrap_or_else(|f| {
        eprintln!("error: {}", f.message);
        f.code
    });
    std::process::exit(code);
}
