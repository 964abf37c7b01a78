//! Command-line front-end: entropy sweeps, mode dynamics and the verification suite.

pub mod config;
pub mod dynamics;
pub mod grid;
pub mod output;
pub mod state;
pub mod sweep;
pub mod verify;

use std::io::Write;

use clap::Parser;

use crate::config::{expand_config, Cli, Command, DynamicsConfig, RunArgs, SweepConfig, VerifyConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] pairent_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

/// Runs `f` on a rayon pool with `workers` threads (0 picks the default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

fn emit(run: &RunArgs, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &run.output {
        Some(path) => std::fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Dispatches one parsed command. Returns whether every row or check passed.
fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool, CliError> {
    match cli.command {
        Command::Sweep(args) => {
            let cfg = SweepConfig::from_args(&args)?;
            let outcome = sweep::run_sweep(&cfg)?;
            emit(&args.run, &sweep::render_sweep(&cfg, &outcome), stdout)?;
            for &i in &outcome.breaches {
                writeln!(stderr, "breach: {}", sweep::render_row(&outcome.rows[i]).trim_end())?;
            }
            Ok(outcome.breaches.is_empty())
        }
        Command::Dynamics(args) => {
            let cfg = DynamicsConfig::from_args(&args)?;
            let rows = dynamics::run_dynamics(&cfg)?;
            emit(&args.run, &dynamics::render_dynamics(&cfg, &rows), stdout)?;
            for r in rows.iter().filter(|r| !r.ok()) {
                writeln!(stderr, "failed: p = {:?}: {}", r.momentum, r.status)?;
            }
            Ok(rows.iter().all(|r| r.ok()))
        }
        Command::Verify(args) => {
            let cfg = VerifyConfig::from_args(&args)?;
            let report = verify::run_verify(&cfg)?;
            emit(&args.run, &verify::render_report(&cfg, &report), stdout)?;
            for c in report.checks.iter().filter(|c| !c.passed) {
                writeln!(stderr, "failed: {}", c.id)?;
            }
            Ok(report.passed)
        }
    }
}

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 1 tolerance breach or numerical failure, 2 usage error.
pub fn run(argv: Vec<String>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let argv = match expand_config(&argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(rendered.as_bytes()) } else { stdout.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ CliError::Usage(_)) => {
            let _ = writeln!(stderr, "{e}");
            2
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}
