//! Command line front end: `simulate`, `verify`, `sweep` and `analyze`.

pub mod commands;
pub mod config;
pub mod svg;

use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::Parser;

pub use commands::{parse_initial, Artifacts};
pub use config::{Cli, CommandConfig, RunConfig};

use crate::analysis::{ExactLimits, SweepConfig};
use crate::scalar::ArithMode;
use crate::Rational;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

/// Runs a resolved configuration and returns its artifacts without writing them.
pub fn execute(cfg: &RunConfig) -> Result<Artifacts, CliError> {
    let exact = cfg.arithmetic == ArithMode::Exact;
    let want_svg = cfg.svg.is_some();
    let artifacts = match &cfg.command {
        CommandConfig::Simulate { initial, steps } => {
            if exact {
                commands::simulate::<Rational>(initial, *steps, want_svg)
            } else {
                commands::simulate::<f64>(initial, *steps, want_svg)
            }
        }
        CommandConfig::Verify {
            samples,
            suite,
            steps,
            anchor_bits,
            workers,
        } => commands::verify(
            cfg.arithmetic,
            cfg.seed,
            *samples,
            suite,
            *steps,
            *anchor_bits,
            *workers,
        ),
        CommandConfig::Sweep {
            grid,
            eps,
            max_iter,
            workers,
            slice,
        } => {
            let sweep = SweepConfig {
                grid_per_axis: *grid,
                eps: *eps,
                max_iter: *max_iter,
                worker_count: *workers,
                exact_limits: ExactLimits::default(),
            };
            if exact {
                commands::sweep::<Rational>(&sweep, *slice, want_svg)
            } else {
                commands::sweep::<f64>(&sweep, *slice, want_svg)
            }
        }
        CommandConfig::Analyze { grid, steps } => {
            commands::analyze(cfg.arithmetic, *grid, *steps, want_svg)
        }
    }?;
    Ok(artifacts)
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|e| CliError {
        code: EXIT_INVALID_INPUT,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

/// Writes the artifacts of one run: the primary output to `--out` or
/// `stdout`, the plot to `--svg`, messages to `stderr`.
pub fn emit(
    cfg: &RunConfig,
    artifacts: &Artifacts,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => write_file(path, &artifacts.primary)?,
        None => stdout
            .write_all(artifacts.primary.as_bytes())
            .map_err(|e| CliError {
                code: EXIT_INVALID_INPUT,
                message: format!("cannot write to standard output: {e}"),
            })?,
    }
    match (&cfg.svg, &artifacts.svg) {
        (Some(path), Some(doc)) => write_file(path, doc)?,
        (Some(_), None) => {
            let _ = writeln!(stderr, "note: this command produces no plot; --svg ignored");
        }
        _ => {}
    }
    for message in &artifacts.messages {
        let _ = writeln!(stderr, "{message}");
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run_with<I, A>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID_INPUT
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = RunConfig::resolve(cli)
        .map_err(CliError::from)
        .and_then(|cfg| {
            let artifacts = execute(&cfg)?;
            emit(&cfg, &artifacts, stdout, stderr)?;
            Ok(artifacts.code)
        });
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    run_with(
        args,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
