//! Command line flags, the optional TOML config file, and their merge into a
//! [`RunConfig`]. Flags override the file, the file overrides the defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::analysis::decay::MIN_POINTS;
use crate::error::{Error, Result};
use crate::scalar::ArithMode;
use crate::verify::CheckId;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SIMULATE_STEPS: usize = 100;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_ORBIT_LENGTH: usize = 30;
pub const DEFAULT_ANCHOR_BITS: u64 = 4096;
pub const DEFAULT_GRID: usize = 10;
pub const DEFAULT_EPS: f64 = 1e-4;
pub const DEFAULT_MAX_ITER: usize = 100_000;
pub const DEFAULT_SLICE: f64 = 0.5;
pub const DEFAULT_ANALYZE_GRID: usize = 20;
pub const DEFAULT_DECAY_STEPS: usize = 10_000;

fn parse_mode(text: &str) -> std::result::Result<ArithMode, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

fn parse_check(text: &str) -> std::result::Result<CheckId, String> {
    text.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "gonosomal",
    version,
    about = "Simulate and verify the sex-linked hemophilia evolution operator",
    after_help = "Flags override values from --config; unset values take the defaults shown.\nExit codes: 0 success, 1 check failure, 2 invalid input, 3 numeric failure."
)]
pub struct Cli {
    #[command(flatten)]
    pub shared: SharedArgs,
    #[command(subcommand)]
    pub command: CommandArgs,
}

#[derive(Debug, Args)]
pub struct SharedArgs {
    /// Arithmetic: exact rationals or binary64 [default: f64]
    #[arg(long, global = true, value_name = "exact|f64", value_parser = parse_mode)]
    pub arith: Option<ArithMode>,
    /// Seed for random sampling [default: 42]
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Main output file [default: standard output]
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// SVG plot output (simulate, sweep, analyze)
    #[arg(long, global = true, value_name = "PATH")]
    pub svg: Option<PathBuf>,
    /// TOML file with default values for any flag
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Iterate the operator from one initial state and write the orbit as CSV
    Simulate {
        /// Initial state x,y,u,v as decimals or fractions, e.g. 0,1/2,1/2,0
        #[arg(long, value_name = "X,Y,U,V", allow_hyphen_values = true)]
        initial: Option<String>,
        /// Number of steps [default: 100]
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Run the property checks and write a TOML report
    Verify {
        /// Random initial states per check [default: 1000]
        #[arg(long)]
        samples: Option<usize>,
        /// Comma-separated checks to run [default: all]
        #[arg(long, value_delimiter = ',', value_parser = parse_check)]
        suite: Option<Vec<CheckId>>,
        /// Operator steps per sampled orbit [default: 30]
        #[arg(long)]
        steps: Option<usize>,
        /// Exact orbits restart from a rounded state above this many bits [default: 4096]
        #[arg(long)]
        anchor_bits: Option<u64>,
        /// Worker threads, 0 for all cores [default: 0]
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run every point of a barycentric lattice towards the fixed point
    Sweep {
        /// Lattice cells per axis [default: 10]
        #[arg(long)]
        grid: Option<usize>,
        /// L1 distance to the fixed point counted as arrival [default: 1e-4]
        #[arg(long)]
        eps: Option<f64>,
        /// Iteration budget per point [default: 100000]
        #[arg(long)]
        max_iter: Option<usize>,
        /// Worker threads; output does not depend on it [default: 1]
        #[arg(long)]
        workers: Option<usize>,
        /// Heatmap slice: y takes this share of 1-x-u, v the rest [default: 0.5, the slice y = v]
        #[arg(long)]
        slice: Option<f64>,
    },
    /// Locate and classify fixed points and measure the decay rate
    Analyze {
        /// Lattice cells per axis for the fixed-point scan [default: 20]
        #[arg(long)]
        grid: Option<usize>,
        /// Length of the reference orbit for the decay fit [default: 10000]
        #[arg(long)]
        steps: Option<usize>,
    },
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    arith: Option<ArithMode>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    svg: Option<PathBuf>,
    simulate: SimulateFile,
    verify: VerifyFile,
    sweep: SweepFile,
    analyze: AnalyzeFile,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SimulateFile {
    initial: Option<String>,
    steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct VerifyFile {
    samples: Option<usize>,
    suite: Option<Vec<String>>,
    steps: Option<usize>,
    anchor_bits: Option<u64>,
    workers: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct SweepFile {
    grid: Option<usize>,
    eps: Option<f64>,
    max_iter: Option<usize>,
    workers: Option<usize>,
    slice: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct AnalyzeFile {
    grid: Option<usize>,
    steps: Option<usize>,
}

/// Fully resolved settings of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub arithmetic: ArithMode,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub command: CommandConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CommandConfig {
    Simulate {
        initial: String,
        steps: usize,
    },
    Verify {
        samples: usize,
        suite: Vec<CheckId>,
        steps: usize,
        anchor_bits: u64,
        workers: usize,
    },
    Sweep {
        grid: usize,
        eps: f64,
        max_iter: usize,
        workers: usize,
        slice: f64,
    },
    Analyze {
        grid: usize,
        steps: usize,
    },
}

impl RunConfig {
    /// Merges parsed flags with the config file they name, then validates.
    pub fn resolve(cli: Cli) -> Result<Self> {
        let file = match &cli.shared.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Parse(format!("cannot read config {}: {e}", path.display()))
                })?;
                toml::from_str::<FileConfig>(&text)
                    .map_err(|e| Error::Parse(format!("config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let command = match cli.command {
            CommandArgs::Simulate { initial, steps } => CommandConfig::Simulate {
                initial: initial
                    .or(file.simulate.initial)
                    .ok_or_else(|| Error::Parse("simulate needs --initial x,y,u,v".into()))?,
                steps: steps
                    .or(file.simulate.steps)
                    .unwrap_or(DEFAULT_SIMULATE_STEPS),
            },
            CommandArgs::Verify {
                samples,
                suite,
                steps,
                anchor_bits,
                workers,
            } => {
                let suite = match (suite, file.verify.suite) {
                    (Some(ids), _) => ids,
                    (None, Some(names)) => {
                        names.iter().map(|n| n.parse()).collect::<Result<_>>()?
                    }
                    (None, None) => CheckId::ALL.to_vec(),
                };
                CommandConfig::Verify {
                    samples: samples.or(file.verify.samples).unwrap_or(DEFAULT_SAMPLES),
                    suite,
                    steps: steps.or(file.verify.steps).unwrap_or(DEFAULT_ORBIT_LENGTH),
                    anchor_bits: anchor_bits
                        .or(file.verify.anchor_bits)
                        .unwrap_or(DEFAULT_ANCHOR_BITS),
                    workers: workers.or(file.verify.workers).unwrap_or(0),
                }
            }
            CommandArgs::Sweep {
                grid,
                eps,
                max_iter,
                workers,
                slice,
            } => CommandConfig::Sweep {
                grid: grid.or(file.sweep.grid).unwrap_or(DEFAULT_GRID),
                eps: eps.or(file.sweep.eps).unwrap_or(DEFAULT_EPS),
                max_iter: max_iter.or(file.sweep.max_iter).unwrap_or(DEFAULT_MAX_ITER),
                workers: workers.or(file.sweep.workers).unwrap_or(1),
                slice: slice.or(file.sweep.slice).unwrap_or(DEFAULT_SLICE),
            },
            CommandArgs::Analyze { grid, steps } => CommandConfig::Analyze {
                grid: grid.or(file.analyze.grid).unwrap_or(DEFAULT_ANALYZE_GRID),
                steps: steps.or(file.analyze.steps).unwrap_or(DEFAULT_DECAY_STEPS),
            },
        };
        let cfg = RunConfig {
            arithmetic: cli.shared.arith.or(file.arith).unwrap_or(ArithMode::F64),
            seed: cli.shared.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            out: cli.shared.out.or(file.out),
            svg: cli.shared.svg.or(file.svg),
            command,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::DomainViolation(msg));
        match &self.command {
            CommandConfig::Simulate { .. } => {}
            CommandConfig::Verify {
                samples,
                steps,
                suite,
                ..
            } => {
                if *samples < 1 {
                    return invalid("--samples must be at least 1".into());
                }
                if *steps < 3 {
                    return invalid(format!("--steps must be at least 3, got {steps}"));
                }
                if suite.is_empty() {
                    return invalid("--suite names no checks".into());
                }
            }
            CommandConfig::Sweep {
                grid,
                eps,
                max_iter,
                slice,
                ..
            } => {
                if *grid < 2 {
                    return invalid(format!("--grid must be at least 2, got {grid}"));
                }
                if !(eps.is_finite() && *eps > 0.0) {
                    return invalid(format!("--eps must be positive, got {eps}"));
                }
                if *max_iter < 1 {
                    return invalid("--max-iter must be at least 1".into());
                }
                if !(0.0..=1.0).contains(slice) {
                    return invalid(format!("--slice must lie in [0, 1], got {slice}"));
                }
            }
            CommandConfig::Analyze { grid, steps } => {
                if *grid < 4 {
                    return invalid(format!("--grid must be at least 4, got {grid}"));
                }
                if *steps < 2 * MIN_POINTS + 2 {
                    return invalid(format!(
                        "--steps must be at least {} for the decay fit, got {steps}",
                        2 * MIN_POINTS + 2
                    ));
                }
            }
        }
        for path in [&self.out, &self.svg].into_iter().flatten() {
            check_writable(path)?;
        }
        Ok(())
    }
}

/// The parent directory must exist and the path must not be a directory.
fn check_writable(path: &Path) -> Result<()> {
    let parent = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    if path.is_dir() || !parent.is_dir() {
        return Err(Error::DomainViolation(format!(
            "cannot write to {}",
            path.display()
        )));
    }
    Ok(())
}
