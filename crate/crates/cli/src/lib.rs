//! Command-line front end: configuration loading, the `trace`, `optimize`, `sweep` and
//! `compare` commands, and file output.

pub mod commands;
pub mod config;
pub mod units;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use pathplace::frames::PlacementVar;
use pathplace::placement::Sense;

use crate::commands::CommandError;
use crate::config::{ConfigError, PlacementValues, RunConfig};
use crate::units::{Length, Quantity};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_NO_FEASIBLE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "pathplace", version, about = "Energy-optimal placement of a machining path")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output.dir` of the configuration.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps and multi-start searches.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for jittering the optimizer's start points.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-sample trajectory, actuator and motor trace at one placement.
    Trace {
        /// Placement override such as `phi=45deg` or `x_op=-20mm`; repeatable.
        #[arg(long = "at", value_name = "VAR=VALUE")]
        at: Vec<String>,
    },
    /// Search for the placement of least (or greatest) energy.
    Optimize {
        #[arg(long)]
        maximize: bool,
    },
    /// Evaluate every node of the configured grid.
    Sweep,
    /// Minimum and maximum energy for several rectangle sizes.
    Compare {
        /// Rectangle `WIDTH:LENGTH` with units, such as `20mm:40mm`; repeatable. Overrides
        /// `compare.sizes`.
        #[arg(long = "size", value_name = "W:L")]
        sizes: Vec<String>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("placement is infeasible ({0})")]
    Infeasible(String),
    #[error("{0}")]
    NoFeasible(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Infeasible(_) => EXIT_INFEASIBLE,
            CliError::NoFeasible(_) => EXIT_NO_FEASIBLE,
            CliError::Failed(_) => EXIT_FAILURE,
        }
    }
}

impl From<CommandError> for CliError {
    fn from(e: CommandError) -> Self {
        match e {
            CommandError::NoFeasible(_) => CliError::NoFeasible(e.to_string()),
            CommandError::Failed(m) => CliError::Failed(m),
        }
    }
}

fn parse_at(items: &[String]) -> Result<PlacementValues, CliError> {
    let mut v = PlacementValues::default();
    for item in items {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--at `{item}`: expected VAR=VALUE")))?;
        let var = PlacementVar::from_name(name.trim())
            .ok_or_else(|| CliError::Usage(format!("--at `{item}`: unknown variable `{name}`")))?;
        v.set_compact(var, value)
            .map_err(|e| CliError::Usage(format!("--at `{item}`: {e}")))?;
    }
    Ok(v)
}

fn parse_size(item: &str) -> Result<(f64, f64), CliError> {
    let (w, l) = item
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("--size `{item}`: expected WIDTH:LENGTH")))?;
    let q = |s: &str| {
        Quantity::<Length>::parse_compact(s)
            .map(|q| q.to_si())
            .map_err(|e| CliError::Usage(format!("--size `{item}`: {e}")))
    };
    Ok((q(w)?, q(l)?))
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    fs::write(dir.join(name), text)
        .map_err(|e| CliError::Failed(format!("{}: {e}", dir.join(name).display())))
}

/// Runs one command; returns the one-line summary printed on success.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let config_path = cli
        .common
        .config
        .as_ref()
        .ok_or_else(|| CliError::Usage("--config is required".into()))?;
    let config = RunConfig::load(config_path)?;
    let setup = config.build()?;
    let out = cli
        .common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.output.dir));
    fs::create_dir_all(&out).map_err(|e| CliError::Failed(format!("{}: {e}", out.display())))?;

    let body = || -> Result<String, CliError> {
        match &cli.command {
            Command::Trace { at } => {
                let placement = config.placement(&parse_at(at)?)?;
                let t = commands::trace(&setup, &placement);
                if let Some(csv) = &t.csv {
                    write(&out, "trace.csv", csv)?;
                }
                write(&out, "energy.json", &t.json)?;
                if t.feasible {
                    Ok(format!("trace: feasible, see {}", out.join("energy.json").display()))
                } else {
                    Err(CliError::Infeasible(format!(
                        "see {}",
                        out.join("energy.json").display()
                    )))
                }
            }
            Command::Optimize { maximize } => {
                let sense = if *maximize { Sense::Maximize } else { Sense::Minimize };
                let r = commands::run_optimize(&setup, sense, cli.common.seed)?;
                write(&out, "optimize.json", &r.json)?;
                let p = &r.result.best;
                Ok(format!(
                    "optimize: E = {} J at x_op={} y_op={} z_op={} phi={} ({} evaluations)",
                    commands::fmt_num(r.result.best_energy),
                    commands::fmt_num(p.x_op()),
                    commands::fmt_num(p.y_op()),
                    commands::fmt_num(p.z_op()),
                    commands::fmt_num(p.phi()),
                    r.result.evaluations
                ))
            }
            Command::Sweep => {
                let s = commands::run_sweep(&setup)?;
                write(&out, "sweep.csv", &s.csv)?;
                write(&out, "sweep.json", &s.json)?;
                Ok(format!("sweep: {} nodes written", s.csv.lines().count() - 1))
            }
            Command::Compare { sizes } => {
                let sizes = if sizes.is_empty() {
                    setup.sizes.clone()
                } else {
                    sizes.iter().map(|s| parse_size(s)).collect::<Result<_, _>>()?
                };
                let c = commands::run_compare(&setup, &sizes, cli.common.seed)?;
                write(&out, "compare.csv", &c.csv)?;
                Ok(format!("compare: {} sizes written", c.rows.len()))
            }
        }
    };

    match cli.common.threads {
        Some(0) => Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Failed(e.to_string()))?
            .install(body),
        None => body(),
    }
}
