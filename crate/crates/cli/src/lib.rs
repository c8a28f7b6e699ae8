//! Experiment harness wiring the operator library into four config-driven
//! experiment families, each a CLI subcommand:
//!
//! - `verify-moments` — truncated moments against their closed-form bounds,
//!   one PASS/FAIL line per inequality with the computed slack;
//! - `converge` — sup-norm error versus the modulus rate bound along an
//!   index ladder;
//! - `counterexample` — the square-index auxiliary operator: classically
//!   divergent error sequence, decaying Abel transform;
//! - `summability` — deferred weighted A-statistical densities of the
//!   error-exceedance sets.
//!
//! Reports are deterministic given a config: fixed iteration order, no
//! timestamps or randomness, and floats serialized with 17 significant
//! digits. Exit codes: 0 all checks pass, 1 a mathematical check failed,
//! 2 configuration or execution error.

pub mod commands;
pub mod config;
pub mod report;
pub mod target;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::CommandOutput;
use crate::config::{CommandKind, Config};

#[derive(Parser, Debug)]
#[command(
    name = "qkorovkin",
    version,
    about = "Experiments on q-integral positive linear operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the moment identities and bounds on a sample of (n, x) cells
    VerifyMoments(RunArgs),
    /// Sup-norm error versus the modulus rate bound along the index ladder
    Converge(RunArgs),
    /// The square-index auxiliary operator and its Abel transform
    Counterexample(RunArgs),
    /// Deferred weighted A-statistical densities of error-exceedance sets
    Summability(RunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Path to a TOML experiment configuration (a built-in preset is used
    /// when omitted)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the CSV table to this path (the text report always goes to
    /// stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override the truncation mass tolerance
    #[arg(long)]
    pub mass_tol: Option<f64>,
    /// Override the truncation degree cap
    #[arg(long)]
    pub p_max: Option<usize>,
    /// Override the evaluation grid resolution
    #[arg(long)]
    pub grid: Option<usize>,
}

impl Command {
    fn kind(&self) -> CommandKind {
        match self {
            Command::VerifyMoments(_) => CommandKind::VerifyMoments,
            Command::Converge(_) => CommandKind::Converge,
            Command::Counterexample(_) => CommandKind::Counterexample,
            Command::Summability(_) => CommandKind::Summability,
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::VerifyMoments(a)
            | Command::Converge(a)
            | Command::Counterexample(a)
            | Command::Summability(a) => a,
        }
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let kind = cli.command.kind();
    let args = cli.command.args();

    let config = match load_config(kind, args) {
        Ok(c) => c,
        Err(message) => {
            eprintln!("configuration error: {message}");
            return 2;
        }
    };

    let output = match dispatch(kind, &config) {
        Ok(out) => out,
        Err(message) => {
            eprintln!("execution error: {message}");
            return 2;
        }
    };

    print!("{}", output.report);
    if let Some(path) = &args.out {
        if let Err(e) = std::fs::write(path, &output.csv) {
            eprintln!("execution error: cannot write {}: {e}", path.display());
            return 2;
        }
    }
    if output.failures > 0 {
        eprintln!("{} mathematical check(s) failed", output.failures);
        1
    } else {
        0
    }
}

fn load_config(kind: CommandKind, args: &RunArgs) -> Result<Config, String> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            Config::from_toml(&text).map_err(|e| e.to_string())?
        }
        None => Config::preset(kind),
    };
    config.apply_overrides(args.mass_tol, args.p_max, args.grid);
    config.validate(kind).map_err(|e| e.to_string())?;
    Ok(config)
}

fn dispatch(kind: CommandKind, config: &Config) -> Result<CommandOutput, String> {
    let result = match kind {
        CommandKind::VerifyMoments => commands::verify_moments::run(config),
        CommandKind::Converge => commands::converge::run(config),
        CommandKind::Counterexample => commands::counterexample::run(config),
        CommandKind::Summability => commands::summability::run(config),
    };
    result.map_err(|e| e.to_string())
}
