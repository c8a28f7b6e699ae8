//! The four experiment families behind the CLI subcommands.

pub mod converge;
pub mod counterexample;
pub mod summability;
pub mod verify_moments;

use thiserror::Error;

use qkorovkin::moments::MomentError;
use qkorovkin::operators::OperatorError;
use qkorovkin::summability::SummabilityError;

/// What a command produces: a plain-text verification report (stdout), a
/// CSV table (written to `--out` when given), and the number of failed
/// mathematical checks (drives the exit code).
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub report: String,
    pub csv: String,
    pub failures: usize,
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Moment(#[from] MomentError),
    #[error(transparent)]
    Summability(#[from] SummabilityError),
}

pub type CommandResult = Result<CommandOutput, CommandError>;
