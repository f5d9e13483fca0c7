//! The `chop` command line: extract a basis library, run episodes, evaluate
//! archives, replay a single episode, and validate fixtures. Everything is
//! offline-deterministic with scripted or replay backends; nothing in the
//! harness draws random numbers.
//!
//! Exit codes: 0 success, 1 usage, 2 validation, 3 infrastructure.

pub mod backend;
pub mod commands;
pub mod io;

pub use backend::{BackendKind, BackendOptions};
pub use commands::{
    cmd_eval, cmd_extract, cmd_replay, cmd_run, cmd_validate, EvalArgs, ExtractArgs, ReplayArgs,
    RunArgs, ValidateArgs, MINER_CASSETTE,
};

use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Infra(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Validation(msg) => write!(f, "validation error: {msg}"),
            CliError::Infra(msg) => write!(f, "infrastructure error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Infra(_) => 3,
        }
    }
}

/// Backend flags shared by `extract` and `run`.
#[derive(Debug, clap::Args)]
pub struct BackendArgs {
    #[arg(long, value_enum, default_value = "scripted")]
    pub backend: BackendKind,
    /// Script file for the scripted backend (also the inner source for
    /// `record`).
    #[arg(long)]
    pub script: Option<PathBuf>,
    /// Cassette directory for replay/record backends.
    #[arg(long)]
    pub cassettes: Option<PathBuf>,
    /// Provider base URL for the http backend.
    #[arg(long = "base-url")]
    pub base_url: Option<String>,
    /// Model name sent to the http provider.
    #[arg(long, default_value = "gpt-4o")]
    pub model: String,
    /// Environment variable holding the provider credential.
    #[arg(long = "api-key-env", default_value = "CHOP_API_KEY")]
    pub api_key_env: String,
}

impl BackendArgs {
    pub fn to_options(&self) -> BackendOptions {
        BackendOptions {
            kind: self.backend,
            script: self.script.clone(),
            cassettes: self.cassettes.clone(),
            base_url: self.base_url.clone(),
            model: self.model.clone(),
            api_key_env: self.api_key_env.clone(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "chop", about = "Basis-subtask mobile-assistant benchmarking harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine the basis-subtask library from a trajectory corpus.
    Extract(ExtractArgs),
    /// Run tasks and write episode archives.
    Run(RunArgs),
    /// Score episode archives against golden tasks.
    Eval(EvalArgs),
    /// Re-execute one episode archive through the simulator.
    Replay(ReplayArgs),
    /// Schema-check bundles, tasks, library, and cassettes.
    Validate(ValidateArgs),
}

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Extract(args) => cmd_extract(args),
        Command::Run(args) => cmd_run(args).map(|_| ()),
        Command::Eval(args) => cmd_eval(args).map(|_| ()),
        Command::Replay(args) => cmd_replay(args),
        Command::Validate(args) => {
            let violations = cmd_validate(args)?;
            if violations.is_empty() {
                Ok(())
            } else {
                Err(CliError::Validation(format!("{} violation(s)", violations.len())))
            }
        }
    }
}
