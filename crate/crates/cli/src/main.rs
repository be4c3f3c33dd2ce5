//! `telodl`: build and analyze approximated chains, run Monte Carlo
//! estimates and sweep parameter grids. Results go out as CSV or chain JSON.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure, 3 some
//! sweep cells failed (the CSV is still written, failed values are `NA`).

mod commands;
mod options;
mod table;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::AnalyzeArgs;
use options::GridArgs;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{failed} of {total} values failed")]
    Partial { failed: usize, total: usize },
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Partial { .. } => 3,
        }
    }
}

impl From<telodl::Error> for CliError {
    fn from(e: telodl::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "telodl", version, about = "TEL/ODL learning chains and simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Approximated chains.
    #[command(subcommand)]
    Chain(ChainCommand),
    /// Monte Carlo (and optionally approximated) EFHT and alpha for one K, N.
    Simulate(GridArgs),
    /// Cross product of algorithms, K, N and epsilon.
    Sweep(GridArgs),
    /// State counts of full, reduced and approximated chains.
    Complexity(GridArgs),
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum ChainCommand {
    /// Build a chain and write it as JSON.
    Build(GridArgs),
    /// EFHT and alpha of a chain file.
    Analyze(AnalyzeArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Chain(ChainCommand::Build(a)) => commands::chain_build(a),
        Command::Chain(ChainCommand::Analyze(a)) => commands::chain_analyze(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Complexity(a) => commands::complexity(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
