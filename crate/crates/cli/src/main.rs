mod args;
mod commands;
mod data;

use std::process::ExitCode;

use clap::Parser;
use dante_core::DanteError;

use args::{Cli, Command};

/// Failure of a subcommand, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(DanteError),
    /// A self-check criterion failed.
    Check(String),
}

impl From<DanteError> for CliError {
    fn from(e: DanteError) -> Self {
        match e {
            DanteError::Config(msg) => CliError::Usage(msg),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(_) => 2,
            CliError::Check(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Check(msg) => write!(f, "self-check failed: {msg}"),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Clean(a) => commands::clean(a),
        Command::Fit(a) => commands::fit(a),
        Command::Forecast(a) => commands::forecast(a),
        Command::Score(a) => commands::score(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Volatility(a) => commands::volatility(a),
        Command::Selfcheck(a) => commands::selfcheck(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dante: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
