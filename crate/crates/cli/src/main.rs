mod commands;
mod options;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use wikirel::ahits::AhitsError;
use wikirel::eval::EvalError;
use wikirel::taxonomy::TaxonomyError;
use wikirel::StoreError;

use options::{Cli, RunConfig, SNAPSHOT_ENV};

/// A failed run, by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or flag combinations (exit 1).
    Usage(String),
    /// Unreadable or invalid input, or a failing query (exit 2).
    Data(String),
    /// Statistics could not be computed, e.g. zero variance (exit 3).
    Degenerate(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Degenerate(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::Degenerate(m) => m,
        }
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<TaxonomyError> for Failure {
    fn from(e: TaxonomyError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<AhitsError> for Failure {
    fn from(e: AhitsError) -> Self {
        match e {
            AhitsError::InvalidParams(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Ahits(inner) => inner.into(),
            e if e.is_degenerate() => Failure::Degenerate(e.to_string()),
            e => Failure::Data(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let env_snapshot = std::env::var_os(SNAPSHOT_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from);
    let result = RunConfig::resolve(&cli.command, cli.options, env_snapshot)
        .and_then(|cfg| commands::run(&cli.command, &cfg, &mut std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("wikirel: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
