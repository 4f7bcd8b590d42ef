//! `seabreak` command-line interface.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 partial failure (some series skipped or failed).

mod args;
mod breaks;
mod output;
mod panel_build;
mod stats;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// How a command failed.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Data(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 1,
            Failure::Data(_) => 2,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Config(e) | Failure::Data(e) => e,
        }
    }
}

/// Successful run; `partial` when some series were skipped or failed.
pub struct Completion {
    pub partial: bool,
}

pub type CmdResult = Result<Completion, Failure>;

pub fn data_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Data(e.into())
}

pub fn config_err(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::PanelBuild(a) => panel_build::run(&a),
        Command::Breaks(a) => breaks::run(&a),
        Command::Stats(a) => stats::run(&a),
    };
    match result {
        Ok(Completion { partial: false }) => ExitCode::SUCCESS,
        Ok(Completion { partial: true }) => ExitCode::from(3),
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}
