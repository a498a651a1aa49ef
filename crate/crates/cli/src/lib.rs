//! Command-line front end: `transfer`, `sweep`, `threshold` and `validate`.
//!
//! Exit codes: 0 on success, 1 for computational, validation or I/O
//! failures, 2 for usage errors.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::io::Write;

use crate::cli::{Cli, Command};
use crate::config::{workers_from_env, FileConfig, SweepConfig, WORKERS_ENV};
use crate::error::Result;

/// Runs a parsed command line, writing results to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    match &cli.command {
        Command::Transfer(args) => commands::transfer::run(args, &file, out),
        Command::Sweep(args) => {
            let env = std::env::var(WORKERS_ENV).ok();
            let config = SweepConfig::resolve(args, &file, workers_from_env(env.as_deref())?)?;
            commands::sweep::run(&config, out)
        }
        Command::Threshold(args) => commands::threshold::run(args, &file, out),
        Command::Validate(args) => commands::validate::run(args, &file, out),
    }
}
