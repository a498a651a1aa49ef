use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

#[derive(Debug, Parser)]
#[command(name = "pst", version, about = "Protected single-photon state transfer simulations")]
pub struct Cli {
    /// TOML file with default settings; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the protocol once and compare with the closed form.
    Transfer(TransferArgs),
    /// Evaluate a grid of angles and channel strengths.
    Sweep(SweepArgs),
    /// Locate the distilled-teleportation advantage threshold.
    Threshold(ThresholdArgs),
    /// Cross-check the engine against the oracle, channel and closed forms.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Depolarizing,
    Dephasing,
}

/// Engine settings shared by the simulating commands.
#[derive(Debug, Default, Args)]
pub struct EngineArgs {
    /// Dimensionless crystal coupling.
    #[arg(long)]
    pub g: Option<f64>,
    /// Initial pump amplitude (real).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Photon-number truncation per path mode.
    #[arg(long)]
    pub nmax: Option<u8>,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    /// Qubit angle in degrees, 0 to 90.
    #[arg(long)]
    pub theta: f64,
    /// Qubit phase in degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    /// Depolarization probability of each path.
    #[arg(long)]
    pub p: Option<f64>,
    /// Depolarization rate in 1/s; needs --distance.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Path length in metres; needs --gamma.
    #[arg(long)]
    pub distance: Option<f64>,
    /// Dephasing of path 1; needs --beta2.
    #[arg(long)]
    pub beta1: Option<f64>,
    /// Dephasing of path 2; needs --beta1.
    #[arg(long)]
    pub beta2: Option<f64>,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Default, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub channel: Option<Channel>,
    #[arg(long)]
    pub theta_min: Option<f64>,
    #[arg(long)]
    pub theta_max: Option<f64>,
    #[arg(long)]
    pub theta_steps: Option<usize>,
    /// Qubit phase in degrees.
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub p_min: Option<f64>,
    #[arg(long)]
    pub p_max: Option<f64>,
    #[arg(long)]
    pub p_steps: Option<usize>,
    #[arg(long)]
    pub beta_min: Option<f64>,
    #[arg(long)]
    pub beta_max: Option<f64>,
    #[arg(long)]
    pub beta_steps: Option<usize>,
    /// Fixed dephasing of path 2; by default it follows the swept value.
    #[arg(long)]
    pub beta2: Option<f64>,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Output file; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (PST_WORKERS overrides).
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Bisection tolerance on p.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Pump photon-number truncation of the oracle.
    #[arg(long)]
    pub pump_nmax: Option<u8>,
    /// Absolute tolerance applied to every check instead of its own.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}
