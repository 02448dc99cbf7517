use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qcap_core::LogBase;
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "qcap", version, about = "Coherent-information bounds, error exponents and concatenated-code simulation for Pauli channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coherent-information bound c_n of one code at one channel.
    Bound(BoundArgs),
    /// c_n over a grid of depolarizing parameters, as CSV.
    Sweep(SweepArgs),
    /// Inner-code error exponent E(R).
    Exponent(ExponentArgs),
    /// Monte Carlo failure rate of a concatenated code.
    Simulate(SimulateArgs),
    /// Exact ensemble bound on the concatenated-code infidelity.
    Fbound(FboundArgs),
    /// Array bound against the dense density-matrix computation.
    OracleCheck(BoundArgs),
    /// List catalog codes.
    Catalog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Depolarizing,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
pub enum LogBaseArg {
    #[default]
    #[value(name = "d")]
    #[serde(rename = "d")]
    D,
    #[value(name = "2")]
    #[serde(rename = "2")]
    Two,
    #[value(name = "e")]
    #[serde(rename = "e")]
    E,
}

impl From<LogBaseArg> for LogBase {
    fn from(b: LogBaseArg) -> Self {
        match b {
            LogBaseArg::D => LogBase::D,
            LogBaseArg::Two => LogBase::Two,
            LogBaseArg::E => LogBase::E,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ChannelArgs {
    /// Field size; taken from the code file when omitted there.
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long, value_enum, default_value_t = ChannelKind::Depolarizing)]
    pub channel: ChannelKind,
    /// Depolarizing parameter.
    #[arg(long)]
    pub p: Option<f64>,
    /// File of `i j prob` lines for --channel custom.
    #[arg(long)]
    pub probs: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutArgs {
    /// Write the artifact here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundArgs {
    /// Catalog name (rep7, trivial1, five_qubit) or code file.
    #[arg(long)]
    pub code: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_enum, default_value_t)]
    pub log_base: LogBaseArg,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long)]
    pub code: String,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub p_min: f64,
    #[arg(long)]
    pub p_max: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t)]
    pub log_base: LogBaseArg,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExponentArgs {
    #[arg(long)]
    pub code: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub channel: ChannelArgs,
    /// Outer rate R in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    pub rate: f64,
    /// Also report the grid-search value with this many steps per unit.
    #[arg(long)]
    pub oracle_grid: Option<u32>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SimulateArgs {
    /// Inner code: catalog name or code file.
    #[arg(long)]
    pub inner: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub channel: ChannelArgs,
    /// `random` (fresh code per trial), `once` (one random code) or a code file.
    #[arg(long, default_value = "random")]
    pub outer: String,
    /// Number of inner blocks.
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub blocks: usize,
    /// Logical qudits of the concatenated code.
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub logical: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include per-trial outcomes.
    #[arg(long)]
    pub trace: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FboundArgs {
    #[arg(long)]
    pub inner: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub channel: ChannelArgs,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub blocks: usize,
    #[arg(long = "K")]
    #[serde(rename = "K")]
    pub logical: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}
