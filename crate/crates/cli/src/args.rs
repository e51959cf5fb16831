use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use splitfuzz::DefuzzMethod;

use crate::OUT_DIR_ENV;

#[derive(Debug, Parser)]
#[command(name = "splitfuzz", version, about = "Fuzzy split-range separator pressure control workbench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one closed-loop simulation and write series, metrics and plots.
    Simulate(SimulateArgs),
    /// Run the IPE x method sweep and write one table per method plus a summary.
    Sweep(SweepArgs),
    /// Generate valve data and search the ARX order grid.
    Sysid(SysidArgs),
    /// Serve the JSON API.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Toggle {
    On,
    Off,
}

pub fn parse_method(s: &str) -> Result<DefuzzMethod, String> {
    s.parse::<DefuzzMethod>().map_err(|_| format!("unknown method `{s}`; valid methods: {}", DefuzzMethod::names()))
}

fn parse_band(s: &str) -> Result<f64, String> {
    match s.trim() {
        "2" => Ok(2.0),
        "5" => Ok(5.0),
        _ => Err(format!("band must be 2 or 5, got `{s}`")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TOML configuration with plant, controller, variable and rule overrides.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV, default_value = "out")]
    pub out: PathBuf,
    /// Noise seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Plant overrides shared by `simulate` and `sweep`. Unset flags keep the
/// configuration file (or built-in) values.
#[derive(Debug, Clone, Default, Args)]
pub struct PlantArgs {
    /// Setpoint in bar.
    #[arg(long)]
    pub setpoint: Option<f64>,
    /// Simulated time in seconds.
    #[arg(long)]
    pub duration: Option<f64>,
    /// Integration and control step in seconds.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub fuel_gain: Option<f64>,
    #[arg(long)]
    pub outlet_gain: Option<f64>,
    /// Base inflow factor.
    #[arg(long)]
    pub fuel_flow: Option<f64>,
    /// Base outflow factor.
    #[arg(long)]
    pub base_outflow: Option<f64>,
    /// Measurement noise standard deviation in bar.
    #[arg(long)]
    pub noise: Option<f64>,
    /// Valve transport delay in seconds.
    #[arg(long)]
    pub delay: Option<f64>,
    /// Identified valve dynamics.
    #[arg(long, value_enum)]
    pub actuator: Option<Toggle>,
    /// Settling band in percent of the setpoint.
    #[arg(long, value_parser = parse_band)]
    pub band: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub plant: PlantArgs,
    /// Initial pressure in bar.
    #[arg(long)]
    pub initial: Option<f64>,
    /// Defuzzification method.
    #[arg(long, value_parser = parse_method)]
    pub method: Option<DefuzzMethod>,
    /// Skip the SVG plots.
    #[arg(long)]
    pub no_plot: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub plant: PlantArgs,
    /// Comma-separated subset of methods.
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    pub methods: Option<Vec<DefuzzMethod>>,
    /// Comma-separated seeds; metrics are averaged over them.
    #[arg(long, value_delimiter = ',', conflicts_with = "seed")]
    pub seeds: Option<Vec<u64>>,
    /// Suppress per-cell progress on stderr.
    #[arg(long, short)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SysidArgs {
    #[command(flatten)]
    pub common: Common,
    /// Number of samples.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Sample time in seconds.
    #[arg(long, default_value_t = 0.5)]
    pub dt: f64,
    /// Identify from an existing `t_s,u,y` file instead of generating data.
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Port; 0 picks a free one.
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: String,
    /// Allowed CORS origin; any origin when unset.
    #[arg(long)]
    pub cors_origin: Option<String>,
    /// Per-request compute limit in seconds.
    #[arg(long, default_value_t = 120)]
    pub timeout_secs: u64,
}
