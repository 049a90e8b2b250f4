//! `covreg`: fit linear and AR(p) models from CSV files, simulate AR
//! series, run Monte Carlo bias studies and reproduce the Lake Huron table.

mod commands;
mod error;
mod format;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "covreg",
    version,
    about = "Covariance-based regression and AR(p) estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a linear regression from a CSV file.
    Fit(FitArgs),
    /// Fit an AR(p) model three ways and print them side by side.
    ArFit(ArFitArgs),
    /// Simulate an AR(p) series.
    Simulate(SimulateArgs),
    /// Monte Carlo bias study of the covariance-route estimator.
    McBias(McBiasArgs),
    /// Refit the bundled Lake Huron series and compare with published values.
    Tables(TablesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Print table numbers with full round-trip precision instead of 7
    /// significant digits.
    #[arg(long)]
    pub full_precision: bool,
}

impl OutputArgs {
    pub fn digits(&self) -> Option<usize> {
        (!self.full_precision).then_some(7)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitMethod {
    Unbiased,
    Ols,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Comma-separated file with a header row.
    #[arg(long)]
    pub input: PathBuf,
    /// Response column, by name or one-based index.
    #[arg(long)]
    pub response: String,
    /// Predictor columns (comma-separated); defaults to all other columns.
    #[arg(long, value_delimiter = ',')]
    pub predictors: Vec<String>,
    #[arg(long, value_enum, default_value_t = FitMethod::Unbiased)]
    pub method: FitMethod,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ArFitArgs {
    /// One value per line, or a CSV with a header.
    #[arg(long)]
    pub input: PathBuf,
    /// Series column when the input is a multi-column CSV.
    #[arg(long)]
    pub response: Option<String>,
    /// AR order.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub p: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// AR coefficients φ₁,…,φ_p.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        required = true
    )]
    pub phi: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi0: f64,
    /// Innovation standard deviation.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = covreg::timeseries::DEFAULT_BURN_IN)]
    pub burn_in: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Simulate even if the model is not stationary.
    #[arg(long)]
    pub allow_nonstationary: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioKind {
    Additive,
    Heteroscedastic,
    Ar,
}

#[derive(Debug, Args)]
pub struct McBiasArgs {
    #[arg(long, value_enum)]
    pub scenario: ScenarioKind,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Observations per replication.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Worker threads; the report does not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,

    /// additive: intercept.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub intercept: f64,
    /// additive: slopes, one per predictor.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        default_value = "2"
    )]
    pub slopes: Vec<f64>,
    /// additive: mean of every predictor.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub predictor_mean: f64,
    /// additive: standard deviation of every predictor.
    #[arg(long, default_value_t = 1.0)]
    pub predictor_sd: f64,
    /// additive: noise standard deviation.
    #[arg(long, default_value_t = 1.0)]
    pub noise_sd: f64,

    /// heteroscedastic: Y = b1·X1 + b2·X2 + b3·|X1 − X2|·Z.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub b1: f64,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub b2: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub b3: f64,

    /// ar: coefficients φ₁,…,φ_p.
    #[arg(
        long,
        value_delimiter = ',',
        allow_negative_numbers = true,
        default_value = "0.4,0.1,0.3"
    )]
    pub phi: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = covreg::timeseries::DEFAULT_BURN_IN)]
    pub burn_in: usize,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Largest accepted absolute deviation per coefficient.
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn report(e: &CliError) -> ExitCode {
    let message = e.to_string().replace('\n', " ");
    eprintln!("error: {}: {}", e.category(), message.trim());
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            // keep clap's message, drop its usage and help hints
            let rendered = e.to_string();
            let message: Vec<&str> = rendered
                .lines()
                .map(str::trim)
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .filter(|l| !l.is_empty())
                .collect();
            let message = message.join(" ");
            return report(&CliError::Usage(
                message.trim_start_matches("error: ").to_string(),
            ));
        }
    };

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match &cli.command {
        Command::Fit(a) => commands::fit(a, &mut out),
        Command::ArFit(a) => commands::ar_fit(a, &mut out),
        Command::Simulate(a) => commands::simulate(a, &mut out),
        Command::McBias(a) => commands::mc_bias(a, &mut out),
        Command::Tables(a) => commands::tables(a, &mut out),
    };
    let result = result.and_then(|()| out.flush().map_err(CliError::from));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e),
    }
}
