//! `freezing-dyson`: zeros, convolutions, freezing limits, simulations and CLT
//! reports from the command line.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::CliError;

#[derive(Parser, Debug)]
#[command(name = "freezing-dyson", version, about = "Freezing-regime beta Dyson and Laguerre toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Output file (stdout when omitted)
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Output format [default: csv]
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// JSON file with parameter values; command-line flags take precedence
    #[arg(long)]
    config: Option<std::path::PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scaled zeros of the Hermite or Laguerre polynomial of degree n
    Zeros(commands::ZerosArgs),
    /// Finite free convolution of two root tuples read from CSV files
    Convolve(commands::ConvolveArgs),
    /// Deterministic freezing limit at time t
    Limit(commands::LimitArgs),
    /// Euler–Maruyama paths of the beta Dyson or Laguerre process
    Simulate(commands::SimulateArgs),
    /// Monte Carlo CLT covariance report for the static beta ensembles
    Clt(commands::CltArgs),
    /// Moment sequence u_0..u_max of the Gaussian freezing limit
    Moments(commands::MomentsArgs),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("FREEZING_DYSON_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("FREEZING_DYSON_THREADS must be a positive integer, got {raw:?}")))?;
    if threads == 0 {
        return Err(CliError::Usage("FREEZING_DYSON_THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Zeros(a) => commands::zeros(a),
        Command::Convolve(a) => commands::convolve(a),
        Command::Limit(a) => commands::limit(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Clt(a) => commands::clt(a),
        Command::Moments(a) => commands::moments(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
