//! `memdd`: scenario harness for the three-species drift-diffusion solver.
//!
//! Exit codes: 0 success, 2 configuration problem, 3 numerical failure
//! (including monitor violations).

mod config;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CliError, Config};

#[derive(Parser)]
#[command(
    name = "memdd",
    version,
    about = "Degenerate drift-diffusion scenarios: relaxation, bias sweeps, refinement studies"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the scenario described by a TOML config
    Run {
        config: PathBuf,
        /// Output directory for records.csv, snapshots and summary.txt
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Validate a config and echo the effective settings
    Check { config: PathBuf },
    /// Mesh-refinement study of the configured problem
    Converge {
        config: PathBuf,
        /// Levels to run, doubling the resolution each time
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Output directory for convergence.csv
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print the exponent table for the given diffusion exponents
    Exponents {
        /// Comma-separated alpha values in (1, 3)
        #[arg(long, value_delimiter = ',', required = true)]
        alpha: Vec<f64>,
    },
}

fn dispatch(cmd: Cmd) -> Result<(), CliError> {
    match cmd {
        Cmd::Run { config, out } => scenario::cmd_run(Config::load(&config)?, &out),
        Cmd::Check { config } => scenario::cmd_check(&Config::load(&config)?),
        Cmd::Converge {
            config,
            levels,
            out,
        } => scenario::cmd_converge(Config::load(&config)?, levels, &out),
        Cmd::Exponents { alpha } => scenario::cmd_exponents(&alpha),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
