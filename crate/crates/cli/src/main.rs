//! `microgrid` — hourly simulation and sizing optimization of islanded
//! hybrid microgrids from a single TOML configuration.
//!
//! Exit codes: 0 success, 2 configuration error, 3 runtime error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use microgrid_core::error::Error;

use crate::config::RunConfig;

#[derive(Parser)]
#[command(name = "microgrid", version, about = "Islanded hybrid microgrid simulator and sizing optimizer")]
struct Cli {
    /// Configuration file (TOML); defaults to the bundled island-resort study.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the configuration seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for optimizer evaluation (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one year of the configured system and write a report.
    Simulate {
        /// Also write the 8760-row hourly trace CSV.
        #[arg(long)]
        trace: bool,
    },
    /// Enumerate the search space, rank feasible systems by net present cost.
    Optimize {
        /// Evaluate a seeded latin-hypercube sample instead of the full space.
        #[arg(long)]
        sample: Option<usize>,
        /// Double every continuous axis step.
        #[arg(long)]
        coarse: bool,
    },
    /// Re-optimize across a solar/wind resource grid and map the winners.
    Sensitivity {
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long)]
        coarse: bool,
    },
    /// Print the complete default configuration to standard output.
    DumpDefaults,
}

fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::Config(_) | Error::InvalidInput(_) | Error::Csv { .. } => 2,
        _ => 3,
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::defaults(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<(), Error> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::Config("--jobs must be at least 1".to_string()));
        }
        // Ignore the error when a pool already exists (tests call run twice).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    match &cli.command {
        Command::Simulate { trace } => {
            let config = load_config(&cli)?;
            commands::cmd_simulate(&config, *trace)
        }
        Command::Optimize { sample, coarse } => {
            let config = load_config(&cli)?;
            commands::cmd_optimize(&config, *sample, *coarse)
        }
        Command::Sensitivity { sample, coarse } => {
            let config = load_config(&cli)?;
            commands::cmd_sensitivity(&config, *sample, *coarse)
        }
        Command::DumpDefaults => commands::cmd_dump_defaults(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(exit_code_for(&error))
        }
    }
}
