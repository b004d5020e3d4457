//! `csflow` — run curve shortening flow experiments from flat config
//! files: evolve curves, estimate entropy, analyze singularities,
//! generate the reference library, and verify recorded trajectories.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use config::RunConfig;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "csflow", version, about = "Curve shortening flow laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration file (`section.key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for reports and curve files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Seed for the randomized initial-data generators.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the flow and record a trajectory.
    Evolve,
    /// Estimate the entropy of the initial curve.
    Entropy,
    /// Evolve into the singularity, classify it, and match the profile.
    Blowup,
    /// Generate and validate the reference profile library.
    Reference,
    /// Re-check the evolution identities on a recorded trajectory.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config_path = match &cli.config {
        Some(p) => p.clone(),
        None => {
            eprintln!("error: --config <path> is required");
            return ExitCode::from(1);
        }
    };
    let run = match RunConfig::load(&config_path, cli.seed) {
        Ok(run) => run,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Command::Evolve => commands::cmd_evolve(&run, &cli.out),
        Command::Entropy => commands::cmd_entropy(&run, &cli.out),
        Command::Blowup => commands::cmd_blowup(&run, &cli.out),
        Command::Reference => commands::cmd_reference(&run, &cli.out),
        Command::Verify => commands::cmd_verify(&run, &cli.out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}
