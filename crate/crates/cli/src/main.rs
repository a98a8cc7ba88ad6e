//! `sdou`: simulate, validate, evaluate transition densities of and
//! benchmark gamma-OU and bilateral-gamma-OU processes.
//!
//! Exit status is 0 on success, 1 when a statistical check fails and 2 for
//! configuration or I/O errors.

mod bench;
mod config;
mod density;
mod error;
mod meta;
mod simulate;
mod validate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "sdou", version, about = "Exact simulation of gamma and bilateral-gamma OU processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate path skeletons on a time grid and write them as CSV.
    #[command(allow_negative_numbers = true)]
    Simulate(simulate::Args),
    /// Check samples of every applicable algorithm against the closed-form oracles.
    #[command(allow_negative_numbers = true)]
    Validate(validate::Args),
    /// Evaluate the transition density and atom on an x grid.
    #[command(allow_negative_numbers = true)]
    Density(density::Args),
    /// Time the algorithms and write comparison and scaling tables.
    #[command(allow_negative_numbers = true)]
    Bench(bench::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => simulate::run(a),
        Command::Validate(a) => validate::run(a),
        Command::Density(a) => density::run(a),
        Command::Bench(a) => bench::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sdou: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
