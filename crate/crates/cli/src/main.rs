//! `linxfer`: generate instances, compare parameter-setting strategies,
//! transfer linear schedules, scan landscapes and sample circuits.
//!
//! Exit status is 0 on success, 2 on a usage error and 1 when a run fails.

mod commands;
mod inputs;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{compare, fitline, generate, landscape, oracle, sample, transfer};
use inputs::UsageError;

#[derive(Debug, Parser)]
#[command(name = "linxfer", version, about = "Linearized QAOA parameter transfer experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a random instance as JSON.
    Generate(generate::GenerateArgs),
    /// Ground-state energy by enumeration or annealing.
    Oracle(oracle::OracleArgs),
    /// Approximation ratios of each strategy over instances and depths.
    Compare(compare::CompareArgs),
    /// Apply linear parameters with and without normalization; sample both.
    Transfer(transfer::TransferArgs),
    /// Exact expectation over a plane of linear parameters.
    Landscape(landscape::LandscapeArgs),
    /// Least-squares lines through a schedule's angles.
    Fitline(fitline::FitlineArgs),
    /// Measurement histogram of one schedule on one instance.
    Sample(sample::SampleArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => generate::run(a),
        Command::Oracle(a) => oracle::run(a),
        Command::Compare(a) => compare::run(a),
        Command::Transfer(a) => transfer::run(a),
        Command::Landscape(a) => landscape::run(a),
        Command::Fitline(a) => fitline::run(a),
        Command::Sample(a) => sample::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if closed_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn closed_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
    })
}
