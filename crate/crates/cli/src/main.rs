//! Command line front end for the observability-aware tracking library:
//! one-shot assignments, full tracking simulations and benchmark sweeps.

mod assign;
mod benchmark;
mod simulate;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use obstrack_core::Error;

#[derive(Parser)]
#[command(
    name = "obstrack",
    version,
    about = "Observability-aware sensor-to-target assignment and tracking simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one assignment problem from a scenario config.
    Assign(assign::AssignArgs),
    /// Run a tracking simulation; writes trace.csv and summary.json.
    Simulate(simulate::SimulateArgs),
    /// Run a randomized benchmark sweep; writes one CSV per sweep.
    Benchmark(benchmark::BenchmarkArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Bad flags share the config exit code; --help and --version
            // exit cleanly.
            let code = u8::from(e.exit_code() != 0);
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Assign(args) => assign::run(&args),
        Command::Simulate(args) => simulate::run(&args),
        Command::Benchmark(args) => benchmark::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 1 for configuration and I/O problems, 2 when the instance is infeasible
/// for the requested problem.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::TooFewSensors { .. } | Error::TooFewPairs { .. } | Error::InfeasibleMatching => 2,
        _ => 1,
    }
}
