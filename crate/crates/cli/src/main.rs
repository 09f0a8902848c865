//! `navbench`: simulate, ingest and evaluate waypoint navigation benchmarks.
//!
//! Exit status: 0 success, 1 bad input, 2 internal error, 3 ambiguous data.

mod config;
mod error;
mod eval;
mod frames;
mod ingest;
mod output;
mod sim;

use std::panic;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use error::CliError;

#[derive(Parser)]
#[command(
    name = "navbench",
    version,
    about = "Waypoint navigation benchmark toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    Sim(sim::SimArgs),
    EvalWaypoints(eval::EvalArgs),
    EvalFrames(frames::FramesArgs),
    Ingest(ingest::IngestArgs),
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Sim(a) => sim::run(a),
        Command::EvalWaypoints(a) => eval::run(a),
        Command::EvalFrames(a) => frames::run(a),
        Command::Ingest(a) => ingest::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match panic::catch_unwind(|| dispatch(cli.command)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
        Err(_) => ExitCode::from(2),
    }
}
