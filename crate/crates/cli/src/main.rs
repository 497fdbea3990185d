mod commands;
mod common;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

/// Sample correlated equilibria between two parties without a mediator.
#[derive(Debug, Parser)]
#[command(name = "ce-sampler", version, about)]
struct Cli {
    /// Worker threads for trials and batteries (0 uses every core).
    #[arg(long, global = true, env = "CE_SAMPLER_JOBS", default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute a correlated equilibrium of a bimatrix game.
    SolveCe(commands::solve::Args),
    /// Run the sampling protocol and write a JSON-lines transcript.
    Run(commands::run::Args),
    /// Play the extended game many times and report payoffs and verdicts.
    Play(commands::play::Args),
    /// Exact analysis of the best deviation by one party.
    Analyze(commands::analyze::Args),
    /// Run the acceptance checks and print a pass/fail table.
    Reproduce(commands::reproduce::Args),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
        eprintln!("error: cannot start worker pool: {e}");
        return ExitCode::from(2);
    }
    let result = match cli.command {
        Command::SolveCe(a) => commands::solve::run(a),
        Command::Run(a) => commands::run::run(a),
        Command::Play(a) => commands::play::run(a),
        Command::Analyze(a) => commands::analyze::run(a),
        Command::Reproduce(a) => commands::reproduce::run(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
