//! `sir-rate`: simulate epidemics, fit infection-rate models to removal
//! times, summarize posteriors into credible bands and check the
//! trans-dimensional samplers against their priors.

mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::ExitKind;

#[derive(Debug, Parser)]
#[command(name = "sir-rate", version, about = "Infection-rate inference for partially observed SIR epidemics")]
pub struct Cli {
    /// Directory for all outputs.
    #[arg(long, global = true, env = "SIR_RATE_OUTPUT_DIR", default_value = ".")]
    pub out_dir: PathBuf,
    /// Suppress progress messages on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate an epidemic and write its removal times and ground truth.
    Simulate(commands::simulate::SimulateArgs),
    /// Fit a rate model to removal times and stream posterior samples.
    Fit(commands::fit::FitArgs),
    /// Reduce posterior samples to pointwise 5/50/95% bands on a grid.
    Summarize(commands::summarize::SummarizeArgs),
    /// Run the sampler without data and compare it with direct prior draws.
    ValidatePrior(commands::validate::ValidateArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { ExitKind::Usage as u8 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Simulate(args) => commands::simulate::run(&cli, args),
        Command::Fit(args) => commands::fit::run(&cli, args),
        Command::Summarize(args) => commands::summarize::run(&cli, args),
        Command::ValidatePrior(args) => commands::validate::run(&cli, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.kind as u8)
        }
    }
}
