//! `lenlift`: build length-instructed benchmarks and preference data,
//! generate against them, and evaluate with violation-gated win rates.

mod commands;
mod manifest;
mod settings;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use commands::CliError;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "lenlift",
    version,
    about = "Length-instructed benchmarks, preference-pair augmentation, and gated pairwise evaluation",
    long_about = None
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count words in text using the benchmark's counting rules
    Count(commands::CountArgs),
    /// Augment preference triples with length-instructed pairs
    Augment(commands::AugmentArgs),
    /// Build a length-instructed benchmark from prompts and reference generations
    BuildBench(commands::BuildBenchArgs),
    /// Shrink benchmark targets by a scale factor
    ScaleBench(commands::ScaleBenchArgs),
    /// Generate model responses over a benchmark
    Generate(commands::GenerateArgs),
    /// Gate generations on length and judge the survivors pairwise
    Evaluate(commands::EvaluateArgs),
    /// Re-evaluate violation rates across shrinking length limits
    Sweep(commands::SweepArgs),
    /// Emit CSV/SVG charts and the summary for a finished run
    Report(commands::ReportArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful exits; usage errors are
            // configuration errors (exit 1).
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let result = match cli.command {
        Command::Count(args) => commands::count(args),
        Command::Augment(args) => commands::augment(args),
        Command::BuildBench(args) => commands::build_bench(args),
        Command::ScaleBench(args) => commands::scale_bench(args),
        Command::Generate(args) => commands::generate(args),
        Command::Evaluate(args) => commands::evaluate(args),
        Command::Sweep(args) => commands::sweep(args),
        Command::Report(args) => commands::report(args),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ CliError::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e @ CliError::Runtime(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
