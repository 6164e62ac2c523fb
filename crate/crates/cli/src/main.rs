use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use levyratio_cli::{run, Command as RunnerCommand, Invocation, OutputFormat};

/// Simulation and numerical analysis of randomly weighted self-normalized
/// subordinators.
#[derive(Parser)]
#[command(name = "levyratio", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Experiment configuration file.
    #[arg(long, global = true, default_value = "levyratio.cfg")]
    config: PathBuf,

    /// Override the seed from the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for batch generation (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Override the output directory from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Override the data file format from the config.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate ratio batches and write them with their sidecars.
    Simulate,
    /// Tabulate the limit CDF and density over a grid.
    Limit,
    /// Scan the measure's asymptotic ratio conditions and classify it.
    Diagnose,
    /// Compare simulated batches against a target law; nonzero exit on fail.
    Verify,
    /// Print the expected R integral next to its Monte Carlo estimate.
    ErRt,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Simulate => RunnerCommand::Simulate,
        Cmd::Limit => RunnerCommand::Limit,
        Cmd::Diagnose => RunnerCommand::Diagnose,
        Cmd::Verify => RunnerCommand::Verify,
        Cmd::ErRt => RunnerCommand::ErRt,
    };
    let code = run(&Invocation {
        command,
        config_path: cli.config,
        seed_override: cli.seed,
        jobs: cli.jobs,
        out_override: cli.out,
        format_override: cli.format.map(|f| match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }),
    });
    ExitCode::from(code as u8)
}
