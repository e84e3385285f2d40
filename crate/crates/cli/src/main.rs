//! `ionlink`: run the entanglement-distribution protocol from scenario files.
//!
//! Exit codes: 0 success, 1 output could not be written, 2 config error,
//! 3 numerical failure.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ionlink::dynamics::CoherenceDecay;

use config::{Format, ScenarioConfig};
use error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "ionlink", version, about = "Flying-atom entanglement of two trapped ions")]
struct Cli {
    /// Seed for the brute-force FEF oracle; overrides `oracle.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the protocol once and report the final state and its metrics.
    Simulate(RunArgs),
    /// Run the protocol over the grid in `[sweep]`; CSV, one row per point.
    Sweep(RunArgs),
    /// Check the effective coupling against the full single-cavity model.
    Validate(RunArgs),
    /// Largest flight time (and distance) keeping the FEF at or above 1/2.
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Write here instead of stdout; overrides `output.path`.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Overrides `output.format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CoherenceArg {
    Lindblad,
    FullRate,
}

impl From<CoherenceArg> for CoherenceDecay {
    fn from(c: CoherenceArg) -> Self {
        match c {
            CoherenceArg::Lindblad => CoherenceDecay::Lindblad,
            CoherenceArg::FullRate => CoherenceDecay::FullRate,
        }
    }
}

#[derive(Debug, Args)]
struct BoundsArgs {
    /// Decay rate(s), s^-1; a comma-separated list gives a table.
    #[arg(long, value_delimiter = ',', required = true)]
    gamma: Vec<f64>,
    /// Dephasing rate(s), s^-1.
    #[arg(long = "gamma-p", value_delimiter = ',', default_value = "0")]
    gamma_p: Vec<f64>,
    /// Atom velocity, m/s; adds the distance bound.
    #[arg(long)]
    velocity: Option<f64>,
    /// Coherence decay convention of the FEF closed form.
    #[arg(long, value_enum, default_value = "full-rate")]
    coherence: CoherenceArg,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Loads the config and settles format and destination, flags first.
fn prepare(args: &RunArgs, default_format: Format) -> CliResult<(ScenarioConfig, Format, Option<PathBuf>)> {
    let config = ScenarioConfig::load(&args.config)?;
    let format = args.format.or(config.output.format).unwrap_or(default_format);
    let path = args.output.clone().or_else(|| config.output.path.clone());
    Ok((config, format, path))
}

fn write(text: &str, path: Option<PathBuf>) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate(args) => {
            let (config, format, path) = prepare(&args, Format::Json)?;
            write(&commands::simulate(&config, format, cli.seed)?, path)
        }
        Command::Sweep(args) => {
            let (config, format, path) = prepare(&args, Format::Csv)?;
            write(&commands::sweep(&config, format, cli.seed)?, path)
        }
        Command::Validate(args) => {
            let (config, format, path) = prepare(&args, Format::Json)?;
            write(&commands::validate(&config, format)?, path)
        }
        Command::Bounds(args) => {
            let text = commands::bounds(
                &args.gamma,
                &args.gamma_p,
                args.velocity,
                args.coherence.into(),
                args.format,
            )?;
            write(&text, args.output)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ionlink: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
