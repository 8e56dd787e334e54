//! `patchforce`: patch-potential and Casimir pressure curves, fits and
//! Monte Carlo checks from the command line.

mod commands;
mod config;
mod error;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{CliError, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "patchforce", version, about = "Patch-potential and Casimir pressure modeling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Voltage power spectrum C[k] of a patch model.
    Spectrum(RunArgs),
    /// Real-space correlation C(r) of a patch model.
    Correlation(RunArgs),
    /// Patch pressure, force gradient and force versus distance.
    Pressure(RunArgs),
    /// Lifshitz pressure for the Drude and plasma prescriptions.
    Casimir(RunArgs),
    /// Fit patch parameters to a residual dataset.
    Fit(RunArgs),
    /// Refit over a grid of optical parameters.
    Sensitivity(RunArgs),
    /// Monte Carlo ensemble of patch layouts compared with the analytic model.
    Simulate(RunArgs),
    /// Patch areas inside the sphere-plane interaction area.
    Validate(RunArgs),
    /// Registered models, distributions and generators.
    List,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Parameter overrides, `--key value` or `--key=value`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "--KEY VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    let (name, args) = match command {
        Command::List => return commands::list(),
        Command::Spectrum(a) => ("spectrum", a),
        Command::Correlation(a) => ("correlation", a),
        Command::Pressure(a) => ("pressure", a),
        Command::Casimir(a) => ("casimir", a),
        Command::Fit(a) => ("fit", a),
        Command::Sensitivity(a) => ("sensitivity", a),
        Command::Simulate(a) => ("simulate", a),
        Command::Validate(a) => ("validate", a),
    };
    let cfg = RunConfig::load(name, args.config.as_deref(), args.output, &args.overrides)?;
    match name {
        "spectrum" => commands::curves::spectrum(&cfg),
        "correlation" => commands::curves::correlation(&cfg),
        "pressure" => commands::curves::pressure(&cfg),
        "casimir" => commands::casimir::casimir(&cfg),
        "fit" => commands::fit::fit(&cfg),
        "sensitivity" => commands::fit::sensitivity(&cfg),
        "simulate" => commands::simulate::simulate(&cfg),
        _ => commands::validate(&cfg),
    }
}
