use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod error;
mod output;
mod scenarios;

use config::{Plan, RawConfig, SCENARIOS};
use error::CliError;

/// Environment variable that overrides the worker thread count.
const THREADS_VAR: &str = "DOTSPIN_THREADS";

#[derive(Parser)]
#[command(name = "dotspin", version, about = "Two-qubit decoherence in nuclear spin baths")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write its CSV output
    Run { config: PathBuf },
    /// Check a configuration and print derived quantities
    Validate { config: PathBuf },
    /// List the available scenarios
    ListScenarios,
}

fn load(path: &Path) -> Result<Plan, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
    let raw: RawConfig = toml::from_str(&text).map_err(|source| CliError::Parse { path: path.into(), source })?;
    config::validate(&raw, path).map_err(CliError::Validation)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation(vec![format!("{THREADS_VAR}: expected a positive integer (got {value:?})")]))?;
    // fails only if a pool already exists, which cannot happen this early
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn run(path: &Path) -> Result<(), CliError> {
    let plan = load(path)?;
    let outcome = scenarios::run(&plan)?;
    let mut buf = Vec::new();
    output::write_csv(&outcome.series, &mut buf)?;
    fs::write(&plan.output, buf).map_err(|source| CliError::Write { path: plan.output.clone(), source })?;
    for line in &outcome.summary {
        println!("{line}");
    }
    println!("wrote {} rows to {}", outcome.series.len(), plan.output.display());
    match outcome.failure {
        Some(msg) => Err(CliError::Numerical(msg)),
        None => Ok(()),
    }
}

fn validate(path: &Path) -> Result<(), CliError> {
    let plan = load(path)?;
    for line in config::report(&plan)? {
        println!("{line}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match &cli.command {
        Command::Run { config } => run(config),
        Command::Validate { config } => validate(config),
        Command::ListScenarios => {
            for (name, about) in SCENARIOS {
                println!("{name:<18} {about}");
            }
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
