use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fraclap_cli::config::JobConfig;
use fraclap_cli::jobs::{self, RunError};
use fraclap_cli::output::fmt_g15;

#[derive(Parser)]
#[command(
    name = "fraclap",
    version,
    about = "Fractional Schrödinger spectra on sinc collocation grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the job described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Override a config entry, e.g. `--set N=50`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Output directory (overrides `output` in the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in property checks.
    Check,
}

fn run(config: PathBuf, set: Vec<String>, out: Option<PathBuf>) -> Result<(), RunError> {
    let text =
        fs::read_to_string(&config).map_err(|e| RunError::Config(format!("cannot read {}: {e}", config.display())))?;
    let mut cfg = JobConfig::parse(&text, &set)?;
    if let Some(dir) = out {
        cfg.output = dir;
    }
    let tables = jobs::run(&cfg)?;
    for t in &tables {
        let paths = t
            .write(&cfg.output, cfg.format)
            .map_err(|e| RunError::Config(format!("cannot write to {}: {e}", cfg.output.display())))?;
        for p in paths {
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn check() -> ExitCode {
    let outcomes = fraclap_core::check::run_all();
    for o in &outcomes {
        let status = if o.passed() { "PASS" } else { "FAIL" };
        match &o.error {
            Some(e) => println!("{status} {}: error: {e}", o.name),
            None => println!(
                "{status} {}: worst {} (tolerance {})",
                o.name,
                fmt_g15(o.worst),
                fmt_g15(o.tolerance)
            ),
        }
    }
    if outcomes.iter().all(|o| o.passed()) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, set, out } => match run(config, set, out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("fraclap: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Check => check(),
    }
}
