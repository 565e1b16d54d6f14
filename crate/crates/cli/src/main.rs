//! `slowreveal`: publish a semiprime commitment to a hidden winner, reveal
//! one digit per day, crack it under a compute budget, verify the completed
//! reveal, and simulate when market prices can first reflect the winner.

mod commands;
mod config;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand};
use config::RunConfigFile;
use rand::Rng;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "slowreveal", version, about)]
struct Cli {
    /// Run configuration file (JSON)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Built-in run configuration: paper or desk
    #[arg(long, global = true, value_name = "NAME", conflicts_with = "config")]
    preset: Option<String>,

    /// Directory for bulletin, secret, and report files
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Random seed; omitted, one is drawn from the OS and printed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Division tests allowed per crack attempt
    #[arg(long, global = true)]
    budget: Option<u64>,

    /// Digits to reveal in one invocation (default 1)
    #[arg(long, global = true)]
    count: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the secret, publish the bulletin and code list
    Setup,
    /// Append the next digit(s) of the committed prime to the bulletin
    Reveal,
    /// Try to recover the committed prime from a bulletin under a budget
    Crack {
        /// Path to a bulletin file
        bulletin: PathBuf,
    },
    /// Check a completed reveal and name the winner
    Verify {
        /// Path to a bulletin file
        bulletin: PathBuf,
    },
    /// Run the day-by-day market simulation and export CSV reports
    Simulate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Setup => {
            let run = load_run_config(&cli)?;
            let out = out_dir(&cli, &run)?;
            let seed = resolve_seed(&cli, &run);
            commands::cmd_setup(&run, &out, seed)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Reveal => {
            let Some(out) = cli.out.as_deref() else {
                bail!("reveal requires --out pointing at a setup directory");
            };
            commands::cmd_reveal(out, cli.count.unwrap_or(1))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Crack { bulletin } => {
            let Some(budget) = cli.budget else {
                bail!("crack requires --budget");
            };
            commands::cmd_crack(bulletin, budget)
        }
        Command::Verify { bulletin } => commands::cmd_verify(bulletin),
        Command::Simulate => {
            let run = load_run_config(&cli)?;
            let out = out_dir(&cli, &run)?;
            let seed = resolve_seed(&cli, &run);
            commands::cmd_simulate(&run, &out, seed)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn load_run_config(cli: &Cli) -> Result<RunConfigFile> {
    match (&cli.config, &cli.preset) {
        (Some(path), _) => RunConfigFile::load(path),
        (None, Some(name)) => RunConfigFile::preset(name),
        (None, None) => bail!("provide --config FILE or --preset paper|desk"),
    }
}

fn out_dir(cli: &Cli, run: &RunConfigFile) -> Result<PathBuf> {
    match cli.out.clone().or_else(|| run.output_dir.clone()) {
        Some(dir) => Ok(dir),
        None => bail!("provide --out DIR (or outputDir in the config file)"),
    }
}

/// Precedence: --seed flag, then the config file, then OS entropy.
fn resolve_seed(cli: &Cli, run: &RunConfigFile) -> u64 {
    cli.seed
        .or(run.seed)
        .unwrap_or_else(|| rand::rngs::OsRng.gen())
}
