//! `rbill`: runs one configured experiment and writes CSV and SVG artifacts.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{CommandFactory, Parser};
use refraction_billiard::Execution;

use crate::commands::RunContext;
use crate::config::{Command, RunConfig};

/// Exit status for an empty command; distinct from success and from errors.
const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "rbill", version, about = "Refractive Kepler-harmonic billiards: return maps, orbits and caustics")]
struct Cli {
    /// TOML config with [params], [profile] and [command] tables.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory for CSV and SVG files.
    #[arg(long, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Worker threads for parallel sweeps; 1 runs sequentially, 0 uses all cores.
    #[arg(long, value_name = "N", default_value_t = 0)]
    workers: usize,
    /// Progress and file notes on stderr.
    #[arg(long)]
    verbose: bool,
}

fn usage() -> String {
    let mut s = Cli::command().render_usage().to_string();
    s.push_str("\n\nSet `command` in the [command] table to one of: ");
    s.push_str(&Command::names());
    s
}

fn execute(cli: &Cli, config: &RunConfig, cmd: Command) -> Result<Vec<String>> {
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let exec = if cli.workers == 1 { Execution::Sequential } else { Execution::Parallel };
    let ctx = RunContext { config, out: &cli.out, exec, verbose: cli.verbose };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build()?;
    pool.install(|| commands::run(cmd, &ctx))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match RunConfig::from_file(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    let Some(cmd) = config.command else {
        eprintln!("{}", usage());
        return ExitCode::from(EXIT_USAGE);
    };
    match execute(&cli, &config, cmd) {
        Ok(lines) => {
            for l in lines {
                println!("{l}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
