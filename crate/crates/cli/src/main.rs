// SPDX-License-Identifier: Apache-2.0

//! `nfl`: batch runner for learner, forecaster and category experiments.
//!
//! Exit codes: 0 success, 1 a case contradicts `expect`, 2 configuration
//! or input error, 3 resource or budget error.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use nfl_core::seq_core::set_default_cache_cap;

use config::{Command, ExperimentConfig, FileConfig, Overrides};

#[derive(Debug, Parser)]
#[command(name = "nfl", version, about = "Run extrapolation, forecasting and category experiments")]
struct Cli {
    /// Subcommand; may instead be given as `command` in the config file.
    #[arg(value_enum)]
    command: Option<Command>,
    /// TOML config; flags override its values.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
}

const EXIT_EXPECT: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

fn env_usize(name: &str) -> Result<Option<usize>, String> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| format!("{name}={v:?} is not a non-negative integer")),
        Err(_) => Ok(None),
    }
}

fn apply_env() -> Result<(), String> {
    if let Some(cap) = env_usize("NFL_CACHE_CAP")? {
        set_default_cache_cap(cap);
    }
    if let Some(n) = env_usize("NFL_WORKERS")? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = apply_env() {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let file = match &cli.config {
        Some(p) => match config::load_file(p) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
        None => FileConfig::default(),
    };
    let cfg = match ExperimentConfig::resolve(cli.command, file, cli.overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };

    let start = Instant::now();
    let report = match commands::run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(if e.is_resource() { EXIT_RESOURCE } else { EXIT_CONFIG });
        }
    };
    let elapsed = start.elapsed().as_secs_f64();

    if let Err(e) = report::write_report(&report, &cfg.out) {
        eprintln!("error: {e:#}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let timing = serde_json::json!({ "wall_clock_secs": elapsed, "cases": report.cases.len() });
    if let Err(e) = std::fs::write(cfg.out.join("timing.json"), format!("{timing}\n")) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }

    for c in &report.cases {
        match (&c.verdict, &c.error) {
            (Some(v), _) => println!("{:<13} {}", v.to_string(), c.key),
            (None, Some(e)) => println!("{:<13} {}: {}", "error", c.key, e.message),
            (None, None) => println!("{:<13} {}", "-", c.key),
        }
    }
    println!("{} cases, report in {} ({elapsed:.2}s)", report.cases.len(), cfg.out.display());

    if report.any_resource_error() {
        ExitCode::from(EXIT_RESOURCE)
    } else if report.any_other_error() {
        ExitCode::from(EXIT_CONFIG)
    } else if report.expectation_failed() {
        ExitCode::from(EXIT_EXPECT)
    } else {
        ExitCode::SUCCESS
    }
}
