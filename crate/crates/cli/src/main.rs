//! `lab`: runs kreinlab experiments described by a TOML file.
//!
//! Exit codes: 0 success, 2 invalid config, 3 numerical error or failed check.

mod config;
mod experiments;
mod output;

use clap::{Parser, Subcommand};
use config::{ConfigFile, ExperimentKind};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error("invalid config: {0}")]
    Validation(String),
    #[error(transparent)]
    Numerical(#[from] kreinlab::LabError),
    #[error("{0}")]
    Failed(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Validation(_) => 2,
            _ => 3,
        }
    }
}

#[derive(Parser)]
#[command(name = "lab", version, about = "Run kreinlab experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every experiment in a config file.
    Run { config: PathBuf },
    /// List the available experiments.
    List,
}

fn list() {
    println!("{:<22} {:<16} description", "experiment", "required keys");
    for k in ExperimentKind::ALL {
        let keys = k.required_keys().join(",");
        println!("{:<22} {:<16} {} \u{2192} {}", k.name(), if keys.is_empty() { "-" } else { &keys }, k.name(), k.tag());
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation(format!("LAB_THREADS must be a positive integer (got {value:?})")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Failed(e.to_string()))
}

fn run_one(cfg: &config::ExperimentConfig, dir: &std::path::Path) -> Result<(), CliError> {
    let resolved = cfg.resolved();
    let outcome = experiments::run(&resolved)?;
    let mut summary = outcome.summary.clone();
    summary.insert("warnings".into(), outcome.warnings.clone().into());
    summary.insert("failures".into(), outcome.failures.clone().into());
    let csv_path = dir.join(format!("{}.csv", cfg.name));
    output::write_atomic(&csv_path, &outcome.table.to_csv()?)?;
    let meta = output::meta_text(&resolved, &summary)?;
    output::write_atomic(&dir.join(format!("{}.meta", cfg.name)), meta.as_bytes())?;
    for w in &outcome.warnings {
        eprintln!("warning: {}: {w}", cfg.name);
    }
    if outcome.failures.is_empty() {
        println!("{}: {} rows -> {}", cfg.name, outcome.table.rows.len(), csv_path.display());
        Ok(())
    } else {
        Err(CliError::Failed(format!(
            "{} check(s) failed:\n  {}",
            outcome.failures.len(),
            outcome.failures.join("\n  ")
        )))
    }
}

fn run(path: &std::path::Path) -> Result<(), CliError> {
    let cfg = ConfigFile::load(path)?;
    configure_threads()?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    let mut first_error = None;
    for e in &cfg.experiment {
        if let Err(err) = run_one(e, &cfg.output_dir) {
            eprintln!("error: experiment {:?}: {err}", e.name);
            first_error.get_or_insert(err);
        }
    }
    first_error.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            list();
            ExitCode::SUCCESS
        }
        Command::Run { config } => match run(&config) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                if matches!(err, CliError::Config { .. } | CliError::Validation(_)) {
                    eprintln!("error: {err}");
                }
                ExitCode::from(err.exit_code())
            }
        },
    }
}
