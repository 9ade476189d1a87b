//! `okamoto`: run experiments from a JSON config and write `report-v1` documents.
//!
//! Exit status: 0 when every blocking check passes, 1 on a numerical
//! failure, 2 on a usage or schema error.

mod commands;
mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use crate::commands::Ctx;
use crate::config::ExperimentConfig;
use crate::report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

#[derive(Parser, Debug)]
#[command(name = "okamoto", version, about = "Parabolic connections, monodromy and Painlevé VI experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config (for `report`: a report-v1 document).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report destination; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Integration tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Write the report's series as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Picard lattice of the surface and its anti-canonical divisor.
    VerifySurface,
    /// Exact alpha- and phi-stability of a chart connection.
    Stability,
    /// Monodromy of a chart connection.
    Monodromy,
    /// Isomonodromic continuation in t3.
    Continue,
    /// Integrate the Painlevé VI Hamiltonian system.
    Pvi,
    /// Validate a report and re-emit it in canonical form.
    Report,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::VerifySurface => "verify-surface",
            Command::Stability => "stability",
            Command::Monodromy => "monodromy",
            Command::Continue => "continue",
            Command::Pvi => "pvi",
            Command::Report => "report",
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.into(), source })
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Usage(format!("--tol must be a positive number, got {t}")));
        }
    }
    if cli.command == Command::Report {
        let path = cli.config.as_ref().ok_or_else(|| CliError::Usage("report needs --config <report.json>".into()))?;
        return Report::parse(&read(path)?);
    }
    let input: Value = match &cli.config {
        Some(p) => serde_json::from_str(&read(p)?).map_err(|e| CliError::Usage(format!("{}: invalid JSON: {e}", p.display())))?,
        None => Value::Object(Default::default()),
    };
    let cfg: ExperimentConfig = serde_json::from_value(input.clone()).map_err(|e| CliError::Usage(format!("config: {e}")))?;
    cfg.validate()?;
    if let Some(c) = &cfg.command {
        if c != cli.command.name() {
            return Err(CliError::Usage(format!("config is for `{c}`, not `{}`", cli.command.name())));
        }
    }
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    let report = Report::new(cli.command.name(), seed, cli.tol, input);
    let ctx = Ctx { cfg, seed, tol: cli.tol };
    match cli.command {
        Command::VerifySurface => commands::verify_surface(&ctx, report),
        Command::Stability => commands::stability(&ctx, report),
        Command::Monodromy => commands::monodromy_cmd(&ctx, report),
        Command::Continue => commands::continue_cmd(&ctx, report),
        Command::Pvi => commands::pvi_cmd(&ctx, report),
        Command::Report => unreachable!("handled above"),
    }
}

fn output_path(cli: &Cli) -> Option<PathBuf> {
    if cli.out.is_some() || cli.command == Command::Report {
        return cli.out.clone();
    }
    let text = std::fs::read_to_string(cli.config.as_ref()?).ok()?;
    let cfg: ExperimentConfig = serde_json::from_str(&text).ok()?;
    cfg.output.map(PathBuf::from)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|report| {
        let text = report.emit();
        match output_path(&cli) {
            Some(p) => write(&p, &text)?,
            None => print!("{text}"),
        }
        if let Some(p) = &cli.csv {
            let series = report.series.as_ref().ok_or_else(|| CliError::Usage(format!("`{}` produces no series for CSV", report.command)))?;
            write(p, &series.to_csv())?;
        }
        Ok(report)
    });
    match result {
        Ok(report) if report.passed => ExitCode::SUCCESS,
        Ok(report) => {
            for c in report.failing() {
                eprintln!("check failed: {}{}", c.name, c.detail.as_ref().map(|d| format!(" ({d})")).unwrap_or_default());
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
