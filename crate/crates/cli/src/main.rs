//! Experiment runner: parses a run configuration, dispatches to the solvers,
//! and writes CSV/JSON results plus a run manifest.
//!
//! Usage: `cablerod <command> <config-path> [key=value ...]` with optional
//! `--output-dir`, `--format`, `--quiet`. Exit codes: 0 success, 2 config
//! error, 3 solver nonconvergence, 4 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cablerod_cli::config::{ExperimentConfig, OutputFormat};
use cablerod_cli::figure::{self, FigureKind};
use cablerod_cli::runner::{self, RunManifest};

#[derive(Parser)]
#[command(
    name = "cablerod",
    version,
    about = "Planar cable-driven continuum rod solvers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form forward model; writes the backbone shape.
    Forward(RunArgs),
    /// Differential inverse kinematics along a trajectory; writes the log.
    Inverse(RunArgs),
    /// Distributed-load boundary-value solve; writes the backbone shape.
    Loading(RunArgs),
    /// Disk-discretized energy minimization; writes shape and chords.
    Discrete(RunArgs),
    /// Discrete-to-continuous convergence study; writes the sweep table.
    Sweep(RunArgs),
    /// Direct functional minimization; writes the backbone shape.
    Oracle(RunArgs),
    /// Plot-ready data from a previous run's manifest.
    Figure(FigureArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the TOML run configuration.
    config: PathBuf,
    /// Dotted-path overrides, e.g. actuation.value=2.0
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Overrides output.dir from the config.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Overrides output.format from the config.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Suppress the summary line.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct FigureArgs {
    /// Path to a manifest.json from a previous run.
    manifest: PathBuf,
    /// Overrides, e.g. kind=tracking (defaults to the kind implied by the run).
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Directory for the figure file; defaults to the manifest's directory.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    quiet: bool,
}

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_IO: u8 = 4;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Forward(a) => run_solver("forward", a),
        Command::Inverse(a) => run_solver("inverse", a),
        Command::Loading(a) => run_solver("loading", a),
        Command::Discrete(a) => run_solver("discrete", a),
        Command::Sweep(a) => run_solver("sweep", a),
        Command::Oracle(a) => run_solver("oracle", a),
        Command::Figure(a) => run_figure(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let code = classify(&err);
            let record = serde_json::json!({
                "error": {
                    "message": format!("{err:#}"),
                    "exit_code": code,
                }
            });
            eprintln!("{record}");
            ExitCode::from(code)
        }
    }
}

fn run_solver(command: &str, args: &RunArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", args.config.display()))?;
    let mut cfg = ExperimentConfig::from_toml(&text, &args.overrides)?;
    if let Some(dir) = &args.output_dir {
        cfg.output.dir = dir.to_string_lossy().into_owned();
    }
    if let Some(format) = args.format {
        cfg.output.format = format;
    }
    let outcome = runner::run(command, &cfg)?;
    if !args.quiet {
        let m = &outcome.manifest;
        let metrics: Vec<String> = m
            .metrics
            .iter()
            .map(|(k, v)| format!("{k}={v:.6e}"))
            .collect();
        println!(
            "{command}: wrote {} file(s), manifest {}; {}",
            m.outputs.len(),
            outcome.manifest_path.display(),
            metrics.join(" ")
        );
    }
    Ok(())
}

fn run_figure(args: &FigureArgs) -> anyhow::Result<()> {
    let manifest = RunManifest::read(&args.manifest)?;
    let mut kind = None;
    for ov in &args.overrides {
        match ov.split_once('=') {
            Some(("kind", v)) => kind = Some(FigureKind::parse(v)?),
            _ => anyhow::bail!("config error: unsupported figure override '{ov}'"),
        }
    }
    let kind = match kind {
        Some(k) => k,
        None => FigureKind::infer(&manifest)?,
    };
    let dir = match &args.output_dir {
        Some(d) => d.clone(),
        None => args
            .manifest
            .parent()
            .map(|p| p.to_path_buf())
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    std::fs::create_dir_all(&dir)?;
    let path = figure::emit_figure_data(&manifest, kind, &dir)?;
    if !args.quiet {
        println!("figure: wrote {}", path.display());
    }
    Ok(())
}

/// Maps error kinds onto the documented exit codes.
fn classify(err: &anyhow::Error) -> u8 {
    if let Some(core_err) = err.downcast_ref::<cablerod::Error>() {
        use cablerod::Error::*;
        return match core_err {
            NonConvergence(_) | Divergence(_) | NonFiniteIntegrand { .. } => EXIT_SOLVER,
            InvalidParameter(_)
            | Domain(_)
            | Contract(_)
            | ActuationMode { .. }
            | Profile(_)
            | PhysicalValidity(_)
            | Config(_) => EXIT_CONFIG,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return EXIT_IO;
    }
    let text = format!("{err:#}");
    if text.contains("solver failed") || text.contains("nonconvergence") {
        EXIT_SOLVER
    } else if text.contains("cannot read") || text.contains("cannot create") {
        EXIT_IO
    } else {
        EXIT_CONFIG
    }
}
