use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use super::config::load_config;
use super::orchestrate::{exit_code, orchestrate, RunStatus};

/// Environment variable overriding the configured output directory.
pub const OUTPUT_ENV: &str = "TORSION_FLOW_OUT";

pub const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  configuration or parameter error
  3  invalid body data (non-positive, non-convex, grid too small)
  4  unsupported (n, k, geometry) combination
  5  interior solver failure
  6  flow step size underflow
  7  I/O or snapshot error
  8  verification failure
  9  flow stopped before reaching the residual tolerance";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subcommand {
    SolveInterior,
    Flow,
    CheckHadamard,
    Verify,
    Functionals,
}

#[derive(Debug, Parser)]
#[command(name = "torsion-flow", version, about = "Normalized curvature flow for the torsional Minkowski problem", after_help = EXIT_CODES)]
pub struct Cli {
    /// TOML experiment file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; overrides `[output] dir`.
    #[arg(long, env = OUTPUT_ENV)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub subcommand: Subcommand,
    /// Suppress progress lines.
    #[arg(long)]
    pub quiet: bool,
}

pub fn run_cli(cli: Cli) -> ExitCode {
    let result = load_config(&cli.config).and_then(|cfg| {
        let out = cli.out.clone().unwrap_or_else(|| cfg.output.dir.clone());
        orchestrate(&cfg, cli.subcommand, &out)
    });
    match result {
        Ok(summary) => {
            if !cli.quiet {
                for line in &summary.lines {
                    println!("{line}");
                }
                for file in &summary.files {
                    println!("wrote {}", file.display());
                }
            }
            match summary.status {
                RunStatus::Ok => ExitCode::SUCCESS,
                RunStatus::VerificationFailed => ExitCode::from(8),
                RunStatus::NotConverged => ExitCode::from(9),
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
