//! Command-line harness for `rsfourier`: verification suites with JSON
//! reports, convergence sweeps and kernel step tables as CSV.
//!
//! Exit codes: 0 when every case passes (or the sweep/table was written),
//! 1 when a verification case fails, 2 on configuration, argument or I/O
//! errors.

pub mod config;
pub mod report;
pub mod suites;
pub mod sweep;
pub mod table;

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::config::RunConfig;
use crate::report::RunReport;
use crate::suites::{Context, Suite};
use crate::sweep::SweepArgs;
use crate::table::TableArgs;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] rsfourier::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Parser)]
#[command(name = "rsfourier", version, about = "Verify Stieltjes Fourier identities and run convergence sweeps")]
pub struct Cli {
    /// TOML file with catalog functions and suite parameters.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Write the report or CSV here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Overrides the quadrature absolute tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Overrides the seed for randomized grids.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Print per-case runtimes to stderr.
    #[arg(long, global = true)]
    pub timings: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite and emit a JSON report.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Emit a CSV of residuals against truncation order.
    Sweep(SweepArgs),
    /// Emit the step table of a kernel as CSV.
    Table(TableArgs),
}

impl Cli {
    fn run_config(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(tol) = self.tol {
            cfg.quadrature.abs_tol = tol;
        }
        Ok(cfg)
    }
}

/// Sends `text` to `--out`, or to stdout without it.
pub(crate) fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let io_err = |source| CliError::Io { path: path.to_path_buf(), source };
            File::create(path).map_err(io_err)?.write_all(text.as_bytes()).map_err(io_err)
        }
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source }),
    }
}

/// Runs one verification suite and returns its report.
pub fn verify(suite: Suite, cfg: RunConfig) -> Result<RunReport, CliError> {
    let seed = cfg.seed;
    let ctx = Context::new(cfg)?;
    Ok(RunReport::new(suite.name(), seed, suites::run(suite, &ctx)))
}

fn execute(cli: &Cli) -> Result<i32, CliError> {
    let cfg = cli.run_config()?;
    match &cli.command {
        Command::Verify { suite } => {
            let report = verify(*suite, cfg)?;
            if cli.timings {
                for case in &report.cases {
                    eprintln!("{:>10.1} ms  {}  {}", case.runtime_ms, case.suite, case.name);
                }
            }
            for case in report.cases.iter().filter(|c| !c.pass) {
                eprintln!(
                    "FAIL {} / {}: {:?} {}",
                    case.suite,
                    case.name,
                    case.residual,
                    case.error.as_deref().unwrap_or("")
                );
            }
            eprintln!("{}: {} of {} cases passed", report.suite, report.total - report.failed, report.total);
            emit(cli.out.as_deref(), &report.to_json())?;
            Ok(if report.pass { 0 } else { 1 })
        }
        Command::Sweep(args) => {
            let csv = sweep::run(args, &cfg)?;
            emit(cli.out.as_deref(), &csv)?;
            Ok(0)
        }
        Command::Table(args) => {
            let csv = table::run(args)?;
            emit(cli.out.as_deref(), &csv)?;
            Ok(0)
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
