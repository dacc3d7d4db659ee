//! `hsps`: theory curves, tag-stream simulation, coincidence analysis and
//! curve comparison for a heralded single-photon source.

// `!(x > 0.0)` style checks are deliberate: they reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod units;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::Overrides;

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Io(String),
    CompareFailed,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Io(m) => f.write_str(m),
            CliError::CompareFailed => f.write_str("comparison failed"),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Io(_) => 2,
            CliError::CompareFailed => 3,
        }
    }
}

impl From<hsps_core::Error> for CliError {
    fn from(e: hsps_core::Error) -> Self {
        match e {
            hsps_core::Error::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "hsps", version, about = "Heralded single-photon source coherence toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Full coincidence window 2τ_coin, e.g. "0.78 ns".
    #[arg(long)]
    window: Option<String>,
    /// Jitter half-width of every detector, e.g. "0.35 ns".
    #[arg(long)]
    jitter: Option<String>,
    /// Pair rate, e.g. "1 MHz".
    #[arg(long)]
    rate: Option<String>,
    /// Correlation width, as a time or as a bandwidth ("3 THz").
    #[arg(long)]
    corr_width: Option<String>,
    /// Acquisition time, e.g. "10 s".
    #[arg(long)]
    duration: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            rate: self.rate.clone(),
            corr_width: self.corr_width.clone(),
            jitter: self.jitter.clone(),
            window: self.window.clone(),
            duration: self.duration.clone(),
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write analytic ḡ_si², ḡ_c² and the window sweep.
    Theory(RunArgs),
    /// Simulate a tag stream.
    Simulate(RunArgs),
    /// Estimate ḡ_si² and ḡ_c² from a tag file.
    Analyze {
        tagfile: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare an analytic and an estimated curve.
    Compare {
        analytic: PathBuf,
        estimated: PathBuf,
        /// Per-point |z| limit.
        #[arg(long, default_value_t = hsps_core::compare::DEFAULT_THRESHOLD)]
        threshold: f64,
        /// Directory for compare.json and the manifest.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let res = match &cli.command {
        Command::Theory(run) => commands::theory(run, &argv),
        Command::Simulate(run) => commands::simulate(run, &argv),
        Command::Analyze { tagfile, run } => commands::analyze(tagfile, run, &argv),
        Command::Compare { analytic, estimated, threshold, out } => {
            commands::compare(analytic, estimated, *threshold, out, &argv)
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hsps: {e}");
            ExitCode::from(e.code())
        }
    }
}
