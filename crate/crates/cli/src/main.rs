//! `lnls`: command-line driver for lattice NLS simulations, continuum-limit
//! studies and uniform-estimate sweeps.
//!
//! Exit codes: 0 success, 1 output failure, 2 bad configuration or usage,
//! 3 numerical failure (an accuracy self-check or an unstable integrator).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use lnls_core::LnlsError;

use config::{parse_float_list, parse_h_list, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "lnls", version, about = "Discrete NLS on the periodic lattice and its continuum limit")]
struct Cli {
    /// JSON run configuration (defaults are used for absent fields).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "lnls-out")]
    out: PathBuf,

    /// Worker threads for the sweeps (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Resolve and validate the configuration, print the plan and stop.
    #[arg(long, global = true)]
    dry_run: bool,

    /// Seed of the random corpus members.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Comma-separated spacings, `pi/M` or decimal, e.g. `pi/8,pi/16,pi/32`.
    #[arg(long, global = true, value_name = "LIST")]
    h_list: Option<String>,

    /// Comma-separated evaluation times.
    #[arg(long, global = true, value_name = "LIST")]
    times: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Evolve one initial datum and record mass and energy.
    Simulate,
    /// Mass drift and energy-drift ratios under step halving.
    Conserve,
    /// Continuum-limit error study with rate fits.
    Converge,
    /// Strichartz ratio sweep for one admissible pair.
    Strichartz,
    /// Dispersive-kernel sup bound sweep over dyadic scales.
    Dispersive,
    /// Bernstein, Sobolev and Gagliardo–Nirenberg ratio sweeps.
    Inequalities,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Conserve => "conserve",
            Command::Converge => "converge",
            Command::Strichartz => "strichartz",
            Command::Dispersive => "dispersive",
            Command::Inequalities => "inequalities",
        }
    }
}

/// Marks errors caused by the configuration or the command line.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(ConfigError(msg.into()))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<LnlsError>() {
            return match e {
                e if e.is_numerical() => 3,
                LnlsError::Io(_) | LnlsError::Json(_) => 1,
                _ => 2,
            };
        }
    }
    1
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path).map_err(|e| config_error(format!("{e:#}")))?,
        None => RunConfig::default(),
    };
    if let Some(list) = &cli.h_list {
        cfg.h_list = parse_h_list(list).map_err(|e| config_error(format!("--h-list: {e:#}")))?;
    }
    if let Some(list) = &cli.times {
        cfg.times = parse_float_list(list).map_err(|e| config_error(format!("--times: {e:#}")))?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(config_error("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("cannot configure the worker pool")?;
    }
    let cfg = resolve(&cli)?;
    commands::dispatch(cli.command, &cfg, &cli.out, cli.dry_run)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("LNLS_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
