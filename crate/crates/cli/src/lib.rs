//! Command-line front end: configuration, file formats and experiment
//! drivers for the `mtmct` binary.

pub mod commands;
pub mod config;
pub mod experiment;
pub mod formats;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use mtmct_core::sampler::SamplingMode;

use crate::config::RunConfig;
use crate::experiment::SweepParam;

#[derive(Debug, Parser)]
#[command(name = "mtmct", version, about = "Multi-camera tracking with locality-aware appearance metrics")]
pub struct Cli {
    /// Flat key = value configuration file; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Only pair inter-camera positives across topology neighbors.
    #[arg(long, global = true)]
    pub strict_neighbors: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic scenario directory.
    Simulate {
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a pair metric on the scenario's training split.
    TrainMetric {
        scenario: PathBuf,
        #[arg(long, value_parser = parse_mode)]
        mode: SamplingMode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Track the scenario's test split and write a result file.
    Track {
        scenario: PathBuf,
        /// baseline, oracle, intra|inter|global, or name:path.
        #[arg(long)]
        sct: Option<String>,
        #[arg(long)]
        mct: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a result file against the scenario's test truth.
    Evaluate { scenario: PathBuf, result: PathBuf },
    /// Median IDF1 of every variant over several training seeds, or a
    /// sampling-window sweep.
    Compare {
        scenario: PathBuf,
        #[arg(long)]
        sweep: Option<SweepParam>,
        /// Comma-separated window lengths for --sweep.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<u64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_mode(s: &str) -> Result<SamplingMode, String> {
    s.parse().map_err(|e: mtmct_core::Error| e.to_string())
}

pub fn run(cli: Cli, w: &mut dyn Write) -> anyhow::Result<()> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.strict_neighbors {
        cfg.strict_neighbors = true;
    }
    match cli.command {
        Command::Simulate { out } => commands::simulate(&cfg, &out, w),
        Command::TrainMetric { scenario, mode, out } => commands::train_metric(&cfg, &scenario, mode, &out, w),
        Command::Track { scenario, sct, mct, out } => {
            let sct = sct.unwrap_or_else(|| cfg.sct_scorer.clone());
            let mct = mct.unwrap_or_else(|| cfg.mct_scorer.clone());
            commands::track(&cfg, &scenario, &sct, &mct, &out, w)
        }
        Command::Evaluate { scenario, result } => commands::evaluate(&scenario, &result, w),
        Command::Compare { scenario, sweep, grid, out } => {
            anyhow::ensure!(sweep.is_some() || grid.is_none(), "--grid requires --sweep");
            let sweep = sweep.map(|p| {
                let base = match p {
                    SweepParam::TauS => cfg.tau_s,
                    SweepParam::TauM => cfg.tau_m,
                };
                (p, grid.unwrap_or_else(|| vec![(base / 4).max(1), base, base * 4]))
            });
            commands::compare(&cfg, &scenario, sweep, out.as_deref(), w)
        }
    }
}
