//! `swipt-alloc <experiment> [--config FILE] [--seed N] [--trials N] [--out DIR]`

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use swipt_cli::config::{parse_override, Experiment, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(name = "swipt-alloc", version = swipt_cli::output::VERSION, about = "Run SWIPT resource-allocation experiments")]
struct Args {
    /// moop-region, moop-pairwise, secure-sweep or solver-selftest.
    experiment: String,
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 picks one per core.
    #[arg(long)]
    workers: Option<usize>,
    /// Extra `key=value` setting, applied after the file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> anyhow::Result<u8> {
    let args = Args::parse();
    let experiment: Experiment = args.experiment.parse()?;
    let text = match &args.config {
        Some(p) => Some(std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?),
        None => None,
    };
    let mut overrides = args.set.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>, _>>()?;
    if let Some(s) = args.seed {
        overrides.push(("seed".into(), s.to_string()));
    }
    if let Some(t) = args.trials {
        overrides.push(("trials".into(), t.to_string()));
    }
    if let Some(o) = &args.out {
        overrides.push(("out".into(), o.display().to_string()));
    }
    if let Some(w) = args.workers {
        overrides.push(("workers".into(), w.to_string()));
    }
    let cfg = ExperimentConfig::load(experiment, text.as_deref(), &overrides)?;
    let outcome = swipt_cli::run(&cfg)?;
    eprintln!("{}: {} of {} rows succeeded; wrote {}", cfg.experiment, outcome.succeeded, outcome.rows, outcome.files.rows.display());
    Ok(outcome.exit_code as u8)
}
