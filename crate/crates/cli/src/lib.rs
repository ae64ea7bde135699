//! Experiment driver: configuration, Monte Carlo sweeps and result files.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod output;
pub mod rows;
pub mod selftest;

use std::fs;

use anyhow::Context;

use config::{Experiment, ExperimentConfig};
use output::{write_aggregate, write_manifest, write_rows, write_summary, OutputFiles};
use rows::{MoopRow, Record, SecureRow, SelftestRow};

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub files: OutputFiles,
    pub rows: usize,
    pub succeeded: usize,
    /// Process exit code: nonzero when every row failed, or when any
    /// self-test check failed.
    pub exit_code: i32,
}

/// Rows of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum RunRows {
    Moop(Vec<MoopRow>),
    Secure(Vec<SecureRow>),
    Selftest(Vec<SelftestRow>),
}

/// Compute the rows of an experiment without writing anything.
pub fn compute(cfg: &ExperimentConfig) -> anyhow::Result<RunRows> {
    Ok(match cfg.experiment {
        Experiment::MoopRegion => RunRows::Moop(experiments::moop_region(cfg)?),
        Experiment::MoopPairwise => RunRows::Moop(experiments::moop_pairwise(cfg)?),
        Experiment::SecureSweep => RunRows::Secure(experiments::secure_sweep(cfg)?),
        Experiment::SolverSelftest => RunRows::Selftest(selftest::run_selftest(cfg)?),
    })
}

fn count<R: Record>(rows: &[R]) -> usize {
    rows.iter().filter(|r| r.succeeded()).count()
}

fn max_of(values: impl Iterator<Item = Option<f64>>) -> String {
    values.flatten().fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v)))).map(|v| format!("{v:?}")).unwrap_or_default()
}

fn write_all<R: Record>(files: &OutputFiles, rows: &[R], mut summary: Vec<(String, String)>) -> anyhow::Result<usize> {
    let ok = count(rows);
    summary.push(("rows".into(), rows.len().to_string()));
    summary.push(("succeeded".into(), ok.to_string()));
    summary.push(("failed".into(), (rows.len() - ok).to_string()));
    write_rows(&files.rows, rows)?;
    write_aggregate(&files.aggregate, rows)?;
    write_summary(&files.summary, &summary)?;
    Ok(ok)
}

/// Run an experiment and write its files into the configured directory.
pub fn run(cfg: &ExperimentConfig) -> anyhow::Result<RunOutcome> {
    fs::create_dir_all(&cfg.out_dir).with_context(|| format!("cannot create {}", cfg.out_dir.display()))?;
    let files = OutputFiles::new(&cfg.out_dir, cfg.experiment.as_str());
    let head = vec![
        ("experiment".to_string(), cfg.experiment.to_string()),
        ("preset".to_string(), cfg.preset.as_str().to_string()),
        ("seed".to_string(), cfg.seed.to_string()),
        ("trials".to_string(), cfg.trials.to_string()),
    ];
    let (rows, succeeded, selftest_failed) = match compute(cfg)? {
        RunRows::Moop(rows) => {
            let mut s = head;
            s.push(("max_rank_ratio".into(), max_of(rows.iter().map(|r| r.rank_ratio))));
            s.push(("max_energy_norm".into(), max_of(rows.iter().map(|r| r.energy_norm))));
            (rows.len(), write_all(&files, &rows, s)?, false)
        }
        RunRows::Secure(rows) => {
            let mut s = head;
            s.push(("max_rank_ratio".into(), max_of(rows.iter().map(|r| r.max_rank_ratio))));
            let flagged = rows.iter().filter(|r| !r.violations.is_empty()).count();
            s.push(("rows_with_violations".into(), flagged.to_string()));
            (rows.len(), write_all(&files, &rows, s)?, false)
        }
        RunRows::Selftest(rows) => {
            let mut s = head;
            s.push(("max_rank_ratio".into(), selftest::max_rank_ratio(&rows).map(|v| format!("{v:?}")).unwrap_or_default()));
            let ok = write_all(&files, &rows, s)?;
            (rows.len(), ok, ok < rows.len())
        }
    };
    write_manifest(&files, cfg, rows, succeeded)?;
    let exit_code = i32::from(succeeded == 0 || selftest_failed);
    Ok(RunOutcome { files, rows, succeeded, exit_code })
}
