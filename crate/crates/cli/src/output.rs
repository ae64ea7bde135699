//! CSV, TSV and manifest writers.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::rows::{aggregate, Record};

/// Version string recorded in every manifest.
pub const VERSION: &str = env!("SWIPT_VERSION");

/// Paths of the files written by one run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFiles {
    pub rows: PathBuf,
    pub aggregate: PathBuf,
    pub summary: PathBuf,
    pub manifest: PathBuf,
}

impl OutputFiles {
    pub fn new(dir: &Path, experiment: &str) -> Self {
        Self {
            rows: dir.join(format!("{experiment}_rows.csv")),
            aggregate: dir.join(format!("{experiment}_aggregate.csv")),
            summary: dir.join(format!("{experiment}_summary.tsv")),
            manifest: dir.join(format!("{experiment}_manifest.json")),
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_default()
}

pub fn write_rows<R: Record>(path: &Path, rows: &[R]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// One line per group: key columns, row counts, then the metric means.
pub fn write_aggregate<R: Record>(path: &Path, rows: &[R]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    let mut header: Vec<String> = R::KEY_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.push("rows".into());
    header.push("succeeded".into());
    header.extend(R::METRIC_COLUMNS.iter().map(|m| format!("mean_{m}")));
    w.write_record(&header)?;
    for agg in aggregate(rows) {
        let mut rec = agg.key.clone();
        rec.push(agg.rows.to_string());
        rec.push(agg.succeeded.to_string());
        rec.extend(agg.means.iter().map(|m| fmt_opt(*m)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Two-column `metric<TAB>value` table.
pub fn write_summary(path: &Path, entries: &[(String, String)]) -> anyhow::Result<()> {
    let mut text = String::from("metric\tvalue\n");
    for (k, v) in entries {
        text.push_str(&format!("{k}\t{v}\n"));
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    experiment: &'a str,
    preset: &'a str,
    seed: u64,
    trials: usize,
    settings: Vec<(&'a str, &'a str)>,
    rows: usize,
    succeeded: usize,
    files: Vec<String>,
}

pub fn write_manifest(files: &OutputFiles, cfg: &ExperimentConfig, rows: usize, succeeded: usize) -> anyhow::Result<()> {
    let name = |p: &Path| p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let manifest = Manifest {
        tool: "swipt-alloc",
        version: VERSION,
        experiment: cfg.experiment.as_str(),
        preset: cfg.preset.as_str(),
        seed: cfg.seed,
        trials: cfg.trials,
        settings: cfg.entries.iter().filter(|(k, _)| k != "workers" && k != "out").map(|(k, v)| (k.as_str(), v.as_str())).collect(),
        rows,
        succeeded,
        files: [&files.rows, &files.aggregate, &files.summary].iter().map(|p| name(p)).collect(),
    };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    fs::write(&files.manifest, text).with_context(|| format!("cannot write {}", files.manifest.display()))
}
