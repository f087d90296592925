//! Result files: `trials.csv`, `summary.json` and `sweep.csv`.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;
use crate::engine::{CampaignStats, TrialResult};
use crate::error::{Result, SimError};

pub const TRIALS_COLUMNS: [&str; 13] = [
    "seed",
    "environment",
    "alpha",
    "beta",
    "gamma",
    "gbs_density",
    "strategy",
    "delta_hsm",
    "handover_count",
    "outage_steps",
    "total_steps",
    "handover_frequency",
    "outage_probability",
];

pub const SWEEP_COLUMNS: [&str; 12] = [
    "environment",
    "alpha",
    "beta",
    "gamma",
    "gbs_density",
    "delta_hsm",
    "strategy",
    "n_trials",
    "handover_frequency_mean",
    "handover_frequency_std",
    "outage_probability_mean",
    "outage_probability_std",
];

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> SimError + '_ {
    move |source| SimError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SimError + '_ {
    move |source| SimError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(io_err(dir)),
        _ => Ok(()),
    }
}

pub fn trials_csv(trials: &[TrialResult]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(TRIALS_COLUMNS).expect("in-memory write");
    for t in trials {
        w.write_record([
            t.seed.to_string(),
            t.environment.clone(),
            t.alpha.to_string(),
            t.beta.to_string(),
            t.gamma.to_string(),
            t.gbs_density.to_string(),
            t.strategy.to_string(),
            t.delta_hsm.to_string(),
            t.handover_count.to_string(),
            t.outage_steps.to_string(),
            t.total_steps.to_string(),
            t.handover_frequency.to_string(),
            t.outage_probability.to_string(),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn sweep_csv(rows: &[CampaignStats]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_COLUMNS).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.environment.clone(),
            r.alpha.to_string(),
            r.beta.to_string(),
            r.gamma.to_string(),
            r.gbs_density.to_string(),
            r.delta_hsm.to_string(),
            r.strategy.to_string(),
            r.n_trials.to_string(),
            r.handover_frequency.mean.to_string(),
            r.handover_frequency.std.to_string(),
            r.outage_probability.mean.to_string(),
            r.outage_probability.std.to_string(),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub n_trials: usize,
    pub base_seed: u64,
    /// Set when waypoints were sampled on a grid other than one TTT interval.
    pub custom_sampling: bool,
    pub stats: &'a [CampaignStats],
}

pub fn summary_json(cfg: &RunConfig, n_trials: usize, stats: &[CampaignStats]) -> String {
    let summary = Summary {
        n_trials,
        base_seed: cfg.base_seed,
        custom_sampling: cfg.uses_custom_sampling(),
        stats,
    };
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    text
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, bytes).map_err(io_err(path))
}

/// One row of a results file, reduced to what the plots need.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub environment: String,
    pub gbs_density: f64,
    pub delta_hsm: f64,
    pub strategy: String,
    pub handover_frequency: f64,
    pub outage_probability: f64,
}

/// Reads either `trials.csv` or `sweep.csv`.
///
/// Sweep files carry `*_mean` metric columns; trial files carry the raw
/// per-flight metrics. Only the declared columns are consulted.
pub fn read_metric_rows(path: &Path) -> Result<Vec<MetricRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let headers = reader.headers().map_err(csv_err(path))?.clone();
    let find = |name: &str| headers.iter().position(|h| h == name);
    let require = |name: &str| find(name).ok_or_else(|| SimError::MissingColumn(name.to_string()));
    let env = require("environment")?;
    let density = require("gbs_density")?;
    let delta = require("delta_hsm")?;
    let strategy = require("strategy")?;
    let hf = find("handover_frequency_mean").map_or_else(|| require("handover_frequency"), Ok)?;
    let op = find("outage_probability_mean").map_or_else(|| require("outage_probability"), Ok)?;

    let number = |record: &csv::StringRecord, idx: usize| -> Result<f64> {
        record[idx]
            .trim()
            .parse::<f64>()
            .map_err(|e| SimError::Config(format!("{}: column `{}`: {e}", path.display(), &headers[idx])))
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err(path))?;
        rows.push(MetricRow {
            environment: record[env].to_string(),
            gbs_density: number(&record, density)?,
            delta_hsm: number(&record, delta)?,
            strategy: record[strategy].to_string(),
            handover_frequency: number(&record, hf)?,
            outage_probability: number(&record, op)?,
        });
    }
    Ok(rows)
}
