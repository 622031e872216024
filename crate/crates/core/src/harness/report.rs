use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TomographyError};

use super::config::ExperimentConfig;
use super::run::TrialResult;

/// Linear-interpolation quantile of ascending `sorted` data, with the k-th
/// smallest value (1-based) placed at probability (k − ½)/n and constant
/// extrapolation beyond the first and last points.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let n = sorted.len();
    let pos = (q.clamp(0.0, 1.0) * n as f64 - 0.5).clamp(0.0, (n - 1) as f64);
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if frac == 0.0 || lo + 1 == n {
        return sorted[lo];
    }
    let (a, b) = (sorted[lo], sorted[lo + 1]);
    if b == f64::INFINITY {
        return b;
    }
    a + frac * (b - a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub infid_q1: f64,
    pub infid_median: f64,
    pub infid_q3: f64,
    pub time_mean_s: f64,
    /// Sample standard deviation; zero for a single trial.
    pub time_std_s: f64,
    /// Trials that produced an estimate.
    pub completed: usize,
    pub failed: usize,
}

/// Quartiles of the infidelity and mean/std of the reconstruction time over
/// the successful trials.
pub fn summarize(results: &[TrialResult]) -> Result<Summary> {
    let ok: Vec<&TrialResult> = results.iter().filter(|r| r.is_ok()).collect();
    if ok.is_empty() {
        return Err(TomographyError::invalid("no successful trials to summarize"));
    }
    let mut infid: Vec<f64> = ok.iter().filter_map(|r| r.infidelity).collect();
    infid.sort_by(f64::total_cmp);
    let n = ok.len() as f64;
    let mean = ok.iter().map(|r| r.wall_seconds).sum::<f64>() / n;
    let std = if ok.len() < 2 {
        0.0
    } else {
        (ok.iter().map(|r| (r.wall_seconds - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Ok(Summary {
        infid_q1: quantile(&infid, 0.25),
        infid_median: quantile(&infid, 0.5),
        infid_q3: quantile(&infid, 0.75),
        time_mean_s: mean,
        time_std_s: std,
        completed: ok.len(),
        failed: results.len() - ok.len(),
    })
}

pub const CSV_HEADER: &str = "algorithm,m,N,N_b,dist_kind,dist_param,trials,infid_q1,infid_median,infid_q3,time_mean_s,time_std_s,master_seed";

/// One CSV line. `N_b` is `sparse` for unbinned runs and `dist_param` is
/// empty for the uniform law. Quartiles use linear interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "N_b")]
    pub n_b: String,
    pub dist_kind: String,
    pub dist_param: Option<f64>,
    pub trials: usize,
    pub infid_q1: f64,
    pub infid_median: f64,
    pub infid_q3: f64,
    pub time_mean_s: f64,
    pub time_std_s: f64,
    pub master_seed: u64,
}

impl SummaryRow {
    pub fn new(cfg: &ExperimentConfig, summary: &Summary) -> Self {
        Self {
            algorithm: cfg.algorithm.to_string(),
            m: cfg.qubits,
            n: cfg.events,
            n_b: cfg.binning.to_string(),
            dist_kind: cfg.distribution.kind().to_string(),
            dist_param: cfg.distribution.param(),
            trials: cfg.trials,
            infid_q1: summary.infid_q1,
            infid_median: summary.infid_median,
            infid_q3: summary.infid_q3,
            time_mean_s: summary.time_mean_s,
            time_std_s: summary.time_std_s,
            master_seed: cfg.master_seed,
        }
    }
}

pub fn write_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut write = || -> csv::Result<()> {
        w.write_record(CSV_HEADER.split(','))?;
        for row in rows {
            w.write_record(row_fields(row))?;
        }
        w.flush()?;
        Ok(())
    };
    write().map_err(|e| TomographyError::Serialization {
        path: "<csv>".into(),
        message: e.to_string(),
    })
}

fn row_fields(row: &SummaryRow) -> [String; 13] {
    [
        row.algorithm.clone(),
        row.m.to_string(),
        row.n.to_string(),
        row.n_b.clone(),
        row.dist_kind.clone(),
        row.dist_param.map(|p| p.to_string()).unwrap_or_default(),
        row.trials.to_string(),
        row.infid_q1.to_string(),
        row.infid_median.to_string(),
        row.infid_q3.to_string(),
        row.time_mean_s.to_string(),
        row.time_std_s.to_string(),
        row.master_seed.to_string(),
    ]
}

pub fn emit_csv(rows: &[SummaryRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| TomographyError::io(path, e))?;
    write_csv(rows, BufWriter::new(file)).map_err(|e| relabel(e, path))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<SummaryRow>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| TomographyError::io(path, e))?;
    csv::Reader::from_reader(BufReader::new(file))
        .deserialize()
        .collect::<csv::Result<Vec<SummaryRow>>>()
        .map_err(|e| TomographyError::Serialization {
            path: path.into(),
            message: e.to_string(),
        })
}

/// A benchmark point as stored in JSON: the full configuration, its summary
/// row, and the individual trial results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: ExperimentConfig,
    pub summary: SummaryRow,
    pub trials: Vec<TrialResult>,
}

pub fn emit_json(reports: &[BenchmarkReport], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| TomographyError::io(path, e))?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, reports).map_err(|e| TomographyError::Serialization {
        path: path.into(),
        message: e.to_string(),
    })?;
    out.flush().map_err(|e| TomographyError::io(path, e))
}

pub fn read_json(path: impl AsRef<Path>) -> Result<Vec<BenchmarkReport>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| TomographyError::io(path, e))?;
    serde_json::from_reader(BufReader::new(file)).map_err(|e| TomographyError::Serialization {
        path: path.into(),
        message: e.to_string(),
    })
}

fn relabel(err: TomographyError, path: &Path) -> TomographyError {
    match err {
        TomographyError::Serialization { message, .. } => TomographyError::Serialization {
            path: path.into(),
            message,
        },
        other => other,
    }
}
