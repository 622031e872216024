use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, TomographyError};
use crate::linalg::{equatorial_projector, z_down, z_up};
use crate::measurement::{condition_number, sample_phases, PhaseDistribution};

use super::config::{line_of, Algorithm, Binning, ExperimentConfig};
use super::report::{quantile, summarize, BenchmarkReport, SummaryRow};
use super::run::{run_experiment, trial_seed};

/// A base configuration plus optional sweep axes. In the TOML form the axes
/// are the keys `sweep_algorithm`, `sweep_events`, `sweep_bins` and
/// `sweep_param`; every other key belongs to the base configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkPlan {
    pub base: ExperimentConfig,
    pub algorithms: Vec<Algorithm>,
    pub events: Vec<usize>,
    pub bins: Vec<Binning>,
    pub params: Vec<f64>,
}

impl BenchmarkPlan {
    pub fn single(base: ExperimentConfig) -> Self {
        Self {
            base,
            algorithms: Vec::new(),
            events: Vec::new(),
            bins: Vec::new(),
            params: Vec::new(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let parse_err = |e: toml::de::Error| TomographyError::Parse {
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        };
        let mut table: toml::Table = text.parse().map_err(parse_err)?;
        fn axis<T: serde::de::DeserializeOwned>(table: &mut toml::Table, key: &str) -> Result<Vec<T>> {
            match table.remove(key) {
                None => Ok(Vec::new()),
                Some(v) => v
                    .try_into()
                    .map_err(|e: toml::de::Error| TomographyError::invalid(format!("{key}: {}", e.message()))),
            }
        }
        let algorithms = axis(&mut table, "sweep_algorithm")?;
        let events = axis(&mut table, "sweep_events")?;
        let bins = axis(&mut table, "sweep_bins")?;
        let params = axis(&mut table, "sweep_param")?;
        let base = ExperimentConfig::from_toml_str(&toml::to_string(&table).expect("table serializes"))?;
        let plan = Self { base, algorithms, events, bins, params };
        for cfg in plan.configs() {
            cfg?;
        }
        Ok(plan)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| TomographyError::io(path, e))?;
        Self::from_toml_str(&text)
    }

    /// The Cartesian product of the sweep axes, algorithm outermost.
    pub fn configs(&self) -> Vec<Result<ExperimentConfig>> {
        let algorithms = or_base(&self.algorithms, self.base.algorithm);
        let events = or_base(&self.events, self.base.events);
        let bins = or_base(&self.bins, self.base.binning);
        let params: Vec<Option<f64>> = if self.params.is_empty() {
            vec![None]
        } else {
            self.params.iter().copied().map(Some).collect()
        };
        let mut out = Vec::new();
        for &algorithm in &algorithms {
            for &n in &events {
                for &b in &bins {
                    for &p in &params {
                        out.push(self.point(algorithm, n, b, p));
                    }
                }
            }
        }
        out
    }

    fn point(&self, algorithm: Algorithm, events: usize, binning: Binning, param: Option<f64>) -> Result<ExperimentConfig> {
        let distribution = match param {
            None => self.base.distribution,
            Some(p) => PhaseDistribution::from_parts(self.base.distribution.kind(), Some(p))?,
        };
        let cfg = ExperimentConfig {
            algorithm,
            events,
            binning,
            distribution,
            ..self.base.clone()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn or_base<T: Clone>(axis: &[T], base: T) -> Vec<T> {
    if axis.is_empty() {
        vec![base]
    } else {
        axis.to_vec()
    }
}

/// Runs one configuration and packages its summary.
pub fn run_benchmark_point(cfg: &ExperimentConfig) -> Result<BenchmarkReport> {
    let trials = run_experiment(cfg)?;
    let summary = SummaryRow::new(cfg, &summarize(&trials)?);
    Ok(BenchmarkReport {
        config: cfg.clone(),
        summary,
        trials,
    })
}

pub fn run_benchmark(plan: &BenchmarkPlan) -> Result<Vec<BenchmarkReport>> {
    plan.configs()
        .into_iter()
        .map(|cfg| run_benchmark_point(&cfg?))
        .collect()
}

/// Grid for the condition-number study: for each parameter value, `seeds`
/// measurement sets of {z-up, z-down} plus `equatorial` projectors at phases
/// drawn from the chosen law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSweep {
    pub dist_kind: String,
    pub params: Vec<f64>,
    pub equatorial: usize,
    pub seeds: usize,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRow {
    pub dist_kind: String,
    pub param: f64,
    #[serde(rename = "N")]
    pub equatorial: usize,
    pub seeds: usize,
    pub kappa_q1: f64,
    pub kappa_median: f64,
    pub kappa_q3: f64,
}

/// κ of {z-up, z-down} ∪ {P(θ_i)} for one seeded phase draw.
pub fn sampled_condition_number(dist: &PhaseDistribution, equatorial: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ops = vec![z_up(), z_down()];
    for theta in sample_phases(dist, equatorial, &mut rng)? {
        ops.push(equatorial_projector(theta)?);
    }
    Ok(condition_number(&ops))
}

/// Per-seed condition numbers at one grid point (seed i uses the same
/// stream at every grid point).
pub fn condition_samples(dist: &PhaseDistribution, equatorial: usize, seeds: usize, master_seed: u64) -> Result<Vec<f64>> {
    (0..seeds)
        .into_par_iter()
        .map(|i| sampled_condition_number(dist, equatorial, trial_seed(master_seed, i as u64)))
        .collect()
}

pub fn condition_sweep(sweep: &ConditionSweep) -> Result<Vec<ConditionRow>> {
    if sweep.seeds == 0 || sweep.params.is_empty() {
        return Err(TomographyError::invalid("condition sweep needs at least one seed and one parameter"));
    }
    sweep
        .params
        .iter()
        .map(|&param| {
            let dist = PhaseDistribution::from_parts(&sweep.dist_kind, Some(param))?;
            let mut kappas = condition_samples(&dist, sweep.equatorial, sweep.seeds, sweep.master_seed)?;
            kappas.sort_by(f64::total_cmp);
            Ok(ConditionRow {
                dist_kind: dist.kind().to_string(),
                param,
                equatorial: sweep.equatorial,
                seeds: sweep.seeds,
                kappa_q1: quantile(&kappas, 0.25),
                kappa_median: quantile(&kappas, 0.5),
                kappa_q3: quantile(&kappas, 0.75),
            })
        })
        .collect()
}

pub fn write_condition_csv<W: Write>(rows: &[ConditionRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut write = || -> csv::Result<()> {
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    };
    write().map_err(|e| TomographyError::Serialization {
        path: "<csv>".into(),
        message: e.to_string(),
    })
}

pub fn emit_condition_csv(rows: &[ConditionRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| TomographyError::io(path, e))?;
    write_condition_csv(rows, BufWriter::new(file)).map_err(|e| match e {
        TomographyError::Serialization { message, .. } => TomographyError::Serialization {
            path: path.into(),
            message,
        },
        other => other,
    })
}
