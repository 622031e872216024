use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bayes::BayesSettings;
use crate::error::{Result, TomographyError};
use crate::measurement::PhaseDistribution;
use crate::ml::{CholeskySettings, PgdbSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Bayes,
    Cholesky,
    Pgdb,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Bayes, Algorithm::Cholesky, Algorithm::Pgdb];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Bayes => "bayes",
            Algorithm::Cholesky => "cholesky",
            Algorithm::Pgdb => "pgdb",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = TomographyError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| TomographyError::invalid(format!("unknown algorithm '{s}'")))
    }
}

/// Whether equatorial events are kept sparse or coarse-grained into bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BinningRepr", into = "BinningRepr")]
pub enum Binning {
    Sparse,
    Bins(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BinningRepr {
    Count(usize),
    Word(String),
}

impl TryFrom<BinningRepr> for Binning {
    type Error = TomographyError;

    fn try_from(repr: BinningRepr) -> Result<Self> {
        match repr {
            BinningRepr::Count(n) => Ok(Binning::Bins(n)),
            BinningRepr::Word(w) => w.parse(),
        }
    }
}

impl From<Binning> for BinningRepr {
    fn from(b: Binning) -> Self {
        match b {
            Binning::Sparse => BinningRepr::Word("sparse".into()),
            Binning::Bins(n) => BinningRepr::Count(n),
        }
    }
}

impl Binning {
    pub fn bins(&self) -> Option<usize> {
        match *self {
            Binning::Sparse => None,
            Binning::Bins(n) => Some(n),
        }
    }
}

impl fmt::Display for Binning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binning::Sparse => f.write_str("sparse"),
            Binning::Bins(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for Binning {
    type Err = TomographyError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "sparse" {
            return Ok(Binning::Sparse);
        }
        s.parse()
            .map(Binning::Bins)
            .map_err(|_| TomographyError::invalid(format!("bins must be an integer or 'sparse', got '{s}'")))
    }
}

/// One benchmark point. Serialized as a flat key-value document with the
/// per-algorithm settings as optional tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct ExperimentConfig {
    pub qubits: usize,
    pub algorithm: Algorithm,
    pub events: usize,
    pub binning: Binning,
    pub distribution: PhaseDistribution,
    /// Equatorial reference angle φ (single-qubit records only).
    pub phi: f64,
    pub trials: usize,
    pub master_seed: u64,
    /// Run trials on the rayon pool; results are identical either way.
    pub parallel: bool,
    /// Keep ρ_true and ρ_est in every trial result.
    pub dump_states: bool,
    pub pgdb: PgdbSettings,
    pub cholesky: CholeskySettings,
    pub bayes: BayesSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            qubits: 1,
            algorithm: Algorithm::Pgdb,
            events: 10_000,
            binning: Binning::Sparse,
            distribution: PhaseDistribution::Exponential(std::f64::consts::PI / 8.0),
            phi: 0.0,
            trials: 200,
            master_seed: 0,
            parallel: true,
            dump_states: false,
            pgdb: PgdbSettings::default(),
            cholesky: CholeskySettings::default(),
            bayes: BayesSettings::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=8).contains(&self.qubits) {
            return Err(TomographyError::invalid(format!("qubits must lie in 1..=8, got {}", self.qubits)));
        }
        if self.trials == 0 {
            return Err(TomographyError::invalid("trials must be at least 1"));
        }
        if self.events < 2 || !self.events.is_multiple_of(2) {
            return Err(TomographyError::invalid(format!(
                "event count must be even and at least 2, got {}",
                self.events
            )));
        }
        if let Binning::Bins(n) = self.binning {
            if n < 2 {
                return Err(TomographyError::invalid(format!("bin count must be at least 2, got {n}")));
            }
        }
        if !self.phi.is_finite() {
            return Err(TomographyError::invalid("reference angle must be finite"));
        }
        self.distribution.validate()?;
        self.pgdb.validate()?;
        self.bayes.validate()?;
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| TomographyError::Parse {
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("configuration always serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| TomographyError::io(path, e))?;
        Self::from_toml_str(&text)
    }
}

pub(crate) fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default = "one")]
    qubits: usize,
    algorithm: Algorithm,
    events: usize,
    #[serde(default = "sparse")]
    bins: Binning,
    dist: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    param: Option<f64>,
    #[serde(default)]
    phi: f64,
    trials: usize,
    #[serde(default)]
    master_seed: u64,
    #[serde(default = "yes")]
    parallel: bool,
    #[serde(default)]
    dump_states: bool,
    #[serde(default)]
    pgdb: PgdbSettings,
    #[serde(default)]
    cholesky: CholeskySettings,
    #[serde(default)]
    bayes: BayesSettings,
}

fn one() -> usize {
    1
}

fn yes() -> bool {
    true
}

fn sparse() -> Binning {
    Binning::Sparse
}

impl TryFrom<RawConfig> for ExperimentConfig {
    type Error = TomographyError;

    fn try_from(raw: RawConfig) -> Result<Self> {
        let cfg = ExperimentConfig {
            qubits: raw.qubits,
            algorithm: raw.algorithm,
            events: raw.events,
            binning: raw.bins,
            distribution: PhaseDistribution::from_parts(&raw.dist, raw.param)?,
            phi: raw.phi,
            trials: raw.trials,
            master_seed: raw.master_seed,
            parallel: raw.parallel,
            dump_states: raw.dump_states,
            pgdb: raw.pgdb,
            cholesky: raw.cholesky,
            bayes: raw.bayes,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<ExperimentConfig> for RawConfig {
    fn from(cfg: ExperimentConfig) -> Self {
        RawConfig {
            qubits: cfg.qubits,
            algorithm: cfg.algorithm,
            events: cfg.events,
            bins: cfg.binning,
            dist: cfg.distribution.kind().to_string(),
            param: cfg.distribution.param(),
            phi: cfg.phi,
            trials: cfg.trials,
            master_seed: cfg.master_seed,
            parallel: cfg.parallel,
            dump_states: cfg.dump_states,
            pgdb: cfg.pgdb,
            cholesky: cfg.cholesky,
            bayes: cfg.bayes,
        }
    }
}
