use std::f64::consts::TAU;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, TomographyError};
use crate::linalg::wrap_angle;

/// Law of the random phase error θ, supported on [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "param", rename_all = "lowercase")]
pub enum PhaseDistribution {
    /// p(θ) ∝ exp(−θ/μ), parametrized by the mean μ.
    #[serde(rename = "exp")]
    Exponential(f64),
    /// p(θ) ∝ exp(−θ²/2σ²), parametrized by the standard deviation σ.
    #[serde(rename = "normal")]
    WrappedNormal(f64),
    Uniform,
}

/// How draws outside [0, 2π) are brought back onto the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SupportMode {
    #[default]
    Wrap,
    /// Rejection sampling conditioned on [0, 2π).
    Truncate,
}

impl PhaseDistribution {
    pub fn exponential(mean: f64) -> Result<Self> {
        check_param(mean)?;
        Ok(Self::Exponential(mean))
    }

    pub fn wrapped_normal(std_dev: f64) -> Result<Self> {
        check_param(std_dev)?;
        Ok(Self::WrappedNormal(std_dev))
    }

    /// Builds a distribution from its short kind name (`exp`, `normal`, `uniform`).
    pub fn from_parts(kind: &str, param: Option<f64>) -> Result<Self> {
        match (kind, param) {
            ("exp" | "exponential", Some(p)) => Self::exponential(p),
            ("normal" | "wrapped-normal", Some(p)) => Self::wrapped_normal(p),
            ("uniform", _) => Ok(Self::Uniform),
            ("exp" | "exponential" | "normal" | "wrapped-normal", None) => Err(
                TomographyError::invalid(format!("distribution '{kind}' needs a parameter")),
            ),
            _ => Err(TomographyError::invalid(format!("unknown distribution '{kind}'"))),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Exponential(_) => "exp",
            Self::WrappedNormal(_) => "normal",
            Self::Uniform => "uniform",
        }
    }

    pub fn param(&self) -> Option<f64> {
        match *self {
            Self::Exponential(p) | Self::WrappedNormal(p) => Some(p),
            Self::Uniform => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.param() {
            Some(p) => check_param(p),
            None => Ok(()),
        }
    }

    fn raw_draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Exponential(mean) => Exp::new(1.0 / mean)
                .expect("validated rate")
                .sample(rng),
            Self::WrappedNormal(sd) => sd * rng.sample::<f64, _>(StandardNormal),
            Self::Uniform => rng.random::<f64>() * TAU,
        }
    }
}

impl fmt::Display for PhaseDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.param() {
            Some(p) => write!(f, "{}({p})", self.kind()),
            None => write!(f, "{}", self.kind()),
        }
    }
}

fn check_param(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(TomographyError::invalid(format!(
            "distribution parameter must be positive and finite, got {p}"
        )))
    }
}

/// A single wrapped draw.
pub fn sample_phase<R: Rng + ?Sized>(dist: &PhaseDistribution, rng: &mut R) -> f64 {
    wrap_angle(dist.raw_draw(rng))
}

/// `count` independent draws, wrapped onto [0, 2π).
pub fn sample_phases<R: Rng + ?Sized>(
    dist: &PhaseDistribution,
    count: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    sample_phases_with(dist, count, SupportMode::Wrap, rng)
}

pub fn sample_phases_with<R: Rng + ?Sized>(
    dist: &PhaseDistribution,
    count: usize,
    mode: SupportMode,
    rng: &mut R,
) -> Result<Vec<f64>> {
    dist.validate()?;
    if count == 0 {
        return Err(TomographyError::invalid("phase count must be at least 1"));
    }
    let draws = (0..count)
        .map(|_| match mode {
            SupportMode::Wrap => sample_phase(dist, rng),
            SupportMode::Truncate => loop {
                let x = dist.raw_draw(rng);
                if (0.0..TAU).contains(&x) {
                    break x;
                }
            },
        })
        .collect();
    Ok(draws)
}
