use std::f64::consts::PI;

use crate::error::{Result, TomographyError};
use crate::linalg::{wrap_angle, DensityMatrix, FactorLabel, Projector};

use super::binning::bin_center;
use super::phases::PhaseDistribution;

/// Outcome of one qubit within a recorded event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor {
    /// z-axis outcome: `up` selects |↑⟩⟨↑|, otherwise |↓⟩⟨↓|.
    Axis { up: bool },
    /// Equatorial outcome at effective angle `angle` (phase error already
    /// absorbed). `clicked` selects M_angle, otherwise the complement M_{angle+π}.
    Equator { angle: f64, clicked: bool },
}

impl Factor {
    pub fn is_axis(&self) -> bool {
        matches!(self, Factor::Axis { .. })
    }

    pub fn outcome_bit(&self) -> bool {
        match *self {
            Factor::Axis { up } => up,
            Factor::Equator { clicked, .. } => clicked,
        }
    }

    pub fn projector_label(&self) -> FactorLabel {
        match *self {
            Factor::Axis { up: true } => FactorLabel::Up,
            Factor::Axis { up: false } => FactorLabel::Down,
            Factor::Equator { angle, clicked: true } => FactorLabel::Equator(angle),
            Factor::Equator { angle, clicked: false } => FactorLabel::Equator(wrap_angle(angle + PI)),
        }
    }
}

/// One recorded outcome (a tensor product over qubits) and how often it occurred.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub factors: Vec<Factor>,
    pub multiplicity: u64,
}

impl Event {
    pub fn is_axis_only(&self) -> bool {
        self.factors.iter().all(Factor::is_axis)
    }

    pub fn projector(&self) -> Result<Projector> {
        let labels: Vec<FactorLabel> = self.factors.iter().map(Factor::projector_label).collect();
        Projector::from_label(&labels)
    }
}

/// Provenance carried in the record header.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RecordMeta {
    pub distribution: Option<PhaseDistribution>,
    /// Equatorial reference angle φ.
    pub phi: f64,
    pub seed: Option<u64>,
    /// The state the record was simulated from, when known.
    pub truth: Option<DensityMatrix>,
}

/// Multiset of effective measurement operators with multiplicities.
///
/// Sparse records hold every event containing an equatorial factor with
/// multiplicity one; binned records hold only bin-center angles.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementRecord {
    qubits: usize,
    events: Vec<Event>,
    bins: Option<usize>,
    meta: RecordMeta,
}

impl MeasurementRecord {
    pub fn new(
        qubits: usize,
        events: Vec<Event>,
        bins: Option<usize>,
        meta: RecordMeta,
    ) -> Result<Self> {
        let rec = Self {
            qubits,
            events,
            bins,
            meta,
        };
        rec.validate()?;
        Ok(rec)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn bins(&self) -> Option<usize> {
        self.bins
    }

    pub fn is_binned(&self) -> bool {
        self.bins.is_some()
    }

    pub fn meta(&self) -> &RecordMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut RecordMeta {
        &mut self.meta
    }

    /// Sum of all multiplicities (N).
    pub fn total_events(&self) -> u64 {
        self.events.iter().map(|e| e.multiplicity).sum()
    }

    /// Events whose factors all lie on the z-axis.
    pub fn axis_events(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| e.is_axis_only())
    }

    /// Events with at least one equatorial factor.
    pub fn equatorial_events(&self) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(|e| !e.is_axis_only())
    }

    /// Single-qubit z-axis counts `(up, down)`.
    pub fn axis_counts(&self) -> (u64, u64) {
        let mut up = 0;
        let mut down = 0;
        for e in self.axis_events().filter(|e| e.factors.len() == 1) {
            if e.factors[0].outcome_bit() {
                up += e.multiplicity;
            } else {
                down += e.multiplicity;
            }
        }
        (up, down)
    }

    /// The distinct effective operators with their counts, in record order.
    pub fn operators_with_counts(&self) -> Result<Vec<(Projector, f64)>> {
        self.events
            .iter()
            .map(|e| Ok((e.projector()?, e.multiplicity as f64)))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits == 0 || self.qubits > 8 {
            return Err(TomographyError::invalid(format!(
                "record qubit count {} outside 1..=8",
                self.qubits
            )));
        }
        if self.events.is_empty() {
            return Err(TomographyError::invalid("record holds no events"));
        }
        if let Some(nb) = self.bins {
            if nb < 2 {
                return Err(TomographyError::invalid("binned records need at least 2 bins"));
            }
        }
        for e in &self.events {
            if e.factors.len() != self.qubits {
                return Err(TomographyError::invalid(format!(
                    "event has {} factors, record has {} qubits",
                    e.factors.len(),
                    self.qubits
                )));
            }
            if e.multiplicity == 0 {
                return Err(TomographyError::invalid("event multiplicity must be positive"));
            }
            for f in &e.factors {
                if let Factor::Equator { angle, .. } = *f {
                    if !(0.0..std::f64::consts::TAU).contains(&angle) {
                        return Err(TomographyError::invalid(format!(
                            "equatorial angle {angle} outside [0, 2π)"
                        )));
                    }
                    if let Some(nb) = self.bins {
                        if !(0..nb).any(|j| bin_center(j, nb) == angle) {
                            return Err(TomographyError::invalid(format!(
                                "angle {angle} is not one of the {nb} bin centers"
                            )));
                        }
                    }
                }
            }
            if self.bins.is_none() && !e.is_axis_only() && e.multiplicity != 1 {
                return Err(TomographyError::invalid(
                    "sparse records must hold equatorial events with multiplicity 1",
                ));
            }
        }
        if let Some(truth) = &self.meta.truth {
            if truth.dim() != self.dim() {
                return Err(TomographyError::DimensionMismatch {
                    expected: self.dim(),
                    actual: truth.dim(),
                });
            }
        }
        Ok(())
    }
}
