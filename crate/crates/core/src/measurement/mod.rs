//! Phase-error sampling, record simulation, coarse-graining and
//! measurement-matrix conditioning.

mod binning;
mod condition;
mod phases;
mod record;
pub mod record_io;
mod simulate;

pub use binning::{bin_center, bin_index, coarse_grain};
pub use condition::{condition_number, MeasurementMatrix, SINGULAR_CUTOFF};
pub use phases::{sample_phase, sample_phases, sample_phases_with, PhaseDistribution, SupportMode};
pub use record::{Event, Factor, MeasurementRecord, RecordMeta};
pub use simulate::{
    setting_outcome_probabilities, simulate_multiqubit_record, simulate_sparse_record, Setting,
    DEFAULT_PHI,
};
