use std::collections::BTreeMap;
use std::f64::consts::TAU;

use crate::error::{Result, TomographyError};

use super::record::{Event, Factor, MeasurementRecord};

/// Center of bin `j` out of `bins`: 2πj/N_b.
pub fn bin_center(j: usize, bins: usize) -> f64 {
    TAU * j as f64 / bins as f64
}

/// Index of the bin whose center is nearest to `angle` on the circle.
/// Exact ties go to the lower-index bin.
pub fn bin_index(angle: f64, bins: usize) -> usize {
    let x = angle.rem_euclid(TAU) / TAU * bins as f64;
    let lo = x.floor();
    let frac = x - lo;
    let lo = lo as usize % bins;
    let hi = (lo + 1) % bins;
    if frac < 0.5 {
        lo
    } else if frac > 0.5 {
        hi
    } else {
        lo.min(hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum FactorKey {
    Axis(bool),
    Bin(usize, bool),
}

/// Accumulates equatorial events into `bins` equal-width angular bins centered
/// on 2πj/N_b. Axis-only events pass through unchanged; total multiplicity is
/// conserved.
pub fn coarse_grain(record: &MeasurementRecord, bins: usize) -> Result<MeasurementRecord> {
    if bins < 2 {
        return Err(TomographyError::invalid(format!(
            "coarse-graining needs at least 2 bins, got {bins}"
        )));
    }
    if record.is_binned() {
        return Err(TomographyError::invalid("record is already binned"));
    }

    let mut passthrough = Vec::new();
    let mut accumulated: BTreeMap<Vec<FactorKey>, u64> = BTreeMap::new();
    for event in record.events() {
        if event.is_axis_only() {
            passthrough.push(event.clone());
            continue;
        }
        let key = event
            .factors
            .iter()
            .map(|f| match *f {
                Factor::Axis { up } => FactorKey::Axis(up),
                Factor::Equator { angle, clicked } => FactorKey::Bin(bin_index(angle, bins), clicked),
            })
            .collect();
        *accumulated.entry(key).or_insert(0) += event.multiplicity;
    }

    let binned = accumulated.into_iter().map(|(key, multiplicity)| Event {
        factors: key
            .into_iter()
            .map(|k| match k {
                FactorKey::Axis(up) => Factor::Axis { up },
                FactorKey::Bin(j, clicked) => Factor::Equator {
                    angle: bin_center(j, bins),
                    clicked,
                },
            })
            .collect(),
        multiplicity,
    });
    passthrough.extend(binned);

    MeasurementRecord::new(record.qubits(), passthrough, Some(bins), record.meta().clone())
}
