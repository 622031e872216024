use rand::Rng;

use crate::error::{Result, TomographyError};
use crate::linalg::{equatorial_projector, wrap_angle, z_up, DensityMatrix, FactorLabel, Projector};

use super::phases::{sample_phase, sample_phases, PhaseDistribution};
use super::record::{Event, Factor, MeasurementRecord, RecordMeta};

/// Default equatorial reference angle φ.
pub const DEFAULT_PHI: f64 = 0.0;

/// Per-qubit measurement setting for one shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Setting {
    Axis,
    /// Equatorial basis {M_angle, M_angle+π} at the effective angle.
    Equator(f64),
}

impl Setting {
    fn factor(self, bit: bool) -> Factor {
        match self {
            Setting::Axis => Factor::Axis { up: bit },
            Setting::Equator(angle) => Factor::Equator { angle, clicked: bit },
        }
    }
}

/// Bit `q` of outcome index `k`, qubit 0 most significant. A set bit means
/// "up" on an axis factor and "clicked M_θ" on an equatorial factor.
fn outcome_bit(k: usize, q: usize, qubits: usize) -> bool {
    (k >> (qubits - 1 - q)) & 1 == 0
}

fn outcome_factors(settings: &[Setting], k: usize) -> Vec<Factor> {
    let m = settings.len();
    settings
        .iter()
        .enumerate()
        .map(|(q, s)| s.factor(outcome_bit(k, q, m)))
        .collect()
}

/// Born probabilities of the 2^m completeness-paired outcomes of a setting.
/// Outcome `k` uses the bit convention of [`outcome_bit`].
pub fn setting_outcome_probabilities(rho: &DensityMatrix, settings: &[Setting]) -> Result<Vec<f64>> {
    let m = settings.len();
    if m == 0 || rho.dim() != 1 << m {
        return Err(TomographyError::DimensionMismatch {
            expected: rho.dim(),
            actual: 1 << m,
        });
    }
    (0..1usize << m)
        .map(|k| {
            let labels: Vec<FactorLabel> = outcome_factors(settings, k)
                .iter()
                .map(Factor::projector_label)
                .collect();
            Ok(rho.probability(&Projector::from_label(&labels)?).clamp(0.0, 1.0))
        })
        .collect()
}

fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (k, &p) in probs.iter().enumerate() {
        if u < p {
            return k;
        }
        u -= p;
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

fn check_events(n: usize) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(TomographyError::invalid(format!(
            "event count must be even and at least 2, got {n}"
        )));
    }
    Ok(())
}

/// Single-qubit sparse record: N/2 z-axis Bernoulli trials followed by N/2
/// equatorial trials, each at its own effective angle φ+θ_i.
pub fn simulate_sparse_record<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    n: usize,
    dist: &PhaseDistribution,
    phi: f64,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    check_events(n)?;
    if rho.dim() != 2 {
        return Err(TomographyError::DimensionMismatch {
            expected: 2,
            actual: rho.dim(),
        });
    }
    if !phi.is_finite() {
        return Err(TomographyError::invalid("reference angle must be finite"));
    }
    let half = n / 2;
    let p_up = rho.probability(&z_up()).clamp(0.0, 1.0);
    let ups = (0..half).filter(|_| rng.random::<f64>() < p_up).count() as u64;

    let mut events = Vec::with_capacity(half + 2);
    for (up, count) in [(true, ups), (false, half as u64 - ups)] {
        if count > 0 {
            events.push(Event {
                factors: vec![Factor::Axis { up }],
                multiplicity: count,
            });
        }
    }

    for theta in sample_phases(dist, half, rng)? {
        let angle = wrap_angle(phi + theta);
        let p = rho.probability(&equatorial_projector(angle)?).clamp(0.0, 1.0);
        let clicked = rng.random::<f64>() < p;
        events.push(Event {
            factors: vec![Factor::Equator { angle, clicked }],
            multiplicity: 1,
        });
    }

    let meta = RecordMeta {
        distribution: Some(*dist),
        phi,
        seed: None,
        truth: Some(rho.clone()),
    };
    MeasurementRecord::new(1, events, None, meta)
}

/// m-qubit record. Shots cycle through the 2^m axis/equator setting patterns
/// so every qubit is measured on the axis in half the shots; each equatorial
/// factor gets its own independent phase.
pub fn simulate_multiqubit_record<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    n: usize,
    dist: &PhaseDistribution,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    check_events(n)?;
    dist.validate()?;
    let dim = rho.dim();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(TomographyError::invalid(format!(
            "state dimension {dim} is not a qubit-register dimension"
        )));
    }
    let m = dim.trailing_zeros() as usize;
    let patterns = 1usize << m;

    let mut axis_counts = vec![0u64; patterns];
    let mut events = Vec::new();
    for shot in 0..n {
        let pattern = shot % patterns;
        let settings: Vec<Setting> = (0..m)
            .map(|q| {
                if (pattern >> (m - 1 - q)) & 1 == 1 {
                    Setting::Equator(wrap_angle(DEFAULT_PHI + sample_phase(dist, rng)))
                } else {
                    Setting::Axis
                }
            })
            .collect();
        let probs = setting_outcome_probabilities(rho, &settings)?;
        let k = sample_index(&probs, rng);
        if pattern == 0 {
            axis_counts[k] += 1;
        } else {
            events.push(Event {
                factors: outcome_factors(&settings, k),
                multiplicity: 1,
            });
        }
    }

    let all_axis = vec![Setting::Axis; m];
    let mut all = Vec::with_capacity(events.len() + patterns);
    for (k, &count) in axis_counts.iter().enumerate() {
        if count > 0 {
            all.push(Event {
                factors: outcome_factors(&all_axis, k),
                multiplicity: count,
            });
        }
    }
    all.extend(events);

    let meta = RecordMeta {
        distribution: Some(*dist),
        phi: DEFAULT_PHI,
        seed: None,
        truth: Some(rho.clone()),
    };
    MeasurementRecord::new(m, all, None, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_ginibre_state, CMatrix};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn up_state() -> DensityMatrix {
        DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn pure_up_gives_only_up_axis_events() {
        let rec = simulate_sparse_record(
            &up_state(),
            100,
            &PhaseDistribution::Uniform,
            0.0,
            &mut rng(1),
        )
        .unwrap();
        assert_eq!(rec.axis_counts(), (50, 0));
        assert_eq!(rec.total_events(), 100);
        assert_eq!(rec.equatorial_events().count(), 50);
        assert!(rec.equatorial_events().all(|e| e.multiplicity == 1));
    }

    #[test]
    fn odd_event_counts_rejected() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert!(simulate_sparse_record(&rho, 7, &PhaseDistribution::Uniform, 0.0, &mut rng(0)).is_err());
        assert!(simulate_sparse_record(&rho, 0, &PhaseDistribution::Uniform, 0.0, &mut rng(0)).is_err());
    }

    #[test]
    fn count_conservation() {
        let mut r = rng(2);
        for n in [2, 10, 1000] {
            let rho = random_ginibre_state(2, &mut r);
            let dist = PhaseDistribution::exponential(0.4).unwrap();
            let rec = simulate_sparse_record(&rho, n, &dist, 0.3, &mut r).unwrap();
            assert_eq!(rec.total_events(), n as u64);
        }
    }

    #[test]
    fn maximally_mixed_equatorial_clicks_are_fair() {
        let rho = DensityMatrix::maximally_mixed(2);
        let n = 20_000;
        let rec = simulate_sparse_record(&rho, n, &PhaseDistribution::Uniform, 0.0, &mut rng(3)).unwrap();
        let clicks = rec
            .equatorial_events()
            .filter(|e| e.factors[0].outcome_bit())
            .count() as f64;
        let frac = clicks / (n / 2) as f64;
        assert!((frac - 0.5).abs() <= 0.011, "fraction {frac}");
    }

    #[test]
    fn equatorial_operators_pair_to_identity() {
        let mut r = rng(4);
        let rho = random_ginibre_state(2, &mut r);
        let rec = simulate_sparse_record(&rho, 200, &PhaseDistribution::Uniform, 0.0, &mut r).unwrap();
        for e in rec.equatorial_events() {
            let mut flipped = e.clone();
            if let Factor::Equator { clicked, .. } = &mut flipped.factors[0] {
                *clicked = !*clicked;
            }
            let sum = e.projector().unwrap().matrix() + flipped.projector().unwrap().matrix();
            let err = (sum - CMatrix::identity(2, 2)).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-12);
        }
    }

    #[test]
    fn two_qubit_all_up() {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let rho = DensityMatrix::pure(&[one, zero, zero, zero]).unwrap();
        let rec = simulate_multiqubit_record(&rho, 400, &PhaseDistribution::Uniform, &mut rng(5)).unwrap();
        let axis: Vec<_> = rec.axis_events().collect();
        assert_eq!(axis.len(), 1);
        assert_eq!(axis[0].factors, vec![Factor::Axis { up: true }; 2]);
        assert_eq!(axis[0].multiplicity, 100);
        assert_eq!(rec.total_events(), 400);
        assert_eq!(rec.qubits(), 2);
    }

    #[test]
    fn outcome_probabilities_complete() {
        let mut r = rng(6);
        let rho = random_ginibre_state(4, &mut r);
        for settings in [
            vec![Setting::Axis, Setting::Axis],
            vec![Setting::Axis, Setting::Equator(0.7)],
            vec![Setting::Equator(2.0), Setting::Equator(5.5)],
        ] {
            let p = setting_outcome_probabilities(&rho, &settings).unwrap();
            assert_eq!(p.len(), 4);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_state_axis_correlations() {
        let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let bell = DensityMatrix::pure(&[a, zero, zero, a]).unwrap();
        let n = 40_000;
        let rec = simulate_multiqubit_record(&bell, n, &PhaseDistribution::Uniform, &mut rng(7)).unwrap();
        let zz_shots = (n / 4) as f64;
        let mut same_up = 0u64;
        let mut same_down = 0u64;
        for e in rec.axis_events() {
            match (e.factors[0].outcome_bit(), e.factors[1].outcome_bit()) {
                (true, true) => same_up += e.multiplicity,
                (false, false) => same_down += e.multiplicity,
                _ => panic!("anticorrelated outcome from a Bell state"),
            }
        }
        let sigma = (zz_shots * 0.25).sqrt();
        assert!((same_up as f64 - zz_shots / 2.0).abs() < 3.0 * sigma);
        assert!((same_down as f64 - zz_shots / 2.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn phi_offsets_effective_angles() {
        let rho = DensityMatrix::maximally_mixed(2);
        let dist = PhaseDistribution::exponential(1e-9).unwrap();
        let rec = simulate_sparse_record(&rho, 20, &dist, PI / 2.0, &mut rng(8)).unwrap();
        for e in rec.equatorial_events() {
            if let Factor::Equator { angle, .. } = e.factors[0] {
                assert!((angle - PI / 2.0).abs() < 1e-6);
            }
        }
    }
}
