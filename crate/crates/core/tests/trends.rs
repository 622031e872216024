mod common;

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retrotomo::bayes::{run_bayesian_tomography, BayesSettings};
use retrotomo::harness::{run_experiment, Algorithm, Binning, ExperimentConfig, TrialResult};
use retrotomo::linalg::{infidelity, random_ginibre_state, DensityMatrix};
use retrotomo::measurement::{
    bin_center, coarse_grain, simulate_sparse_record, Event, Factor, MeasurementRecord, PhaseDistribution, RecordMeta,
};
use retrotomo::ml::{pgdb_fit, CostContext, PgdbSettings};

use common::median;

fn infidelities(results: &[TrialResult]) -> Vec<f64> {
    results.iter().map(|r| r.infidelity.expect("trial succeeded")).collect()
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[test]
fn binning_at_bin_centers_reproduces_sparse_fit() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let truth = random_ginibre_state(2, &mut rng);
    let bins = 64;
    let mut events = vec![
        Event { factors: vec![Factor::Axis { up: true }], multiplicity: 300 },
        Event { factors: vec![Factor::Axis { up: false }], multiplicity: 700 },
    ];
    for k in 0..1000 {
        let angle = bin_center((k * 7) % bins, bins);
        let p = truth.probability(&retrotomo::linalg::equatorial_projector(angle).unwrap());
        events.push(Event {
            factors: vec![Factor::Equator { angle, clicked: rand::Rng::random::<f64>(&mut rng) < p }],
            multiplicity: 1,
        });
    }
    let sparse = MeasurementRecord::new(1, events, None, RecordMeta::default()).unwrap();
    let binned = coarse_grain(&sparse, bins).unwrap();
    let fit = |r: &MeasurementRecord| {
        pgdb_fit(&CostContext::from_record(r).unwrap(), 2, &PgdbSettings::default()).unwrap().estimate
    };
    let (a, b) = (fit(&sparse), fit(&binned));
    assert!(infidelity(&a, &b).unwrap() < 1e-6);
}

#[test]
fn fine_binning_tracks_sparse_fit() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let dist = PhaseDistribution::Exponential(PI / 8.0);
    for _ in 0..5 {
        let truth = random_ginibre_state(2, &mut rng);
        let sparse = simulate_sparse_record(&truth, 2000, &dist, 0.0, &mut rng).unwrap();
        let fit = |r: &MeasurementRecord| {
            pgdb_fit(&CostContext::from_record(r).unwrap(), 2, &PgdbSettings::default()).unwrap().estimate
        };
        let a = fit(&sparse);
        let b = fit(&coarse_grain(&sparse, 4096).unwrap());
        assert!(infidelity(&a, &b).unwrap() < 1e-4);
    }
}

#[test]
fn bayes_on_z_only_data_finds_populations() {
    let up = DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
    let record = MeasurementRecord::new(
        1,
        vec![Event { factors: vec![Factor::Axis { up: true }], multiplicity: 2000 }],
        None,
        RecordMeta { truth: Some(up), ..RecordMeta::default() },
    )
    .unwrap();
    let report = run_bayesian_tomography(&record, &BayesSettings::default(), &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let m = report.estimate.matrix();
    assert!((m[(0, 0)].re - 1.0).abs() < 0.05);
    assert!(m[(1, 1)].re.abs() < 0.05);
}

#[test]
fn bayes_is_deterministic_under_seed() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let truth = random_ginibre_state(2, &mut rng);
    let record = simulate_sparse_record(&truth, 500, &PhaseDistribution::Uniform, 0.0, &mut rng).unwrap();
    let settings = BayesSettings { particles: 200, ..BayesSettings::default() };
    let run = || run_bayesian_tomography(&record, &settings, &mut ChaCha8Rng::seed_from_u64(5)).unwrap().estimate;
    assert_eq!(run(), run());
}

#[test]
fn cholesky_mean_infidelity_falls_with_bins() {
    let base = ExperimentConfig {
        algorithm: Algorithm::Cholesky,
        events: 10_000,
        distribution: PhaseDistribution::Exponential(PI / 8.0),
        trials: 200,
        master_seed: 7,
        ..ExperimentConfig::default()
    };
    let means: Vec<f64> = [Binning::Bins(4), Binning::Bins(8), Binning::Bins(16), Binning::Sparse]
        .into_iter()
        .map(|binning| mean(&infidelities(&run_experiment(&ExperimentConfig { binning, ..base.clone() }).unwrap())))
        .collect();
    assert!(means.windows(2).all(|w| w[0] > w[1]), "{means:?}");
}

#[test]
fn two_qubit_cholesky_improves_with_events() {
    let medians: Vec<f64> = [200, 1000, 5000]
        .into_iter()
        .map(|events| {
            let cfg = ExperimentConfig {
                qubits: 2,
                algorithm: Algorithm::Cholesky,
                events,
                binning: Binning::Bins(16),
                distribution: PhaseDistribution::Exponential(PI / 8.0),
                trials: 40,
                master_seed: 8,
                ..ExperimentConfig::default()
            };
            median(&infidelities(&run_experiment(&cfg).unwrap()))
        })
        .collect();
    assert!(medians.windows(2).all(|w| w[0] > w[1]), "{medians:?}");
}

#[test]
fn two_qubit_bayes_improves_with_particles() {
    let medians: Vec<f64> = [50, 200, 1000]
        .into_iter()
        .map(|particles| {
            let mut cfg = ExperimentConfig {
                qubits: 2,
                algorithm: Algorithm::Bayes,
                events: 100,
                binning: Binning::Sparse,
                distribution: PhaseDistribution::Exponential(PI / 8.0),
                trials: 40,
                master_seed: 9,
                ..ExperimentConfig::default()
            };
            cfg.bayes.particles = particles;
            median(&infidelities(&run_experiment(&cfg).unwrap()))
        })
        .collect();
    assert!(medians.windows(2).all(|w| w[0] > w[1]), "{medians:?}");
}
