//! Bayesian reconstruction with a particle filter and Liu-West resampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retrotomo::bayes::{run_bayesian_tomography, BayesSettings};
use retrotomo::linalg::{infidelity, random_ginibre_state};
use retrotomo::measurement::{simulate_sparse_record, PhaseDistribution};

fn main() -> retrotomo::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let truth = random_ginibre_state(2, &mut rng);
    let settings = BayesSettings {
        particles: 500,
        ..BayesSettings::default()
    };
    for mean in [std::f64::consts::PI / 8.0, std::f64::consts::PI / 2.0] {
        let dist = PhaseDistribution::exponential(mean)?;
        let record = simulate_sparse_record(&truth, 2000, &dist, 0.0, &mut rng)?;
        let report = run_bayesian_tomography(&record, &settings, &mut rng)?;
        println!(
            "mean phase {mean:.3}: {} updates, {} resamples, infidelity {:.3e}",
            report.updates,
            report.resamples,
            infidelity(&report.estimate, &truth)?
        );
    }
    Ok(())
}
