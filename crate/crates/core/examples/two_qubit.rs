//! Two-qubit reconstruction from binned records with the Cholesky fit and the
//! particle filter.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retrotomo::bayes::{run_bayesian_tomography, BayesSettings};
use retrotomo::linalg::{infidelity, random_ginibre_state};
use retrotomo::measurement::{coarse_grain, simulate_multiqubit_record, PhaseDistribution};
use retrotomo::ml::{cholesky_ml_fit, CholeskySettings, CostContext};

fn main() -> retrotomo::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let truth = random_ginibre_state(4, &mut rng);
    let dist = PhaseDistribution::exponential(std::f64::consts::PI / 8.0)?;

    for events in [200, 1000, 5000] {
        let record = coarse_grain(&simulate_multiqubit_record(&truth, events, &dist, &mut rng)?, 16)?;
        let ctx = CostContext::from_record(&record)?;
        let fit = cholesky_ml_fit(&ctx, 2, &CholeskySettings::default(), &mut rng)?;
        println!("cholesky N={events:>5}: infidelity {:.3e}", infidelity(&fit.estimate, &truth)?);
    }

    let record = simulate_multiqubit_record(&truth, 100, &dist, &mut rng)?;
    for particles in [50, 200, 1000] {
        let settings = BayesSettings { particles, ..BayesSettings::default() };
        let report = run_bayesian_tomography(&record, &settings, &mut rng)?;
        println!("bayes P={particles:>4}: infidelity {:.3e}", infidelity(&report.estimate, &truth)?);
    }
    Ok(())
}
