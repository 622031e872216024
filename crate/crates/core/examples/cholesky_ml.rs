//! Maximum-likelihood reconstruction over the Cholesky parametrization.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retrotomo::linalg::{infidelity, random_ginibre_state};
use retrotomo::measurement::{coarse_grain, simulate_sparse_record, PhaseDistribution};
use retrotomo::ml::{cholesky_ml_fit, state_to_cholesky, CholeskySettings, CostContext};

fn main() -> retrotomo::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let truth = random_ginibre_state(2, &mut rng);
    println!("true parameters: {:?}", state_to_cholesky(&truth)?.as_slice());

    let dist = PhaseDistribution::exponential(std::f64::consts::PI / 8.0)?;
    let record = coarse_grain(&simulate_sparse_record(&truth, 10_000, &dist, 0.0, &mut rng)?, 16)?;
    let ctx = CostContext::from_record(&record)?;
    let fit = cholesky_ml_fit(&ctx, 1, &CholeskySettings::default(), &mut rng)?;
    println!(
        "{} iterations, final cost {:.4}, infidelity {:.3e}",
        fit.iterations,
        fit.costs.last().copied().unwrap_or(f64::NAN),
        infidelity(&fit.estimate, &truth)?
    );
    Ok(())
}
