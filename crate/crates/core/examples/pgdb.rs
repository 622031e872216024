//! Projected gradient descent with backtracking on a sparse record, printing
//! the cost trace.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retrotomo::linalg::{infidelity, random_ginibre_state};
use retrotomo::measurement::{simulate_sparse_record, PhaseDistribution};
use retrotomo::ml::{pgdb_fit, CostContext, PgdbSettings};

fn main() -> retrotomo::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let truth = random_ginibre_state(2, &mut rng);
    let dist = PhaseDistribution::wrapped_normal(1.0)?;
    let record = simulate_sparse_record(&truth, 5000, &dist, 0.0, &mut rng)?;
    let ctx = CostContext::from_record(&record)?;
    let fit = pgdb_fit(&ctx, 2, &PgdbSettings::default())?;

    for (k, c) in fit.costs.iter().enumerate().take(10) {
        println!("iter {k:>3}  cost {c:.6}");
    }
    println!(
        "converged={} after {} iterations, monotone={}, infidelity {:.3e}",
        fit.converged,
        fit.iterations,
        fit.cost_is_non_increasing(),
        infidelity(&fit.estimate, &truth)?
    );
    Ok(())
}
