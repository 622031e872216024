//! Coarse-grains one sparse record into 4, 16 and 256 bins and compares the
//! PGDB reconstructions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retrotomo::linalg::{infidelity, random_ginibre_state};
use retrotomo::measurement::{coarse_grain, simulate_sparse_record, MeasurementRecord, PhaseDistribution};
use retrotomo::ml::{pgdb_fit, CostContext, PgdbSettings};

fn main() -> retrotomo::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let truth = random_ginibre_state(2, &mut rng);
    let dist = PhaseDistribution::exponential(std::f64::consts::PI / 8.0)?;
    let sparse = simulate_sparse_record(&truth, 10_000, &dist, 0.0, &mut rng)?;

    let fit = |record: &MeasurementRecord| -> retrotomo::Result<f64> {
        let ctx = CostContext::from_record(record)?;
        let est = pgdb_fit(&ctx, 2, &PgdbSettings::default())?.estimate;
        infidelity(&est, &truth)
    };
    println!("{:>8} {:>8} {:>12}", "bins", "events", "infidelity");
    for bins in [4, 16, 256] {
        let binned = coarse_grain(&sparse, bins)?;
        println!("{bins:>8} {:>8} {:>12.3e}", binned.events().len(), fit(&binned)?);
    }
    println!("{:>8} {:>8} {:>12.3e}", "sparse", sparse.events().len(), fit(&sparse)?);
    Ok(())
}
