//! Simulates a sparse single-qubit record and prints its header and first events.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use retrotomo::linalg::random_ginibre_state;
use retrotomo::measurement::record_io::record_to_string;
use retrotomo::measurement::{simulate_sparse_record, PhaseDistribution};

fn main() -> retrotomo::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let truth = random_ginibre_state(2, &mut rng);
    let dist = PhaseDistribution::exponential(std::f64::consts::PI / 8.0)?;
    let record = simulate_sparse_record(&truth, 1000, &dist, 0.0, &mut rng)?;

    let (up, down) = record.axis_counts();
    println!("z-axis outcomes: {up} up, {down} down");
    println!("equatorial events: {}", record.equatorial_events().count());
    for line in record_to_string(&record).lines().take(14) {
        println!("{line}");
    }
    Ok(())
}
