//! Condition numbers of the Pauli measurement set and of sampled
//! equatorial sets as the phase spread grows.

use std::f64::consts::{FRAC_PI_2, PI};

use retrotomo::harness::{condition_sweep, ConditionSweep};
use retrotomo::linalg::{equatorial_projector, z_down, z_up};
use retrotomo::measurement::condition_number;

fn main() -> retrotomo::Result<()> {
    let pauli = vec![
        z_up(),
        z_down(),
        equatorial_projector(0.0)?,
        equatorial_projector(PI)?,
        equatorial_projector(FRAC_PI_2)?,
        equatorial_projector(3.0 * FRAC_PI_2)?,
    ];
    println!("Pauli eigenprojectors: kappa = {:.6}", condition_number(&pauli));

    let rows = condition_sweep(&ConditionSweep {
        dist_kind: "normal".into(),
        params: [1.0 / 16.0, 0.25, 1.0, 4.0].iter().map(|f| f * PI).collect(),
        equatorial: 5000,
        seeds: 20,
        master_seed: 0,
    })?;
    for row in rows {
        println!(
            "sigma {:>7.4}: median kappa {:.4} [{:.4}, {:.4}]",
            row.param, row.kappa_median, row.kappa_q1, row.kappa_q3
        );
    }
    Ok(())
}
