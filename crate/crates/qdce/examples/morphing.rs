//! Morph the device continuously from particle-like to wave-like behaviour
//! by sweeping the ancilla angle alpha at a fixed dispersive phase.
//!
//! Run with: cargo run --example morphing

use std::f64::consts::FRAC_PI_2;

use qdce::cli::{evaluate_point, PointSettings};
use qdce::dynamics::RamseyConvention;

fn main() -> qdce::Result<()> {
    let vartheta = FRAC_PI_2;
    println!("vartheta = pi/2; alpha sweeps 0 (particle) to pi/2 (wave)\n");
    println!(
        "{:>8} {:>9} {:>9} {:>9} {:>9} {:>11} {:>12}",
        "alpha", "P00", "P01", "P10", "P11", "visibility", "concurrence"
    );
    for k in 0..=10 {
        let alpha = k as f64 * FRAC_PI_2 / 10.0;
        let record = evaluate_point(&PointSettings {
            alpha,
            vartheta,
            n_max: 2,
            epsilon: 0.0,
            convention: RamseyConvention::Hamiltonian,
        })?;
        println!(
            "{:>8.4} {:>9.6} {:>9.6} {:>9.6} {:>9.6} {:>11.6} {:>12.6}",
            alpha,
            record.p00,
            record.p01,
            record.p10,
            record.p11,
            record.visibility_marginal,
            record.concurrence
        );
    }
    println!(
        "\nthe marginal visibility equals sin^2(alpha): both behaviours coexist \
         in one run, weighted continuously by the ancilla angle."
    );
    Ok(())
}
