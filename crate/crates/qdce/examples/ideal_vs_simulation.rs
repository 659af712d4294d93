//! Compare the simulated final statistics against the closed-form two-qubit
//! description, using the fitted phase mapping to translate the dial phase.
//!
//! Run with: cargo run --example ideal_vs_simulation

use std::f64::consts::{FRAC_PI_4, TAU};

use qdce::hilbert::fidelity_up_to_global_phase;
use qdce::ideal::{ideal_final_state, ideal_joint_distribution, IdealParams};
use qdce::measurement::joint_distribution;
use qdce::protocol::{final_two_atom_state, fit_phase_mapping, ProtocolParams};

fn main() -> qdce::Result<()> {
    let alpha = FRAC_PI_4;
    let grid: Vec<f64> = (0..9).map(|k| k as f64 * TAU / 8.0).collect();
    let base = ProtocolParams::new(alpha, 0.0);
    let mapping = fit_phase_mapping(&base, &grid)?;
    println!(
        "fitted mapping: phi = {:.6} * vartheta + {:.6}\n",
        mapping.slope, mapping.offset
    );

    println!(
        "{:>10} {:>10} {:>14} {:>12}",
        "vartheta", "phi", "max dev (P)", "fidelity"
    );
    for &vartheta in &grid {
        let phi = mapping.slope * vartheta + mapping.offset;
        let sim = final_two_atom_state(&ProtocolParams { vartheta, ..base })?;
        let reference = IdealParams::new(alpha, phi)?;
        let dev = joint_distribution(&sim)?.max_abs_diff(&ideal_joint_distribution(&reference)?);
        let fid = fidelity_up_to_global_phase(&sim, &ideal_final_state(&reference)?)?;
        println!("{vartheta:>10.6} {phi:>10.6} {dev:>14.3e} {fid:>12.6}");
    }

    println!(
        "\nthe four joint probabilities agree to machine precision at every \
         point. The state fidelity is below 1 because the closed-form \
         particle pointer (|0> + e^(i phi) |1>) / sqrt(2) differs from the \
         circuit's actual particle pointer e^(i pi/4) (|0> - i |1>) / sqrt(2) \
         by more than a global phase; the two descriptions share statistics, \
         not branch phases."
    );
    Ok(())
}
