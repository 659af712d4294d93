//! Mix white noise into the maximally entangled final state and watch the
//! concurrence decay.
//!
//! Run with: cargo run --example noise_entanglement

use std::f64::consts::{FRAC_PI_4, PI};

use qdce::hilbert::TwoQubitDensity;
use qdce::measurement::{concurrence, white_noise_mix, NoiseParams};
use qdce::protocol::{final_two_atom_state, ProtocolParams};

fn main() -> qdce::Result<()> {
    // alpha = pi/4, vartheta = pi puts the two pointer states at right
    // angles, so the atoms end up maximally entangled.
    let state = final_two_atom_state(&ProtocolParams::new(FRAC_PI_4, PI))?;
    let rho = TwoQubitDensity::from_pure(&state)?;
    println!("concurrence of the clean state: {:.9}\n", concurrence(&rho)?);

    println!("{:>8} {:>12} {:>9}", "epsilon", "concurrence", "purity");
    for k in 0..=10 {
        let epsilon = k as f64 * 0.1;
        let mixed = white_noise_mix(&rho, NoiseParams::new(epsilon)?)?;
        println!(
            "{:>8.2} {:>12.6} {:>9.6}",
            epsilon,
            concurrence(&mixed)?,
            mixed.purity()
        );
    }
    println!(
        "\na maximally entangled state mixed with white noise stays entangled \
         up to epsilon = 2/3 and the concurrence follows 1 - 3 epsilon / 2."
    );
    Ok(())
}
