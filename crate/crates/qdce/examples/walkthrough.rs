//! Step through the full circuit once and print every checkpoint.
//!
//! Run with: cargo run --example walkthrough

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use qdce::hilbert::TwoQubitDensity;
use qdce::measurement::{branch_state, joint_distribution, postselect, Branch};
use qdce::protocol::{
    cavity_vacuum_population, interference_phase, reduce_final_state, run_protocol,
    ProtocolParams,
};

fn main() -> qdce::Result<()> {
    let params = ProtocolParams::new(FRAC_PI_4, FRAC_PI_2);
    println!(
        "alpha = {:.6}, vartheta = {:.6}, n_max = {}, convention = {}",
        params.alpha,
        params.vartheta,
        params.n_max,
        params.convention.as_str()
    );
    println!("register order: (A1, A2, A3, cavity)\n");

    let run = run_protocol(&params)?;
    for cp in &run.checkpoints {
        println!("{:>15}  {}", cp.label.as_str(), cp.state);
    }

    let final_state = &run.final_checkpoint().state;
    println!(
        "\ncavity vacuum population after the run: {:.12}",
        cavity_vacuum_population(final_state)
    );

    let reduced = reduce_final_state(&run)?;
    println!("reduced (A2, A3) state: {}", reduced);
    println!(
        "reduction purity: {:.12}",
        TwoQubitDensity::from_pure(&reduced)?.purity()
    );

    let dist = joint_distribution(&reduced)?;
    println!("\njoint (system, ancilla) probabilities: {:?}", dist.probs);
    for branch in [Branch::Particle, Branch::Wave] {
        let stats = postselect(&reduced, branch)?;
        println!(
            "{:>8} branch: weight {:.6}, conditional ({:.6}, {:.6})",
            branch.as_str(),
            stats.branch_probability,
            stats.conditional.0,
            stats.conditional.1
        );
    }

    let wave = branch_state(&reduced, Branch::Wave)?;
    println!(
        "\nwave pointer {} carries interference phase {:.6} rad",
        wave,
        interference_phase(&wave)?
    );
    Ok(())
}
