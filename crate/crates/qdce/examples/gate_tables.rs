//! Print the closed-form action of each gate and its deviation from the
//! matrix exponential of the generator it implements.
//!
//! Run with: cargo run --example gate_tables

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use qdce::dynamics::{
    expm_oracle, ramsey, u_off, u_on, DispersiveGen, JaynesCummingsGen, RamseyConvention,
    RamseyGen,
};
use qdce::hilbert::{Operator, StateVector};

fn image(op: &Operator, dims: &[usize], digits: &[usize]) -> qdce::Result<StateVector> {
    op.apply(&StateVector::basis_state(dims, digits)?)
}

fn main() -> qdce::Result<()> {
    let n_max = 2;

    println!("resonant half pulse (pulse area pi/2), basis |atom, n>:");
    let swap = u_on(FRAC_PI_2, n_max)?;
    for digits in [[0usize, 0], [1, 0], [0, 1], [1, 1]] {
        let atom = if digits[0] == 0 { "g" } else { "e" };
        println!(
            "  |{},{}>  ->  {}",
            atom,
            digits[1],
            image(&swap, &[2, n_max + 1], &digits)?
        );
    }
    let jc = JaynesCummingsGen::new(1.3, n_max)?;
    let oracle = expm_oracle(&jc.operator(), jc.time_for_pulse_area(FRAC_PI_2))?;
    println!(
        "  max deviation from exp(-i H t): {:.3e}",
        swap.max_abs_diff(&oracle)?
    );

    let vartheta = 2.0 * PI / 3.0;
    println!("\ndispersive pulse at vartheta = 2 pi / 3:");
    let phase = u_off(vartheta, n_max)?;
    for digits in [[0usize, 1], [1, 0], [1, 1], [1, 2]] {
        let atom = if digits[0] == 0 { "g" } else { "e" };
        println!(
            "  |{},{}>  ->  {}",
            atom,
            digits[1],
            image(&phase, &[2, n_max + 1], &digits)?
        );
    }
    let disp = DispersiveGen::new(0.8, n_max)?;
    let oracle = expm_oracle(&disp.operator(), -vartheta / 0.8)?;
    println!(
        "  max deviation from exp(-i H t): {:.3e}",
        phase.max_abs_diff(&oracle)?
    );

    println!("\nRamsey rotation at theta = pi/4, chi = pi/2:");
    let rot = ramsey(FRAC_PI_4, FRAC_PI_2, RamseyConvention::Hamiltonian)?;
    for digits in [[0usize], [1]] {
        let atom = if digits[0] == 0 { "g" } else { "e" };
        println!("  |{}>  ->  {}", atom, image(&rot, &[2], &digits)?);
    }
    let gen = RamseyGen::new(1.0, FRAC_PI_2)?;
    let oracle = expm_oracle(&gen.operator(), FRAC_PI_4)?;
    println!(
        "  max deviation from exp(-i H t): {:.3e}",
        rot.max_abs_diff(&oracle)?
    );

    println!(
        "\nthe alternative rotation convention is unitary only at chi = pi/2 mod pi; \
         elsewhere it is rejected:"
    );
    match ramsey(FRAC_PI_4, 0.0, RamseyConvention::PaperEq7) {
        Ok(_) => println!("  unexpectedly accepted"),
        Err(e) => println!("  {e}"),
    }
    Ok(())
}
