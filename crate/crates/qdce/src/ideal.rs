//! Closed-form interferometer oracle.
//!
//! The delayed-choice interferometer with a quantum beam splitter leaves the
//! system-ancilla pair in
//!
//! ```text
//! cos(alpha) |particle>|0>_A + sin(alpha) |wave>|1>_A
//! ```
//!
//! with |particle> = (|0> + e^{i phi} |1>) / sqrt(2) and
//! |wave> = e^{i phi/2} (cos(phi/2) |0> - i sin(phi/2) |1>), giving the joint
//! detection probabilities
//!
//! ```text
//! P(0,0) = cos^2(alpha) / 2        P(0,1) = sin^2(alpha) cos^2(phi/2)
//! P(1,0) = cos^2(alpha) / 2        P(1,1) = sin^2(alpha) sin^2(phi/2)
//! ```
//!
//! These expressions are the reference the cavity simulation is compared
//! against; nothing here runs a circuit.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::StateVector;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Interferometer settings: beam-splitter superposition angle `alpha` and
/// interferometer phase `phi`, both in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdealParams {
    pub alpha: f64,
    pub phi: f64,
}

impl IdealParams {
    pub fn new(alpha: f64, phi: f64) -> Result<Self> {
        if !alpha.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ideal parameters must be finite, got alpha={alpha}, phi={phi}"
            )));
        }
        Ok(Self { alpha, phi })
    }
}

/// Joint detection probabilities over (system, ancilla) in the order
/// (00, 01, 10, 11).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JointDistribution {
    pub probs: [f64; 4],
}

impl JointDistribution {
    /// Wrap four probabilities; they must lie in [0, 1] and sum to 1 within
    /// 1e-12.
    pub fn new(probs: [f64; 4]) -> Result<Self> {
        if probs.iter().any(|p| !(0.0..=1.0 + 1e-12).contains(p)) {
            return Err(Error::InvalidParameter(format!(
                "probabilities {probs:?} outside [0, 1]"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "probabilities {probs:?} sum to {total}, not 1"
            )));
        }
        Ok(Self { probs })
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.probs
            .iter()
            .zip(other.probs.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Marginal probability of the system outcome 0, i.e. P(0,0) + P(0,1).
    pub fn system_zero_marginal(&self) -> f64 {
        self.probs[0] + self.probs[1]
    }

    /// Entrywise white-noise admixture (1 - epsilon) p + epsilon / 4.
    pub fn mix_white(&self, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidNoise { epsilon });
        }
        let mut probs = [0.0; 4];
        for (out, p) in probs.iter_mut().zip(self.probs.iter()) {
            *out = (1.0 - epsilon) * p + epsilon / 4.0;
        }
        Ok(Self { probs })
    }
}

/// The particle-like pointer state (|0> + e^{i phi} |1>) / sqrt(2).
pub fn particle_state(phi: f64) -> Result<StateVector> {
    if !phi.is_finite() {
        return Err(Error::InvalidParameter(format!("phi = {phi} is not finite")));
    }
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    StateVector::new(
        ndarray::array![c(inv, 0.0), C64::from_polar(inv, phi)],
        vec![2],
    )
}

/// The wave-like pointer state e^{i phi/2} (cos(phi/2) |0> - i sin(phi/2) |1>).
pub fn wave_state(phi: f64) -> Result<StateVector> {
    if !phi.is_finite() {
        return Err(Error::InvalidParameter(format!("phi = {phi} is not finite")));
    }
    let half = phi / 2.0;
    let front = C64::from_polar(1.0, half);
    StateVector::new(
        ndarray::array![front * c(half.cos(), 0.0), front * c(0.0, -half.sin())],
        vec![2],
    )
}

/// Closed-form joint detection probabilities.
pub fn ideal_joint_distribution(params: &IdealParams) -> Result<JointDistribution> {
    let ca2 = params.alpha.cos().powi(2);
    let sa2 = params.alpha.sin().powi(2);
    let half = params.phi / 2.0;
    JointDistribution::new([
        0.5 * ca2,
        sa2 * half.cos().powi(2),
        0.5 * ca2,
        sa2 * half.sin().powi(2),
    ])
}

/// The entangled system-ancilla state
/// cos(alpha) |particle>|0> + sin(alpha) |wave>|1>, over dims [2, 2] with the
/// system index first.
pub fn ideal_final_state(params: &IdealParams) -> Result<StateVector> {
    let p = particle_state(params.phi)?;
    let w = wave_state(params.phi)?;
    let ca = c(params.alpha.cos(), 0.0);
    let sa = c(params.alpha.sin(), 0.0);
    let mut amps = ndarray::Array1::zeros(4);
    for s in 0..2 {
        amps[s * 2] = ca * p.amplitudes()[s];
        amps[s * 2 + 1] = sa * w.amplitudes()[s];
    }
    StateVector::new(amps, vec![2, 2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::fidelity_up_to_global_phase;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} != {b} (tol {tol})");
    }

    #[test]
    fn particle_state_carries_the_phase_on_the_upper_arm() {
        let p = particle_state(FRAC_PI_2).unwrap();
        assert_close(p.norm(), 1.0, 1e-15);
        assert_close(p.probability(&[0]), 0.5, 1e-15);
        assert_close(p.probability(&[1]), 0.5, 1e-15);
        assert_close(p.amplitudes()[1].arg(), FRAC_PI_2, 1e-15);
    }

    #[test]
    fn particle_probabilities_are_phase_independent() {
        for k in 0..12 {
            let p = particle_state(k as f64 * PI / 6.0).unwrap();
            assert_close(p.probability(&[0]), 0.5, 1e-15);
        }
    }

    #[test]
    fn wave_state_interferes_fully_at_zero_phase() {
        let w = wave_state(0.0).unwrap();
        assert_close(w.probability(&[0]), 1.0, 1e-15);
        assert_close(w.probability(&[1]), 0.0, 1e-15);
    }

    #[test]
    fn wave_state_swaps_ports_at_pi() {
        let w = wave_state(PI).unwrap();
        assert_close(w.probability(&[0]), 0.0, 1e-15);
        assert_close(w.probability(&[1]), 1.0, 1e-15);
    }

    #[test]
    fn wave_particle_overlap_follows_the_phase() {
        // |<p|w>|^2 = cos^2(phi) / 2.
        for k in 0..16 {
            let phi = k as f64 * PI / 8.0;
            let p = particle_state(phi).unwrap();
            let w = wave_state(phi).unwrap();
            let overlap = fidelity_up_to_global_phase(&p, &w).unwrap();
            assert_close(overlap, phi.cos().powi(2) / 2.0, 1e-13);
        }
    }

    #[test]
    fn joint_distribution_matches_tabulated_points() {
        let d = ideal_joint_distribution(&IdealParams::new(FRAC_PI_2, FRAC_PI_2).unwrap()).unwrap();
        assert_close(d.probs[0], 0.0, 1e-15);
        assert_close(d.probs[1], 0.5, 1e-15);
        assert_close(d.probs[2], 0.0, 1e-15);
        assert_close(d.probs[3], 0.5, 1e-15);

        let d = ideal_joint_distribution(&IdealParams::new(FRAC_PI_4, 0.0).unwrap()).unwrap();
        assert_close(d.probs[0], 0.25, 1e-15);
        assert_close(d.probs[1], 0.5, 1e-15);
        assert_close(d.probs[2], 0.25, 1e-15);
        assert_close(d.probs[3], 0.0, 1e-15);
    }

    #[test]
    fn joint_distribution_always_normalizes() {
        for i in 0..21 {
            for j in 0..21 {
                let params = IdealParams::new(
                    i as f64 * FRAC_PI_2 / 20.0,
                    j as f64 * 2.0 * PI / 21.0,
                )
                .unwrap();
                let d = ideal_joint_distribution(&params).unwrap();
                assert_close(d.sum(), 1.0, 1e-12);
            }
        }
    }

    #[test]
    fn born_rule_on_final_state_reproduces_the_distribution() {
        for i in 0..11 {
            for j in 0..11 {
                let params = IdealParams::new(
                    i as f64 * FRAC_PI_2 / 10.0,
                    j as f64 * 2.0 * PI / 11.0,
                )
                .unwrap();
                let state = ideal_final_state(&params).unwrap();
                assert_close(state.norm(), 1.0, 1e-12);
                let d = ideal_joint_distribution(&params).unwrap();
                let born = [
                    state.probability(&[0, 0]),
                    state.probability(&[0, 1]),
                    state.probability(&[1, 0]),
                    state.probability(&[1, 1]),
                ];
                for (b, p) in born.iter().zip(d.probs.iter()) {
                    assert_close(*b, *p, 1e-12);
                }
            }
        }
    }

    #[test]
    fn marginal_visibility_equals_the_squared_sine() {
        for i in 0..6 {
            let alpha = i as f64 * FRAC_PI_2 / 5.0;
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for j in 0..64 {
                let phi = j as f64 * 2.0 * PI / 64.0;
                let d =
                    ideal_joint_distribution(&IdealParams::new(alpha, phi).unwrap()).unwrap();
                let m = d.system_zero_marginal();
                lo = lo.min(m);
                hi = hi.max(m);
            }
            let v = (hi - lo) / (hi + lo);
            assert_close(v, alpha.sin().powi(2), 1e-12);
        }
    }

    #[test]
    fn white_noise_mixing_is_entrywise() {
        let d = ideal_joint_distribution(&IdealParams::new(FRAC_PI_2, 0.0).unwrap()).unwrap();
        let mixed = d.mix_white(0.5).unwrap();
        assert_close(mixed.probs[0], 0.125, 1e-15);
        assert_close(mixed.probs[1], 0.625, 1e-15);
        assert_close(mixed.probs[2], 0.125, 1e-15);
        assert_close(mixed.probs[3], 0.125, 1e-15);
        assert!(d.mix_white(1.5).is_err());
    }

    #[test]
    fn morphing_interpolates_between_particle_and_wave_rows() {
        let d = ideal_joint_distribution(&IdealParams::new(FRAC_PI_3, FRAC_PI_3).unwrap()).unwrap();
        let ca2 = FRAC_PI_3.cos().powi(2);
        let sa2 = FRAC_PI_3.sin().powi(2);
        assert_close(d.probs[0] + d.probs[2], ca2, 1e-14);
        assert_close(d.probs[1] + d.probs[3], sa2, 1e-14);
    }
}
