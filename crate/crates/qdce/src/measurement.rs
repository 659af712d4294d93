//! Detection statistics, postselection, visibility, and entanglement
//! measures on the final two-atom state.
//!
//! The measured register is (system, ancilla) = (A2, A3) with g = 0 and
//! e = 1, so joint outcomes are ordered (00, 01, 10, 11). Postselecting the
//! ancilla on 0 keeps the particle-like branch, on 1 the wave-like branch.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{hermitian_eigen, StateVector, TwoQubitDensity};
use crate::ideal::JointDistribution;

/// Postselection branch, named for the behaviour it certifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// Ancilla found in |g> = |0>: the system went through the open
    /// interferometer.
    Particle,
    /// Ancilla found in |e> = |1>: the system saw the closed interferometer.
    Wave,
}

impl Branch {
    pub fn ancilla_outcome(self) -> usize {
        match self {
            Branch::Particle => 0,
            Branch::Wave => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Particle => "particle",
            Branch::Wave => "wave",
        }
    }
}

/// Conditional statistics of one postselected branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PostselectedStats {
    pub branch: Branch,
    /// Probability of the ancilla outcome that selects this branch.
    pub branch_probability: f64,
    /// System outcome distribution (P(0|branch), P(1|branch)).
    pub conditional: (f64, f64),
}

/// Mixing weight for the white-noise channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    pub epsilon: f64,
}

impl NoiseParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidNoise { epsilon });
        }
        Ok(Self { epsilon })
    }
}

/// Born probabilities of a pure two-atom state in the computational basis.
pub fn joint_distribution(state: &StateVector) -> Result<JointDistribution> {
    if state.dims() != [2, 2] {
        return Err(Error::DimensionMismatch {
            context: format!("joint distribution of state over dims {:?}", state.dims()),
        });
    }
    JointDistribution::new([
        state.probability(&[0, 0]),
        state.probability(&[0, 1]),
        state.probability(&[1, 0]),
        state.probability(&[1, 1]),
    ])
}

/// Condition the system statistics on one ancilla outcome.
pub fn postselect(state: &StateVector, branch: Branch) -> Result<PostselectedStats> {
    let d = joint_distribution(state)?;
    let a = branch.ancilla_outcome();
    let p0 = d.probs[a];
    let p1 = d.probs[2 + a];
    let total = p0 + p1;
    if total < 1e-12 {
        return Err(Error::EmptyBranch {
            branch: branch.as_str().into(),
            probability: total,
        });
    }
    Ok(PostselectedStats {
        branch,
        branch_probability: total,
        conditional: (p0 / total, p1 / total),
    })
}

/// The normalized system state carried by one postselected branch.
pub fn branch_state(state: &StateVector, branch: Branch) -> Result<StateVector> {
    if state.dims() != [2, 2] {
        return Err(Error::DimensionMismatch {
            context: format!("branch state of state over dims {:?}", state.dims()),
        });
    }
    let a = branch.ancilla_outcome();
    let amps = ndarray::array![state.amplitude(&[0, a]), state.amplitude(&[1, a])];
    let raw = StateVector::new(amps, vec![2])?;
    let weight = raw.norm().powi(2);
    if weight < 1e-12 {
        return Err(Error::EmptyBranch {
            branch: branch.as_str().into(),
            probability: weight,
        });
    }
    raw.normalized()
}

/// Interference visibility (max - min) / (max + min) of a sampled
/// probability curve.
pub fn visibility(samples: &[f64]) -> Result<f64> {
    if samples.len() < 3 {
        return Err(Error::TooFewSamples { got: samples.len() });
    }
    if samples.iter().any(|p| !p.is_finite() || *p < -1e-12) {
        return Err(Error::InvalidParameter(format!(
            "visibility samples must be finite nonnegative probabilities, got {samples:?}"
        )));
    }
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    if hi + lo <= 0.0 {
        return Err(Error::UndefinedVisibility);
    }
    Ok((hi - lo) / (hi + lo))
}

/// White-noise channel (1 - epsilon) rho + epsilon 1/4.
pub fn white_noise_mix(rho: &TwoQubitDensity, noise: NoiseParams) -> Result<TwoQubitDensity> {
    let eps = noise.epsilon;
    let mut mixed: Array2<C64> = rho.matrix() * C64::new(1.0 - eps, 0.0);
    for i in 0..4 {
        mixed[[i, i]] += C64::new(eps / 4.0, 0.0);
    }
    TwoQubitDensity::new(mixed)
}

/// Wootters concurrence of a two-atom density matrix.
///
/// Uses the spin-flipped matrix rho~ = (sy x sy) rho* (sy x sy) and the
/// decreasing square roots lambda_i of the spectrum of rho rho~, computed
/// here as the spectrum of the Hermitian matrix
/// sqrt(rho) rho~ sqrt(rho), which shares it.
pub fn concurrence(rho: &TwoQubitDensity) -> Result<f64> {
    let m = rho.matrix();

    // sy x sy has a single anti-diagonal of entries (-1, 1, 1, -1).
    let mut yy: Array2<C64> = Array2::zeros((4, 4));
    yy[[0, 3]] = C64::new(-1.0, 0.0);
    yy[[1, 2]] = C64::new(1.0, 0.0);
    yy[[2, 1]] = C64::new(1.0, 0.0);
    yy[[3, 0]] = C64::new(-1.0, 0.0);

    let conj = m.mapv(|z| z.conj());
    let tilde = yy.dot(&conj).dot(&yy);

    let (values, vectors) = hermitian_eigen(m)?;
    let mut sqrt_rho: Array2<C64> = Array2::zeros((4, 4));
    for k in 0..4 {
        let root = values[k].max(0.0).sqrt();
        for i in 0..4 {
            for j in 0..4 {
                sqrt_rho[[i, j]] += vectors[[i, k]] * vectors[[j, k]].conj() * C64::new(root, 0.0);
            }
        }
    }

    let herm = sqrt_rho.dot(&tilde).dot(&sqrt_rho);
    let (spectrum, _) = hermitian_eigen(&herm)?;
    // The square root amplifies machine noise in the small eigenvalues
    // (1e-16 becomes 1e-8), so anything at rounding scale is zeroed first.
    let largest = spectrum.iter().fold(0.0_f64, |acc, l| acc.max(*l));
    let floor = 1e-13 + 1e-12 * largest;
    let mut lambdas: Vec<f64> = spectrum
        .iter()
        .map(|l| if *l < floor { 0.0 } else { l.sqrt() })
        .collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).expect("finite spectrum"));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Closed-form concurrence 2 |c00 c11 - c01 c10| of a pure two-atom state.
pub fn pure_state_concurrence(state: &StateVector) -> Result<f64> {
    if state.dims() != [2, 2] {
        return Err(Error::DimensionMismatch {
            context: format!("pure concurrence of state over dims {:?}", state.dims()),
        });
    }
    let normed = state.normalized()?;
    let a = normed.amplitude(&[0, 0]);
    let b = normed.amplitude(&[0, 1]);
    let cc = normed.amplitude(&[1, 0]);
    let d = normed.amplitude(&[1, 1]);
    Ok(2.0 * (a * d - b * cc).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::{ideal_final_state, IdealParams};
    use num_complex::Complex64 as C64;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} != {b} (tol {tol})");
    }

    fn bell_phi_plus() -> StateVector {
        StateVector::new(
            ndarray::array![c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0)],
            vec![2, 2],
        )
        .unwrap()
    }

    #[test]
    fn joint_distribution_reads_off_born_probabilities() {
        let params = IdealParams::new(FRAC_PI_3, FRAC_PI_4).unwrap();
        let state = ideal_final_state(&params).unwrap();
        let d = joint_distribution(&state).unwrap();
        let expected = crate::ideal::ideal_joint_distribution(&params).unwrap();
        assert!(d.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn joint_distribution_requires_two_atoms() {
        assert!(joint_distribution(&StateVector::ground()).is_err());
    }

    #[test]
    fn postselection_splits_branch_weights_by_alpha() {
        let params = IdealParams::new(FRAC_PI_3, 0.9).unwrap();
        let state = ideal_final_state(&params).unwrap();
        let particle = postselect(&state, Branch::Particle).unwrap();
        let wave = postselect(&state, Branch::Wave).unwrap();
        assert_close(particle.branch_probability, FRAC_PI_3.cos().powi(2), 1e-13);
        assert_close(wave.branch_probability, FRAC_PI_3.sin().powi(2), 1e-13);
        assert_close(particle.conditional.0, 0.5, 1e-13);
        assert_close(particle.conditional.1, 0.5, 1e-13);
    }

    #[test]
    fn wave_branch_conditional_interferes() {
        let params = IdealParams::new(FRAC_PI_4, FRAC_PI_3).unwrap();
        let state = ideal_final_state(&params).unwrap();
        let wave = postselect(&state, Branch::Wave).unwrap();
        assert_close(wave.conditional.0, 0.75, 1e-13);
        assert_close(wave.conditional.1, 0.25, 1e-13);
    }

    #[test]
    fn empty_branch_is_rejected() {
        let params = IdealParams::new(0.0, 0.3).unwrap();
        let state = ideal_final_state(&params).unwrap();
        assert!(matches!(
            postselect(&state, Branch::Wave),
            Err(Error::EmptyBranch { .. })
        ));
        assert!(matches!(
            branch_state(&state, Branch::Wave),
            Err(Error::EmptyBranch { .. })
        ));
    }

    #[test]
    fn branch_state_normalizes_the_kept_column() {
        let params = IdealParams::new(FRAC_PI_3, 1.1).unwrap();
        let state = ideal_final_state(&params).unwrap();
        let w = branch_state(&state, Branch::Wave).unwrap();
        assert_close(w.norm(), 1.0, 1e-13);
        let expected = crate::ideal::wave_state(1.1).unwrap();
        assert_close(
            crate::hilbert::fidelity_up_to_global_phase(&w, &expected).unwrap(),
            1.0,
            1e-13,
        );
    }

    #[test]
    fn visibility_of_a_full_swing_curve_is_one() {
        let samples: Vec<f64> = (0..16)
            .map(|k| (k as f64 * PI / 8.0).cos().powi(2))
            .collect();
        assert_close(visibility(&samples).unwrap(), 1.0, 1e-12);
    }

    #[test]
    fn visibility_of_a_flat_curve_is_zero() {
        assert_close(visibility(&[0.5, 0.5, 0.5, 0.5]).unwrap(), 0.0, 1e-15);
    }

    #[test]
    fn visibility_guards_degenerate_input() {
        assert!(matches!(
            visibility(&[0.1, 0.9]),
            Err(Error::TooFewSamples { .. })
        ));
        assert!(matches!(
            visibility(&[0.0, 0.0, 0.0]),
            Err(Error::UndefinedVisibility)
        ));
    }

    #[test]
    fn concurrence_of_a_bell_state_is_one() {
        let rho = TwoQubitDensity::from_pure(&bell_phi_plus()).unwrap();
        assert_close(concurrence(&rho).unwrap(), 1.0, 1e-10);
    }

    #[test]
    fn concurrence_of_a_product_state_is_zero() {
        let product = StateVector::tensor(&[
            &StateVector::qubit(c(0.6, 0.0), c(0.8, 0.0)).unwrap(),
            &StateVector::qubit(c(1.0, 0.0), c(0.0, 1.0)).unwrap(),
        ])
        .unwrap();
        let rho = TwoQubitDensity::from_pure(&product).unwrap();
        assert_close(concurrence(&rho).unwrap(), 0.0, 1e-10);
    }

    #[test]
    fn fully_mixed_noise_kills_entanglement() {
        let rho = TwoQubitDensity::from_pure(&bell_phi_plus()).unwrap();
        let mixed = white_noise_mix(&rho, NoiseParams::new(1.0).unwrap()).unwrap();
        assert_close(concurrence(&mixed).unwrap(), 0.0, 1e-10);
        assert_close(mixed.purity(), 0.25, 1e-12);
    }

    #[test]
    fn werner_concurrence_follows_the_known_line() {
        // (1 - eps) |Phi+><Phi+| + eps 1/4 has concurrence
        // max(0, 1 - 3 eps / 2).
        let rho = TwoQubitDensity::from_pure(&bell_phi_plus()).unwrap();
        for k in 0..=10 {
            let eps = k as f64 / 10.0;
            let mixed = white_noise_mix(&rho, NoiseParams::new(eps).unwrap()).unwrap();
            let expected = (1.0 - 1.5 * eps).max(0.0);
            assert_close(concurrence(&mixed).unwrap(), expected, 1e-10);
        }
    }

    #[test]
    fn noise_weight_is_validated() {
        assert!(NoiseParams::new(-0.1).is_err());
        assert!(NoiseParams::new(1.1).is_err());
        assert!(NoiseParams::new(f64::NAN).is_err());
    }

    #[test]
    fn noise_preserves_trace_and_hermiticity_exactly() {
        let params = IdealParams::new(0.7, 2.2).unwrap();
        let rho = TwoQubitDensity::from_pure(&ideal_final_state(&params).unwrap()).unwrap();
        let mixed = white_noise_mix(&rho, NoiseParams::new(0.37).unwrap()).unwrap();
        let trace: C64 = (0..4).map(|i| mixed.matrix()[[i, i]]).sum();
        assert_close(trace.re, 1.0, 1e-15);
        assert_close(trace.im, 0.0, 1e-15);
    }

    #[test]
    fn mixed_diagonal_matches_entrywise_distribution_mixing() {
        let params = IdealParams::new(FRAC_PI_2, 0.0).unwrap();
        let state = ideal_final_state(&params).unwrap();
        let rho = TwoQubitDensity::from_pure(&state).unwrap();
        let mixed = white_noise_mix(&rho, NoiseParams::new(0.5).unwrap()).unwrap();
        let direct = joint_distribution(&state).unwrap().mix_white(0.5).unwrap();
        for (a, b) in mixed.diagonal().iter().zip(direct.probs.iter()) {
            assert_close(*a, *b, 1e-14);
        }
        assert_close(direct.probs[0], 0.125, 1e-15);
        assert_close(direct.probs[1], 0.625, 1e-15);
    }

    #[test]
    fn pure_formula_agrees_with_wootters_on_random_states() {
        let mut rng = StdRng::seed_from_u64(97);
        for _ in 0..100 {
            let raw: Vec<C64> = (0..4)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let state = StateVector::new(ndarray::Array1::from_vec(raw), vec![2, 2])
                .unwrap()
                .normalized()
                .unwrap();
            let direct = pure_state_concurrence(&state).unwrap();
            let rho = TwoQubitDensity::from_pure(&state).unwrap();
            let wootters = concurrence(&rho).unwrap();
            assert_close(direct, wootters, 1e-10);
        }
    }

    #[test]
    fn concurrence_never_increases_under_white_noise() {
        let params = IdealParams::new(FRAC_PI_4, PI).unwrap();
        let rho = TwoQubitDensity::from_pure(&ideal_final_state(&params).unwrap()).unwrap();
        let mut last = f64::INFINITY;
        for k in 0..=20 {
            let eps = k as f64 / 20.0;
            let mixed = white_noise_mix(&rho, NoiseParams::new(eps).unwrap()).unwrap();
            let value = concurrence(&mixed).unwrap();
            assert!(value <= last + 1e-10);
            last = value;
        }
    }
}
