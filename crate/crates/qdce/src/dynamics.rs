//! Atom-cavity interaction generators and their closed-form pulse unitaries.
//!
//! Three interactions drive the whole protocol:
//!
//! - resonant Jaynes-Cummings exchange, H/hbar = g (sigma^- a^dag + sigma^+ a),
//!   whose pulse-area unitary `u_on` rotates each excitation-conserving pair
//!   {|e,n>, |g,n+1>} by the angle g t sqrt(n+1);
//! - the far-detuned dispersive interaction, H/hbar = chi a^dag a |e><e|,
//!   whose unitary `u_off` imprints a photon-number phase on the excited
//!   atom only;
//! - classical Ramsey-zone rotations, R/hbar = |lambda| (e^{i chi} sigma^+ +
//!   e^{-i chi} sigma^-), applied for a pulse area theta = |lambda| t.
//!
//! Every closed form is checked in the tests against `expm_oracle`, an
//! independent matrix-exponential route through the Hermitian
//! eigendecomposition of the generator.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::hilbert::{
    annihilation, creation, hermitian_eigen, number_operator, sigma_ee, sigma_minus, sigma_plus,
    Operator,
};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn check_finite(name: &str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} = {value} is not finite")));
    }
    Ok(())
}

/// Which printed form of the Ramsey-zone rotation to apply.
///
/// `Hamiltonian` exponentiates the rotation generator and is unitary for all
/// settings; it is the default everywhere. `PaperEq7` applies the alternative
/// tabulated map selected by the CLI flag of the same name; that map is only
/// unitary for chi = pi/2 modulo pi and is rejected elsewhere.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RamseyConvention {
    Hamiltonian,
    PaperEq7,
}

impl RamseyConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            RamseyConvention::Hamiltonian => "hamiltonian",
            RamseyConvention::PaperEq7 => "paper-eq7",
        }
    }
}

impl std::str::FromStr for RamseyConvention {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "hamiltonian" => Ok(RamseyConvention::Hamiltonian),
            "paper-eq7" => Ok(RamseyConvention::PaperEq7),
            other => Err(format!(
                "unknown convention '{other}'; expected 'hamiltonian' or 'paper-eq7'"
            )),
        }
    }
}

/// Validated dial card for one run: Ramsey pulse area and phase, resonant
/// pulse area, and dispersive phase. Pulse areas are reduced into [0, 2*pi).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseSettings {
    pub theta: f64,
    pub chi: f64,
    pub gt: f64,
    pub vartheta: f64,
}

impl PulseSettings {
    pub fn new(theta: f64, chi: f64, gt: f64, vartheta: f64) -> Result<Self> {
        check_finite("theta", theta)?;
        check_finite("chi", chi)?;
        check_finite("gt", gt)?;
        check_finite("vartheta", vartheta)?;
        Ok(Self {
            theta: theta.rem_euclid(TAU),
            chi,
            gt: gt.rem_euclid(TAU),
            vartheta,
        })
    }
}

/// Resonant Jaynes-Cummings generator g (sigma^- a^dag + sigma^+ a) over one
/// atom and the mode truncated at `n_max` photons.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JaynesCummingsGen {
    pub g: f64,
    pub n_max: usize,
}

impl JaynesCummingsGen {
    pub fn new(g: f64, n_max: usize) -> Result<Self> {
        check_finite("g", g)?;
        if n_max < 1 {
            return Err(Error::InvalidParameter(
                "Jaynes-Cummings truncation needs n_max >= 1".into(),
            ));
        }
        Ok(Self { g, n_max })
    }

    /// H / hbar as a dense operator over dims [2, n_max + 1].
    pub fn operator(&self) -> Operator {
        let lower = Operator::tensor(&[&sigma_minus(), &creation(self.n_max)]).expect("fixed dims");
        let raise = Operator::tensor(&[&sigma_plus(), &annihilation(self.n_max)]).expect("fixed dims");
        lower.add(&raise).expect("same dims").scale(c(self.g, 0.0))
    }

    /// Interaction time that realizes pulse area `gt`.
    pub fn time_for_pulse_area(&self, gt: f64) -> f64 {
        gt / self.g
    }
}

/// Dispersive generator chi_rate * a^dag a |e><e| over one atom and the mode;
/// `chi_rate` stands for g^2/delta at detuning delta.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersiveGen {
    pub chi_rate: f64,
    pub n_max: usize,
}

impl DispersiveGen {
    pub fn new(chi_rate: f64, n_max: usize) -> Result<Self> {
        check_finite("chi_rate", chi_rate)?;
        Ok(Self { chi_rate, n_max })
    }

    /// H / hbar as a dense operator over dims [2, n_max + 1].
    pub fn operator(&self) -> Operator {
        Operator::tensor(&[&sigma_ee(), &number_operator(self.n_max)])
            .expect("fixed dims")
            .scale(c(self.chi_rate, 0.0))
    }
}

/// Ramsey-zone generator |lambda| (e^{i chi} sigma^+ + e^{-i chi} sigma^-).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RamseyGen {
    pub amplitude: f64,
    pub chi: f64,
}

impl RamseyGen {
    pub fn new(amplitude: f64, chi: f64) -> Result<Self> {
        check_finite("amplitude", amplitude)?;
        check_finite("chi", chi)?;
        Ok(Self { amplitude, chi })
    }

    /// R / hbar as a dense single-atom operator.
    pub fn operator(&self) -> Operator {
        let mut m = Array2::zeros((2, 2));
        m[[0, 1]] = C64::from_polar(self.amplitude, -self.chi);
        m[[1, 0]] = C64::from_polar(self.amplitude, self.chi);
        Operator::new(m, vec![2]).expect("fixed dims")
    }
}

/// Total excitation number a^dag a + |e><e| over dims [2, n_max + 1]; the
/// resonant generator commutes with it.
pub fn excitation_number(n_max: usize) -> Operator {
    let photons = Operator::tensor(&[
        &Operator::identity(&[2]).expect("fixed dims"),
        &number_operator(n_max),
    ])
    .expect("fixed dims");
    let atom = Operator::tensor(&[
        &sigma_ee(),
        &Operator::identity(&[n_max + 1]).expect("fixed dims"),
    ])
    .expect("fixed dims");
    photons.add(&atom).expect("same dims")
}

/// Closed-form resonant pulse at area `gt` over dims [2, n_max + 1].
///
/// Each pair {|e,n>, |g,n+1>} rotates by gt*sqrt(n+1); |g,0> is dark, and the
/// truncation leaves |e,n_max> fixed because its partner level does not exist
/// in the register.
pub fn u_on(gt: f64, n_max: usize) -> Result<Operator> {
    check_finite("gt", gt)?;
    if n_max < 1 {
        return Err(Error::InvalidParameter(
            "resonant pulse needs n_max >= 1".into(),
        ));
    }
    let levels = n_max + 1;
    let d = 2 * levels;
    let mut m = Array2::zeros((d, d));
    let idx = |atom: usize, n: usize| atom * levels + n;
    m[[idx(0, 0), idx(0, 0)]] = c(1.0, 0.0);
    m[[idx(1, n_max), idx(1, n_max)]] = c(1.0, 0.0);
    for n in 0..n_max {
        let angle = gt * ((n + 1) as f64).sqrt();
        let (cos, sin) = (angle.cos(), angle.sin());
        m[[idx(1, n), idx(1, n)]] = c(cos, 0.0);
        m[[idx(0, n + 1), idx(0, n + 1)]] = c(cos, 0.0);
        m[[idx(0, n + 1), idx(1, n)]] = c(0.0, -sin);
        m[[idx(1, n), idx(0, n + 1)]] = c(0.0, -sin);
    }
    Operator::new(m, vec![2, levels])
}

/// Closed-form dispersive pulse over dims [2, n_max + 1]: |e,n> gains the
/// phase e^{i n vartheta} while every |g,n> is untouched. Equals
/// exp(-i H_off t / hbar) at (g^2/delta) t = -vartheta, the detuning sign
/// being free.
pub fn u_off(vartheta: f64, n_max: usize) -> Result<Operator> {
    check_finite("vartheta", vartheta)?;
    let levels = n_max + 1;
    let d = 2 * levels;
    let mut m = Array2::zeros((d, d));
    for n in 0..levels {
        m[[n, n]] = c(1.0, 0.0);
        m[[levels + n, levels + n]] = C64::from_polar(1.0, vartheta * n as f64);
    }
    Operator::new(m, vec![2, levels])
}

/// Ramsey-zone rotation at pulse area `theta` and phase `chi`.
///
/// Under `Hamiltonian` this is exp(-i theta (e^{i chi} sigma^+ +
/// e^{-i chi} sigma^-)):
///
/// ```text
/// |g> -> cos(theta) |g> - i e^{ i chi} sin(theta) |e>
/// |e> -> cos(theta) |e> - i e^{-i chi} sin(theta) |g>
/// ```
///
/// Under `PaperEq7` the alternative tabulated map is
///
/// ```text
/// |g> -> cos(theta) |g> + i e^{i chi} sin(theta) |e>
/// |e> -> cos(theta) |e> - i e^{i chi} sin(theta) |g>
/// ```
///
/// whose columns are only orthogonal when sin(theta) cos(theta) cos(chi) = 0;
/// settings that leave it non-unitary beyond 1e-10 are rejected.
pub fn ramsey(theta: f64, chi: f64, convention: RamseyConvention) -> Result<Operator> {
    check_finite("theta", theta)?;
    check_finite("chi", chi)?;
    let (cos, sin) = (theta.cos(), theta.sin());
    let mut m = Array2::zeros((2, 2));
    m[[0, 0]] = c(cos, 0.0);
    m[[1, 1]] = c(cos, 0.0);
    match convention {
        RamseyConvention::Hamiltonian => {
            m[[1, 0]] = c(0.0, -1.0) * C64::from_polar(sin, chi);
            m[[0, 1]] = c(0.0, -1.0) * C64::from_polar(sin, -chi);
        }
        RamseyConvention::PaperEq7 => {
            m[[1, 0]] = c(0.0, 1.0) * C64::from_polar(sin, chi);
            m[[0, 1]] = c(0.0, -1.0) * C64::from_polar(sin, chi);
        }
    }
    let op = Operator::new(m, vec![2])?;
    let deviation = op.unitarity_error();
    if deviation > 1e-10 {
        return Err(Error::NonUnitaryConvention { theta, chi, deviation });
    }
    Ok(op)
}

/// exp(-i G t) through the eigendecomposition of the Hermitian generator G.
///
/// This is the reference route the closed-form pulses are measured against,
/// so it shares no code with them beyond the eigensolver. Inputs whose
/// Hermiticity deviation exceeds 1e-12 are rejected.
pub fn expm_oracle(generator: &Operator, t: f64) -> Result<Operator> {
    check_finite("t", t)?;
    let deviation = generator.hermiticity_error();
    if deviation > 1e-12 {
        return Err(Error::NotHermitian { deviation });
    }
    let (values, vectors) = hermitian_eigen(generator.matrix())?;
    let n = values.len();
    let mut m = Array2::zeros((n, n));
    for k in 0..n {
        let phase = C64::from_polar(1.0, -values[k] * t);
        for i in 0..n {
            for j in 0..n {
                m[[i, j]] += vectors[[i, k]] * phase * vectors[[j, k]].conj();
            }
        }
    }
    Operator::new(m, generator.dims().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::StateVector;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} != {b} (tol {tol})");
    }

    fn assert_c_close(a: C64, b: C64, tol: f64) {
        assert!((a - b).norm() <= tol, "{a} != {b} (tol {tol})");
    }

    fn apply_to_basis(op: &Operator, digits: &[usize]) -> StateVector {
        let input = StateVector::basis_state(op.dims(), digits).unwrap();
        op.apply(&input).unwrap()
    }

    #[test]
    fn resonant_pulse_leaves_the_dark_state_alone() {
        let u = u_on(FRAC_PI_2, 2).unwrap();
        let out = apply_to_basis(&u, &[0, 0]);
        assert_c_close(out.amplitude(&[0, 0]), c(1.0, 0.0), 1e-15);
    }

    #[test]
    fn resonant_half_pulse_swaps_excitation_into_the_mode() {
        let u = u_on(FRAC_PI_2, 2).unwrap();
        let from_e0 = apply_to_basis(&u, &[1, 0]);
        assert_c_close(from_e0.amplitude(&[0, 1]), c(0.0, -1.0), 1e-12);
        let from_g1 = apply_to_basis(&u, &[0, 1]);
        assert_c_close(from_g1.amplitude(&[1, 0]), c(0.0, -1.0), 1e-12);
    }

    #[test]
    fn resonant_quarter_pulse_splits_an_excited_atom() {
        let u = u_on(FRAC_PI_4, 1).unwrap();
        let out = apply_to_basis(&u, &[1, 0]);
        assert_c_close(out.amplitude(&[1, 0]), c(FRAC_PI_4.cos(), 0.0), 1e-15);
        assert_c_close(out.amplitude(&[0, 1]), c(0.0, -FRAC_PI_4.sin()), 1e-15);
    }

    #[test]
    fn resonant_pulse_areas_compose_additively() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..20 {
            let a = rng.gen_range(0.0..TAU);
            let b = rng.gen_range(0.0..TAU);
            let left = u_on(a, 2).unwrap().compose(&u_on(b, 2).unwrap()).unwrap();
            let right = u_on(a + b, 2).unwrap();
            assert!(left.max_abs_diff(&right).unwrap() < 1e-12);
        }
    }

    #[test]
    fn resonant_generator_commutes_with_total_excitation() {
        let gen = JaynesCummingsGen::new(1.3, 3).unwrap().operator();
        let n = excitation_number(3);
        let comm_forward = gen.compose(&n).unwrap();
        let comm_backward = n.compose(&gen).unwrap();
        assert!(comm_forward.max_abs_diff(&comm_backward).unwrap() < 1e-12);
    }

    #[test]
    fn dispersive_pulse_phases_only_the_excited_branch() {
        let theta = 0.7;
        let u = u_off(theta, 2).unwrap();
        assert_c_close(
            apply_to_basis(&u, &[1, 1]).amplitude(&[1, 1]),
            C64::from_polar(1.0, theta),
            1e-15,
        );
        assert_c_close(
            apply_to_basis(&u, &[1, 2]).amplitude(&[1, 2]),
            C64::from_polar(1.0, 2.0 * theta),
            1e-15,
        );
        assert_c_close(apply_to_basis(&u, &[0, 1]).amplitude(&[0, 1]), c(1.0, 0.0), 1e-15);
        assert_c_close(apply_to_basis(&u, &[1, 0]).amplitude(&[1, 0]), c(1.0, 0.0), 1e-15);
        assert_c_close(apply_to_basis(&u, &[0, 0]).amplitude(&[0, 0]), c(1.0, 0.0), 1e-15);
    }

    #[test]
    fn dispersive_pulse_inverts_cleanly() {
        let forward = u_off(1.234, 2).unwrap();
        let backward = u_off(-1.234, 2).unwrap();
        let round_trip = forward.compose(&backward).unwrap();
        assert!(
            round_trip
                .max_abs_diff(&Operator::identity(&[2, 3]).unwrap())
                .unwrap()
                < 1e-14
        );
    }

    #[test]
    fn ramsey_hamiltonian_matches_its_stated_map() {
        let theta = 0.9;
        let chi = 2.1;
        let u = ramsey(theta, chi, RamseyConvention::Hamiltonian).unwrap();
        let from_g = apply_to_basis(&u, &[0]);
        assert_c_close(from_g.amplitude(&[0]), c(theta.cos(), 0.0), 1e-15);
        assert_c_close(
            from_g.amplitude(&[1]),
            c(0.0, -1.0) * C64::from_polar(theta.sin(), chi),
            1e-15,
        );
        let from_e = apply_to_basis(&u, &[1]);
        assert_c_close(from_e.amplitude(&[1]), c(theta.cos(), 0.0), 1e-15);
        assert_c_close(
            from_e.amplitude(&[0]),
            c(0.0, -1.0) * C64::from_polar(theta.sin(), -chi),
            1e-15,
        );
    }

    #[test]
    fn ramsey_hamiltonian_prepares_the_balanced_superposition() {
        let u = ramsey(FRAC_PI_4, FRAC_PI_2, RamseyConvention::Hamiltonian).unwrap();
        let out = apply_to_basis(&u, &[0]);
        assert_c_close(out.amplitude(&[0]), c(FRAC_PI_4.cos(), 0.0), 1e-15);
        assert_c_close(out.amplitude(&[1]), c(FRAC_PI_4.sin(), 0.0), 1e-15);
    }

    #[test]
    fn ramsey_hamiltonian_is_unitary_for_arbitrary_settings() {
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..200 {
            let theta = rng.gen_range(-10.0..10.0);
            let chi = rng.gen_range(-10.0..10.0);
            let u = ramsey(theta, chi, RamseyConvention::Hamiltonian).unwrap();
            assert!(u.unitarity_error() < 1e-12, "theta={theta} chi={chi}");
        }
    }

    #[test]
    fn ramsey_alternative_map_works_at_its_unitary_settings() {
        let u = ramsey(FRAC_PI_4, 3.0 * FRAC_PI_2, RamseyConvention::PaperEq7).unwrap();
        let out = apply_to_basis(&u, &[0]);
        assert_c_close(out.amplitude(&[0]), c(FRAC_PI_4.cos(), 0.0), 1e-12);
        assert_c_close(out.amplitude(&[1]), c(FRAC_PI_4.sin(), 0.0), 1e-12);
    }

    #[test]
    fn ramsey_alternative_map_rejects_non_unitary_settings() {
        let err = ramsey(FRAC_PI_4, 0.0, RamseyConvention::PaperEq7).unwrap_err();
        match err {
            Error::NonUnitaryConvention { deviation, .. } => assert!(deviation > 0.5),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn oracle_of_zero_generator_is_identity() {
        let zero = Operator::new(Array2::zeros((6, 6)), vec![2, 3]).unwrap();
        let u = expm_oracle(&zero, 3.7).unwrap();
        assert!(u.max_abs_diff(&Operator::identity(&[2, 3]).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn oracle_rejects_non_hermitian_generators() {
        let mut m: Array2<C64> = Array2::zeros((2, 2));
        m[[0, 1]] = c(1.0, 0.0);
        let gen = Operator::new(m, vec![2]).unwrap();
        assert!(matches!(
            expm_oracle(&gen, 1.0),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn oracle_reproduces_the_dispersive_phase_magnitude() {
        // (g^2/delta) t = 0.7 puts a phase of magnitude 0.7 rad on |e,1>.
        let gen = DispersiveGen::new(0.7, 2).unwrap().operator();
        let u = expm_oracle(&gen, 1.0).unwrap();
        let out = apply_to_basis(&u, &[1, 1]);
        let amp = out.amplitude(&[1, 1]);
        assert_close(amp.norm(), 1.0, 1e-12);
        assert_close(amp.arg().abs(), 0.7, 1e-12);
    }

    #[test]
    fn closed_form_pulses_match_the_exponential_oracle() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..50 {
            let n_max = rng.gen_range(1..=3usize);
            let g = rng.gen_range(0.5..2.0);
            let gt = rng.gen_range(0.0..TAU);
            let jc = JaynesCummingsGen::new(g, n_max).unwrap();
            let direct = u_on(gt, n_max).unwrap();
            let oracle = expm_oracle(&jc.operator(), jc.time_for_pulse_area(gt)).unwrap();
            assert!(
                direct.max_abs_diff(&oracle).unwrap() < 1e-10,
                "u_on mismatch at gt={gt}, n_max={n_max}"
            );

            let vartheta = rng.gen_range(-TAU..TAU);
            let chi_rate = rng.gen_range(0.1..2.0);
            let disp = DispersiveGen::new(chi_rate, n_max).unwrap();
            let direct = u_off(vartheta, n_max).unwrap();
            let oracle = expm_oracle(&disp.operator(), -vartheta / chi_rate).unwrap();
            assert!(
                direct.max_abs_diff(&oracle).unwrap() < 1e-10,
                "u_off mismatch at vartheta={vartheta}"
            );

            let theta = rng.gen_range(0.0..TAU);
            let chi = rng.gen_range(-PI..PI);
            let amplitude = rng.gen_range(0.2..3.0);
            let rz = RamseyGen::new(amplitude, chi).unwrap();
            let direct = ramsey(theta, chi, RamseyConvention::Hamiltonian).unwrap();
            let oracle = expm_oracle(&rz.operator(), theta / amplitude).unwrap();
            assert!(
                direct.max_abs_diff(&oracle).unwrap() < 1e-10,
                "ramsey mismatch at theta={theta}, chi={chi}"
            );
        }
    }

    #[test]
    fn every_pulse_preserves_norm_on_random_states() {
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..100 {
            let raw: Vec<C64> = (0..6)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let state = StateVector::new(ndarray::Array1::from_vec(raw), vec![2, 3])
                .unwrap()
                .normalized()
                .unwrap();
            for op in [
                u_on(rng.gen_range(0.0..TAU), 2).unwrap(),
                u_off(rng.gen_range(-TAU..TAU), 2).unwrap(),
            ] {
                assert_close(op.apply(&state).unwrap().norm(), 1.0, 1e-12);
            }
            let single = StateVector::qubit(
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
            .unwrap();
            let rot = ramsey(
                rng.gen_range(0.0..TAU),
                rng.gen_range(-PI..PI),
                RamseyConvention::Hamiltonian,
            )
            .unwrap();
            assert_close(rot.apply(&single).unwrap().norm(), 1.0, 1e-12);
        }
    }

    #[test]
    fn pulse_settings_reduce_areas_into_one_turn() {
        let s = PulseSettings::new(TAU + 0.25, -1.0, -FRAC_PI_2, 5.0).unwrap();
        assert_close(s.theta, 0.25, 1e-12);
        assert_close(s.gt, TAU - FRAC_PI_2, 1e-12);
        assert!(PulseSettings::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
    }
}
