//! Exact dense linear algebra for a register of two-level atoms and one
//! truncated cavity mode.
//!
//! Conventions used throughout the crate:
//!
//! - register order is (A1, A2, A3, Cavity) when all four subsystems are
//!   present; types carry their own dimension lists so smaller registers
//!   (a single atom, an atom plus the mode) work the same way;
//! - each atom is two-dimensional with basis index 0 = |g> and 1 = |e>;
//! - the cavity is truncated at `n_max` photons, so its dimension is
//!   `n_max + 1` with Fock states ordered |0>, |1>, ..., |n_max>;
//! - composite indices are row-major over the dimension list: the last
//!   subsystem varies fastest.
//!
//! Everything is dense `Complex64`; the largest register in scope is
//! 2 x 2 x 2 x (n_max + 1), i.e. dimension 24 at the deepest truncation the
//! test suite exercises, so no sparse structure is warranted.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerance for Hermiticity / trace checks on density matrices.
const DENSITY_TOL: f64 = 1e-12;
/// Eigenvalues of a positive semidefinite matrix may dip this far below zero
/// before the matrix is rejected.
const PSD_TOL: f64 = -1e-10;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn dims_product(dims: &[usize]) -> usize {
    dims.iter().product()
}

fn check_dims_nonempty(dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::DimensionMismatch {
            context: format!("dimension list {dims:?} must be nonempty with nonzero entries"),
        });
    }
    Ok(())
}

/// Decompose a flat row-major index into per-subsystem digits.
fn decompose(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

fn compose(digits: &[usize], dims: &[usize]) -> usize {
    let mut index = 0;
    for (d, dim) in digits.iter().zip(dims) {
        index = index * dim + d;
    }
    index
}

// ---------------------------------------------------------------------------
// state vectors
// ---------------------------------------------------------------------------

/// A pure state over a register of subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Array1<C64>,
    dims: Vec<usize>,
}

impl StateVector {
    /// Wrap raw amplitudes; the length must equal the product of `dims`.
    pub fn new(amps: Array1<C64>, dims: Vec<usize>) -> Result<Self> {
        check_dims_nonempty(&dims)?;
        if amps.len() != dims_product(&dims) {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{} amplitudes cannot fill a register of dims {:?}",
                    amps.len(),
                    dims
                ),
            });
        }
        Ok(Self { amps, dims })
    }

    /// Computational basis state labelled by one digit per subsystem.
    pub fn basis_state(dims: &[usize], digits: &[usize]) -> Result<Self> {
        check_dims_nonempty(dims)?;
        if digits.len() != dims.len() || digits.iter().zip(dims).any(|(&d, &n)| d >= n) {
            return Err(Error::DimensionMismatch {
                context: format!("digits {digits:?} do not address dims {dims:?}"),
            });
        }
        let mut amps = Array1::zeros(dims_product(dims));
        amps[compose(digits, dims)] = c(1.0, 0.0);
        Ok(Self {
            amps,
            dims: dims.to_vec(),
        })
    }

    /// Single-atom state `cg |g> + ce |e>`, normalized.
    pub fn qubit(cg: C64, ce: C64) -> Result<Self> {
        let norm = (cg.norm_sqr() + ce.norm_sqr()).sqrt();
        if norm < 1e-300 {
            return Err(Error::InvalidParameter(
                "qubit amplitudes are both zero".into(),
            ));
        }
        Ok(Self {
            amps: ndarray::array![cg / norm, ce / norm],
            dims: vec![2],
        })
    }

    /// |g> of a single atom.
    pub fn ground() -> Self {
        Self::basis_state(&[2], &[0]).expect("fixed dims")
    }

    /// |e> of a single atom.
    pub fn excited() -> Self {
        Self::basis_state(&[2], &[1]).expect("fixed dims")
    }

    /// Fock state |n> of a mode truncated at `n_max` photons.
    pub fn fock(n_max: usize, n: usize) -> Result<Self> {
        Self::basis_state(&[n_max + 1], &[n])
    }

    /// Vacuum |0> of a mode truncated at `n_max` photons.
    pub fn vacuum(n_max: usize) -> Self {
        Self::fock(n_max, 0).expect("vacuum always addressable")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amps
    }

    /// Amplitude of one computational basis state.
    pub fn amplitude(&self, digits: &[usize]) -> C64 {
        self.amps[compose(digits, &self.dims)]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm < 1e-300 {
            return Err(Error::InvalidParameter("cannot normalize zero vector".into()));
        }
        Ok(Self {
            amps: self.amps.mapv(|a| a / norm),
            dims: self.dims.clone(),
        })
    }

    /// Inner product `<self|other>`.
    pub fn overlap(&self, other: &Self) -> Result<C64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                context: format!("overlap of dims {:?} with {:?}", self.dims, other.dims),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Born probability of one computational basis outcome.
    pub fn probability(&self, digits: &[usize]) -> f64 {
        self.amplitude(digits).norm_sqr()
    }

    /// Total probability carried by basis states whose digit at `subsystem`
    /// satisfies the predicate.
    pub fn population_where<F: Fn(usize) -> bool>(&self, subsystem: usize, pred: F) -> f64 {
        let mut digits = vec![0usize; self.dims.len()];
        let mut total = 0.0;
        for (index, amp) in self.amps.iter().enumerate() {
            decompose(index, &self.dims, &mut digits);
            if pred(digits[subsystem]) {
                total += amp.norm_sqr();
            }
        }
        total
    }

    /// Kronecker product of states, first factor slowest-varying.
    pub fn tensor(factors: &[&StateVector]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("tensor of zero factors".into()));
        }
        let mut dims = Vec::new();
        for f in factors {
            dims.extend_from_slice(&f.dims);
        }
        let mut amps = factors[0].amps.to_vec();
        for f in &factors[1..] {
            let mut next = Vec::with_capacity(amps.len() * f.amps.len());
            for a in &amps {
                for b in f.amps.iter() {
                    next.push(a * b);
                }
            }
            amps = next;
        }
        Ok(Self {
            amps: Array1::from_vec(amps),
            dims,
        })
    }

    /// Rotate the global phase so the largest-magnitude amplitude is real and
    /// nonnegative (ties broken toward the lowest index). Gives reduced
    /// states a reproducible representative.
    pub fn canonical_phase(&self) -> Self {
        let mut best = 0usize;
        let mut best_mag = -1.0;
        for (i, a) in self.amps.iter().enumerate() {
            let mag = a.norm_sqr();
            if mag > best_mag + 1e-30 {
                best_mag = mag;
                best = i;
            }
        }
        let pivot = self.amps[best];
        if pivot.norm() < 1e-300 {
            return self.clone();
        }
        let phase = pivot.conj() / pivot.norm();
        Self {
            amps: self.amps.mapv(|a| a * phase),
            dims: self.dims.clone(),
        }
    }
}

impl std::fmt::Display for StateVector {
    /// Ket-style rendering, skipping amplitudes below 1e-12. Two-dimensional
    /// subsystems print as g/e, larger ones as photon numbers.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut digits = vec![0usize; self.dims.len()];
        let mut first = true;
        for (index, amp) in self.amps.iter().enumerate() {
            if amp.norm() < 1e-12 {
                continue;
            }
            decompose(index, &self.dims, &mut digits);
            let label: Vec<String> = digits
                .iter()
                .zip(&self.dims)
                .map(|(&d, &n)| {
                    if n == 2 {
                        if d == 0 { "g".into() } else { "e".into() }
                    } else {
                        d.to_string()
                    }
                })
                .collect();
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:+.4}{:+.4}i)|{}>", amp.re, amp.im, label.join(","))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// operators
// ---------------------------------------------------------------------------

/// A dense square operator over a register of subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: Array2<C64>,
    dims: Vec<usize>,
}

impl Operator {
    pub fn new(matrix: Array2<C64>, dims: Vec<usize>) -> Result<Self> {
        check_dims_nonempty(&dims)?;
        let d = dims_product(&dims);
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "{}x{} matrix cannot act on a register of dims {:?}",
                    matrix.nrows(),
                    matrix.ncols(),
                    dims
                ),
            });
        }
        Ok(Self { matrix, dims })
    }

    pub fn identity(dims: &[usize]) -> Result<Self> {
        check_dims_nonempty(dims)?;
        Ok(Self {
            matrix: Array2::eye(dims_product(dims)),
            dims: dims.to_vec(),
        })
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if self.dims != state.dims {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "operator over dims {:?} applied to state over {:?}",
                    self.dims, state.dims
                ),
            });
        }
        StateVector::new(self.matrix.dot(&state.amps), self.dims.clone())
    }

    /// Matrix product `self * other` (so `other` acts first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                context: format!("composing dims {:?} with {:?}", self.dims, other.dims),
            });
        }
        Ok(Self {
            matrix: self.matrix.dot(&other.matrix),
            dims: self.dims.clone(),
        })
    }

    pub fn dagger(&self) -> Self {
        Self {
            matrix: self.matrix.t().mapv(|a| a.conj()),
            dims: self.dims.clone(),
        }
    }

    /// Largest entry of |U^dag U - 1|.
    pub fn unitarity_error(&self) -> f64 {
        let product = self.dagger().matrix.dot(&self.matrix);
        let mut worst = 0.0f64;
        for i in 0..product.nrows() {
            for j in 0..product.ncols() {
                let target = if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) };
                worst = worst.max((product[[i, j]] - target).norm());
            }
        }
        worst
    }

    /// Largest entry of |A - A^dag|.
    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.matrix.nrows() {
            for j in 0..self.matrix.ncols() {
                worst = worst.max((self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// Kronecker product of operators, first factor slowest-varying.
    pub fn tensor(factors: &[&Operator]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidParameter("tensor of zero factors".into()));
        }
        let mut dims = Vec::new();
        for f in factors {
            dims.extend_from_slice(&f.dims);
        }
        let mut matrix = factors[0].matrix.clone();
        for f in &factors[1..] {
            matrix = ndarray::linalg::kron(&matrix, &f.matrix);
        }
        Ok(Self { matrix, dims })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            matrix: self.matrix.mapv(|a| a * factor),
            dims: self.dims.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                context: format!("adding dims {:?} and {:?}", self.dims, other.dims),
            });
        }
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
            dims: self.dims.clone(),
        })
    }

    /// Largest entrywise difference |A - B|.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                context: format!("comparing dims {:?} and {:?}", self.dims, other.dims),
            });
        }
        let mut worst = 0.0f64;
        for (a, b) in self.matrix.iter().zip(other.matrix.iter()) {
            worst = worst.max((a - b).norm());
        }
        Ok(worst)
    }
}

// ---------------------------------------------------------------------------
// primitive operators
// ---------------------------------------------------------------------------

/// Annihilation operator of a mode truncated at `n_max` photons; the matrix
/// element out of the top level is dropped by the truncation.
pub fn annihilation(n_max: usize) -> Operator {
    let d = n_max + 1;
    let mut m = Array2::zeros((d, d));
    for n in 1..d {
        m[[n - 1, n]] = c((n as f64).sqrt(), 0.0);
    }
    Operator::new(m, vec![d]).expect("square by construction")
}

/// Creation operator of the truncated mode.
pub fn creation(n_max: usize) -> Operator {
    annihilation(n_max).dagger()
}

/// Photon number operator of the truncated mode.
pub fn number_operator(n_max: usize) -> Operator {
    let d = n_max + 1;
    let mut m = Array2::zeros((d, d));
    for n in 0..d {
        m[[n, n]] = c(n as f64, 0.0);
    }
    Operator::new(m, vec![d]).expect("square by construction")
}

/// Atomic raising operator |e><g|.
pub fn sigma_plus() -> Operator {
    let mut m = Array2::zeros((2, 2));
    m[[1, 0]] = c(1.0, 0.0);
    Operator::new(m, vec![2]).expect("square by construction")
}

/// Atomic lowering operator |g><e|.
pub fn sigma_minus() -> Operator {
    sigma_plus().dagger()
}

/// Excited-state projector |e><e|.
pub fn sigma_ee() -> Operator {
    let mut m = Array2::zeros((2, 2));
    m[[1, 1]] = c(1.0, 0.0);
    Operator::new(m, vec![2]).expect("square by construction")
}

pub fn sigma_x() -> Operator {
    let mut m = Array2::zeros((2, 2));
    m[[0, 1]] = c(1.0, 0.0);
    m[[1, 0]] = c(1.0, 0.0);
    Operator::new(m, vec![2]).expect("square by construction")
}

pub fn sigma_y() -> Operator {
    let mut m = Array2::zeros((2, 2));
    m[[0, 1]] = c(0.0, -1.0);
    m[[1, 0]] = c(0.0, 1.0);
    Operator::new(m, vec![2]).expect("square by construction")
}

/// Phase gate diag(1, e^{i phi}) on one atom.
pub fn phase_gate(phi: f64) -> Operator {
    let mut m = Array2::zeros((2, 2));
    m[[0, 0]] = c(1.0, 0.0);
    m[[1, 1]] = C64::from_polar(1.0, phi);
    Operator::new(m, vec![2]).expect("square by construction")
}

// ---------------------------------------------------------------------------
// register plumbing
// ---------------------------------------------------------------------------

/// Lift `op` so it acts on the subsystems listed in `targets` (in the order
/// the operator's own factors expect) inside a register with `register_dims`,
/// acting as the identity elsewhere. Targets need not be adjacent.
pub fn embed(op: &Operator, targets: &[usize], register_dims: &[usize]) -> Result<Operator> {
    check_dims_nonempty(register_dims)?;
    if targets.len() != op.dims().len() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "{} targets cannot place an operator with {} factors",
                targets.len(),
                op.dims().len()
            ),
        });
    }
    let mut seen = vec![false; register_dims.len()];
    for (k, &t) in targets.iter().enumerate() {
        if t >= register_dims.len() {
            return Err(Error::DimensionMismatch {
                context: format!("target {t} outside register of {} subsystems", register_dims.len()),
            });
        }
        if seen[t] {
            return Err(Error::DimensionMismatch {
                context: format!("target {t} listed twice"),
            });
        }
        seen[t] = true;
        if register_dims[t] != op.dims()[k] {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "operator factor {k} has dim {} but register slot {t} has dim {}",
                    op.dims()[k],
                    register_dims[t]
                ),
            });
        }
    }

    let d = dims_product(register_dims);
    let mut full = Array2::zeros((d, d));
    let mut row_digits = vec![0usize; register_dims.len()];
    let mut col_digits = vec![0usize; register_dims.len()];
    for row in 0..d {
        decompose(row, register_dims, &mut row_digits);
        for col in 0..d {
            decompose(col, register_dims, &mut col_digits);
            let mut spectator_match = true;
            for k in 0..register_dims.len() {
                if !seen[k] && row_digits[k] != col_digits[k] {
                    spectator_match = false;
                    break;
                }
            }
            if !spectator_match {
                continue;
            }
            let op_row = compose(
                &targets.iter().map(|&t| row_digits[t]).collect::<Vec<_>>(),
                op.dims(),
            );
            let op_col = compose(
                &targets.iter().map(|&t| col_digits[t]).collect::<Vec<_>>(),
                op.dims(),
            );
            full[[row, col]] = op.matrix()[[op_row, op_col]];
        }
    }
    Operator::new(full, register_dims.to_vec())
}

/// Reduced density matrix over the subsystems in `keep` (row index runs over
/// the kept subsystems in register order of `keep` as given), tracing out the
/// rest.
pub fn partial_trace(state: &StateVector, keep: &[usize]) -> Result<Array2<C64>> {
    let dims = state.dims();
    if keep.is_empty() {
        return Err(Error::InvalidParameter("partial trace must keep something".into()));
    }
    let mut seen = vec![false; dims.len()];
    for &k in keep {
        if k >= dims.len() {
            return Err(Error::DimensionMismatch {
                context: format!("kept subsystem {k} outside register of {} subsystems", dims.len()),
            });
        }
        if seen[k] {
            return Err(Error::DimensionMismatch {
                context: format!("kept subsystem {k} listed twice"),
            });
        }
        seen[k] = true;
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !seen[*k]).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let trace_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let dk = dims_product(&keep_dims);
    let dt: usize = trace_dims.iter().product::<usize>().max(1);

    let mut rho = Array2::zeros((dk, dk));
    let mut keep_row = vec![0usize; keep.len()];
    let mut keep_col = vec![0usize; keep.len()];
    let mut env = vec![0usize; traced.len()];
    let mut full = vec![0usize; dims.len()];
    for r in 0..dk {
        decompose(r, &keep_dims, &mut keep_row);
        for s in 0..dk {
            decompose(s, &keep_dims, &mut keep_col);
            let mut acc = c(0.0, 0.0);
            for e in 0..dt {
                decompose(e, &trace_dims, &mut env);
                for (pos, &sub) in keep.iter().enumerate() {
                    full[sub] = keep_row[pos];
                }
                for (pos, &sub) in traced.iter().enumerate() {
                    full[sub] = env[pos];
                }
                let a = state.amps[compose(&full, dims)];
                for (pos, &sub) in keep.iter().enumerate() {
                    full[sub] = keep_col[pos];
                }
                let b = state.amps[compose(&full, dims)];
                acc += a * b.conj();
            }
            rho[[r, s]] = acc;
        }
    }
    Ok(rho)
}

/// |<a|b>|^2, insensitive to the global phase of either state.
pub fn fidelity_up_to_global_phase(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.overlap(b)?.norm_sqr())
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic Jacobi)
// ---------------------------------------------------------------------------

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching eigenvectors as
/// columns. The input is assumed Hermitian; callers that accept user data
/// check that first. Accuracy is set by the convergence threshold of
/// 1e-15 relative to the Frobenius norm, ample for the dimension-24 matrices
/// this crate works with.
pub fn hermitian_eigen(mat: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let n = mat.nrows();
    if mat.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: format!("eigendecomposition of a {}x{} matrix", n, mat.ncols()),
        });
    }
    let mut a = mat.clone();
    let mut v: Array2<C64> = Array2::eye(n);
    let scale = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt().max(1.0);
    let tol = 1e-15 * scale;

    for _sweep in 0..200 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[[p, q]].norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                let r = apq.norm();
                if r <= tol * 1e-2 {
                    continue;
                }
                let app = a[[p, p]].re;
                let aqq = a[[q, q]].re;
                let tau = (aqq - app) / (2.0 * r);
                let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cos = 1.0 / (1.0 + t * t).sqrt();
                let sin_mag = t * cos;
                let phase = apq / r;
                let s = phase * sin_mag;

                // A <- J^dag A J with J = [[c, s], [-conj(s), c]] on (p, q).
                for i in 0..n {
                    let aip = a[[i, p]];
                    let aiq = a[[i, q]];
                    a[[i, p]] = aip * cos - aiq * s.conj();
                    a[[i, q]] = aip * s + aiq * cos;
                }
                for j in 0..n {
                    let apj = a[[p, j]];
                    let aqj = a[[q, j]];
                    a[[p, j]] = apj * cos - aqj * s;
                    a[[q, j]] = apj * s.conj() + aqj * cos;
                }
                a[[p, q]] = c(0.0, 0.0);
                a[[q, p]] = c(0.0, 0.0);
                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = vip * cos - viq * s.conj();
                    v[[i, q]] = vip * s + viq * cos;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[[i, i]].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).expect("finite eigenvalues"));
    let eigenvalues = Array1::from_iter(order.iter().map(|&i| diag[i]));
    let mut vectors = Array2::zeros((n, n));
    for (new_col, &old_col) in order.iter().enumerate() {
        for i in 0..n {
            vectors[[i, new_col]] = v[[i, old_col]];
        }
    }
    Ok((eigenvalues, vectors))
}

// ---------------------------------------------------------------------------
// two-qubit density matrices
// ---------------------------------------------------------------------------

/// A validated 4 x 4 density matrix over two atoms.
///
/// Construction checks Hermiticity and unit trace to 1e-12 and positive
/// semidefiniteness down to eigenvalues of -1e-10.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoQubitDensity {
    matrix: Array2<C64>,
}

impl TwoQubitDensity {
    pub fn new(matrix: Array2<C64>) -> Result<Self> {
        if matrix.nrows() != 4 || matrix.ncols() != 4 {
            return Err(Error::InvalidDensity {
                context: format!("shape {}x{}, need 4x4", matrix.nrows(), matrix.ncols()),
            });
        }
        let mut herm = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                herm = herm.max((matrix[[i, j]] - matrix[[j, i]].conj()).norm());
            }
        }
        if herm > DENSITY_TOL {
            return Err(Error::InvalidDensity {
                context: format!("not Hermitian (deviation {herm:.3e})"),
            });
        }
        let trace: C64 = (0..4).map(|i| matrix[[i, i]]).sum();
        if (trace - c(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(Error::InvalidDensity {
                context: format!("trace {} differs from 1", trace.re),
            });
        }
        let (eigenvalues, _) = hermitian_eigen(&matrix)?;
        if eigenvalues.iter().any(|&l| l < PSD_TOL) {
            return Err(Error::InvalidDensity {
                context: format!(
                    "negative eigenvalue {:.3e}",
                    eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
                ),
            });
        }
        Ok(Self { matrix })
    }

    /// Projector onto a pure two-atom state.
    pub fn from_pure(state: &StateVector) -> Result<Self> {
        if state.dims() != [2, 2] {
            return Err(Error::DimensionMismatch {
                context: format!("two-qubit density from state over dims {:?}", state.dims()),
            });
        }
        let normed = state.normalized()?;
        let mut matrix = Array2::zeros((4, 4));
        for i in 0..4 {
            for j in 0..4 {
                matrix[[i, j]] = normed.amps[i] * normed.amps[j].conj();
            }
        }
        Self::new(matrix)
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Array1<f64> {
        hermitian_eigen(&self.matrix)
            .expect("validated 4x4 Hermitian matrix")
            .0
    }

    /// tr(rho^2).
    pub fn purity(&self) -> f64 {
        let sq = self.matrix.dot(&self.matrix);
        (0..4).map(|i| sq[[i, i]].re).sum()
    }

    /// Diagonal in the computational basis, ordered (00, 01, 10, 11).
    pub fn diagonal(&self) -> [f64; 4] {
        [
            self.matrix[[0, 0]].re,
            self.matrix[[1, 1]].re,
            self.matrix[[2, 2]].re,
            self.matrix[[3, 3]].re,
        ]
    }

    /// Eigenvector of the largest eigenvalue, as a two-atom state vector with
    /// canonical global phase.
    pub fn dominant_eigenvector(&self) -> Result<StateVector> {
        let (_, vectors) = hermitian_eigen(&self.matrix)?;
        let col = vectors.column(3);
        let state = StateVector::new(col.to_owned(), vec![2, 2])?;
        Ok(state.normalized()?.canonical_phase())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} != {b} (tol {tol})");
    }

    fn assert_c_close(a: C64, b: C64, tol: f64) {
        assert!((a - b).norm() <= tol, "{a} != {b} (tol {tol})");
    }

    #[test]
    fn tensor_of_superposition_and_vacuum() {
        let atom = StateVector::qubit(c(1.0, 0.0), c(0.0, 1.0)).unwrap();
        let mode = StateVector::vacuum(1);
        let joint = StateVector::tensor(&[&atom, &mode]).unwrap();
        assert_eq!(joint.dims(), &[2, 2]);
        assert_c_close(joint.amplitudes()[0], c(FRAC_1_SQRT_2, 0.0), 1e-15);
        assert_c_close(joint.amplitudes()[1], c(0.0, 0.0), 1e-15);
        assert_c_close(joint.amplitudes()[2], c(0.0, FRAC_1_SQRT_2), 1e-15);
        assert_c_close(joint.amplitudes()[3], c(0.0, 0.0), 1e-15);
    }

    #[test]
    fn tensor_dimension_bookkeeping() {
        let g = StateVector::ground();
        let full = StateVector::tensor(&[&g, &g, &g, &StateVector::vacuum(2)]).unwrap();
        assert_eq!(full.dims(), &[2, 2, 2, 3]);
        assert_eq!(full.len(), 24);
        assert_close(full.probability(&[0, 0, 0, 0]), 1.0, 1e-15);
    }

    #[test]
    fn tensor_is_associative() {
        let a = StateVector::qubit(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let b = StateVector::qubit(c(0.8, 0.1), c(-0.3, 0.5)).unwrap();
        let m = StateVector::fock(2, 1).unwrap();
        let left = StateVector::tensor(&[&StateVector::tensor(&[&a, &b]).unwrap(), &m]).unwrap();
        let right = StateVector::tensor(&[&a, &StateVector::tensor(&[&b, &m]).unwrap()]).unwrap();
        for (x, y) in left.amplitudes().iter().zip(right.amplitudes().iter()) {
            assert_c_close(*x, *y, 1e-14);
        }
    }

    #[test]
    fn operator_tensor_matches_manual_kron() {
        let sx = sigma_x();
        let id = Operator::identity(&[2]).unwrap();
        let lifted = Operator::tensor(&[&sx, &id]).unwrap();
        let flip = lifted
            .apply(&StateVector::tensor(&[&StateVector::ground(), &StateVector::excited()]).unwrap())
            .unwrap();
        assert_close(flip.probability(&[1, 1]), 1.0, 1e-15);
    }

    #[test]
    fn embed_identity_everywhere_is_identity() {
        let id = Operator::identity(&[2]).unwrap();
        let full = embed(&id, &[1], &[2, 2, 2, 3]).unwrap();
        assert!(full.max_abs_diff(&Operator::identity(&[2, 2, 2, 3]).unwrap()).unwrap() < 1e-15);
    }

    #[test]
    fn embed_flips_only_the_target_atom() {
        let full = embed(&sigma_x(), &[1], &[2, 2, 2, 3]).unwrap();
        let input = StateVector::basis_state(&[2, 2, 2, 3], &[0, 0, 0, 0]).unwrap();
        let output = full.apply(&input).unwrap();
        assert_close(output.probability(&[0, 1, 0, 0]), 1.0, 1e-15);
    }

    #[test]
    fn embed_nonadjacent_targets_permute_correctly() {
        // Swap-like coupling between the first atom and the mode while two
        // spectator atoms sit in between.
        let mut block = Array2::zeros((4, 4));
        // |g,0>,|g,1>,|e,0>,|e,1> ordering inside the (atom, mode) pair.
        block[[0, 0]] = c(1.0, 0.0);
        block[[1, 2]] = c(1.0, 0.0);
        block[[2, 1]] = c(1.0, 0.0);
        block[[3, 3]] = c(1.0, 0.0);
        let op = Operator::new(block, vec![2, 2]).unwrap();
        let full = embed(&op, &[0, 3], &[2, 2, 2, 2]).unwrap();
        let input = StateVector::basis_state(&[2, 2, 2, 2], &[1, 0, 1, 0]).unwrap();
        let output = full.apply(&input).unwrap();
        assert_close(output.probability(&[0, 0, 1, 1]), 1.0, 1e-15);
    }

    #[test]
    fn partial_trace_of_product_state_is_pure() {
        let atom = StateVector::qubit(c(0.6, 0.0), c(0.8, 0.0)).unwrap();
        let rest = StateVector::tensor(&[&StateVector::excited(), &StateVector::vacuum(2)]).unwrap();
        let joint = StateVector::tensor(&[&atom, &rest]).unwrap();
        let rho = partial_trace(&joint, &[0]).unwrap();
        assert_c_close(rho[[0, 0]], c(0.36, 0.0), 1e-14);
        assert_c_close(rho[[0, 1]], c(0.48, 0.0), 1e-14);
        assert_c_close(rho[[1, 1]], c(0.64, 0.0), 1e-14);
    }

    #[test]
    fn partial_trace_of_bell_like_state_is_maximally_mixed() {
        // cos(pi/4) |p>|0> + sin(pi/4) |w>|1> with <p|w> = 0.
        let p = [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)];
        let w = [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)];
        let mut amps = Array1::zeros(4);
        for s in 0..2 {
            amps[s * 2] = p[s] * FRAC_1_SQRT_2;
            amps[s * 2 + 1] = w[s] * FRAC_1_SQRT_2;
        }
        let state = StateVector::new(amps, vec![2, 2]).unwrap();
        let rho = partial_trace(&state, &[0]).unwrap();
        // 2x2 Hermitian eigenvalues in closed form.
        let a = rho[[0, 0]].re;
        let d = rho[[1, 1]].re;
        let b = rho[[0, 1]];
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d).powi(2) + b.norm_sqr()).sqrt();
        assert_close(mid - rad, 0.5, 1e-12);
        assert_close(mid + rad, 0.5, 1e-12);
    }

    #[test]
    fn partial_trace_keeps_register_order_of_keep_list() {
        let joint = StateVector::tensor(&[
            &StateVector::ground(),
            &StateVector::excited(),
            &StateVector::ground(),
            &StateVector::vacuum(1),
        ])
        .unwrap();
        let rho = partial_trace(&joint, &[1, 2]).unwrap();
        // kept order (A2, A3): |e,g> sits at index 1*2 + 0 = 2.
        assert_c_close(rho[[2, 2]], c(1.0, 0.0), 1e-14);
    }

    #[test]
    fn fidelity_between_ground_and_balanced_superposition() {
        let g = StateVector::ground();
        let plus = StateVector::qubit(c(1.0, 0.0), c(1.0, 0.0)).unwrap();
        assert_close(fidelity_up_to_global_phase(&g, &plus).unwrap(), 0.5, 1e-15);
    }

    #[test]
    fn fidelity_ignores_global_phase_and_is_symmetric() {
        let a = StateVector::qubit(c(0.6, 0.2), c(0.5, -0.3)).unwrap();
        let rotated = StateVector::new(
            a.amplitudes().mapv(|x| x * C64::from_polar(1.0, 1.234)),
            vec![2],
        )
        .unwrap();
        let f_ab = fidelity_up_to_global_phase(&a, &rotated).unwrap();
        let f_ba = fidelity_up_to_global_phase(&rotated, &a).unwrap();
        assert_close(f_ab, 1.0, 1e-13);
        assert_close(f_ab, f_ba, 1e-15);
    }

    #[test]
    fn fidelity_of_orthogonal_states_is_zero() {
        let f = fidelity_up_to_global_phase(&StateVector::ground(), &StateVector::excited()).unwrap();
        assert_close(f, 0.0, 1e-15);
    }

    #[test]
    fn ladder_operators_have_truncated_matrix_elements() {
        let a = annihilation(2);
        let n1 = StateVector::fock(2, 1).unwrap();
        let lowered = a.apply(&n1).unwrap();
        assert_c_close(lowered.amplitudes()[0], c(1.0, 0.0), 1e-15);
        let top = StateVector::fock(2, 2).unwrap();
        let raised = creation(2).apply(&top).unwrap();
        assert_close(raised.norm(), 0.0, 1e-15);
    }

    #[test]
    fn jacobi_eigen_reproduces_pauli_x_spectrum() {
        let (vals, vecs) = hermitian_eigen(sigma_x().matrix()).unwrap();
        assert_close(vals[0], -1.0, 1e-14);
        assert_close(vals[1], 1.0, 1e-14);
        // Reconstruct and compare.
        let mut recon = Array2::zeros((2, 2));
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    recon[[i, j]] += vecs[[i, k]] * vecs[[j, k]].conj() * vals[k];
                }
            }
        }
        for i in 0..2 {
            for j in 0..2 {
                assert_c_close(recon[[i, j]], sigma_x().matrix()[[i, j]], 1e-13);
            }
        }
    }

    #[test]
    fn jacobi_eigen_handles_a_random_hermitian_matrix() {
        // Fixed pseudo-random Hermitian input; reconstruction to 1e-12.
        let n = 6;
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let mut m: Array2<C64> = Array2::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let z = c(next(), if i == j { 0.0 } else { next() });
                m[[i, j]] = z;
                m[[j, i]] = z.conj();
            }
        }
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        let mut recon: Array2<C64> = Array2::zeros((n, n));
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    recon[[i, j]] += vecs[[i, k]] * vecs[[j, k]].conj() * vals[k];
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                assert_c_close(recon[[i, j]], m[[i, j]], 1e-12);
            }
        }
        for w in vals.windows(2) {
            assert!(w[0] <= w[1] + 1e-14);
        }
    }

    #[test]
    fn density_validation_rejects_bad_trace() {
        let mut m: Array2<C64> = Array2::zeros((4, 4));
        m[[0, 0]] = c(0.7, 0.0);
        m[[1, 1]] = c(0.7, 0.0);
        assert!(TwoQubitDensity::new(m).is_err());
    }

    #[test]
    fn pure_density_has_unit_purity_and_spectrum() {
        let state = StateVector::new(
            ndarray::array![c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)],
            vec![2, 2],
        )
        .unwrap();
        let rho = TwoQubitDensity::from_pure(&state).unwrap();
        assert_close(rho.purity(), 1.0, 1e-13);
        let vals = rho.eigenvalues();
        assert_close(vals[3], 1.0, 1e-12);
        assert_close(vals[0], 0.0, 1e-12);
        let back = rho.dominant_eigenvector().unwrap();
        assert_close(
            fidelity_up_to_global_phase(&state, &back).unwrap(),
            1.0,
            1e-12,
        );
    }

    #[test]
    fn canonical_phase_pins_largest_amplitude_real() {
        let state = StateVector::new(
            ndarray::array![c(0.0, 0.6), c(-0.8, 0.0)],
            vec![2],
        )
        .unwrap();
        let canon = state.canonical_phase();
        let pivot = canon.amplitudes()[1];
        assert!(pivot.re > 0.0 && pivot.im.abs() < 1e-15);
    }
}
