//! Passive states and ergotropy for finite-dimensional quantum systems.
//!
//! The ergotropy of a state `ρ` with respect to a Hamiltonian `H` is the
//! largest energy that a cyclic unitary can remove from it. The optimum is
//! reached by the passive state `σ`, which places the eigenvalues of `ρ`
//! (sorted in non-increasing order) onto the eigenvectors of `H` (sorted by
//! non-decreasing energy).
//!
//! Ties among eigenvalues are broken by a stable sort. Only the ergotropy
//! value is unique; the passive-state representative inside a degenerate
//! subspace is not.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Elementwise Hermiticity band, trace band and positivity floor.
pub const STATE_TOLERANCE: f64 = 1e-12;

/// Maximum allowed disagreement between the trace-difference and
/// overlap-sum forms of the ergotropy, relative to `max(1, max|ε|)`.
pub const ROUTE_AGREEMENT: f64 = 1e-10;

/// A density operator on a `dim`-dimensional Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    matrix: DMatrix<Complex64>,
}

/// A Hermitian energy operator. Ergotropy is linear in its overall scale, so
/// the caller picks the unit.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    matrix: DMatrix<Complex64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErgotropyResult {
    /// `initial_energy - passive_energy`.
    pub ergotropy: f64,
    pub passive_state: QuantumState,
    pub initial_energy: f64,
    pub passive_energy: f64,
    /// The same quantity evaluated as the double sum over eigenpair overlaps.
    pub overlap_form: f64,
}

/// One eigenpair of a Hermitian operator.
pub type Eigenpair = (f64, DVector<Complex64>);

fn hermitize(matrix: DMatrix<Complex64>, what: &str) -> Result<DMatrix<Complex64>> {
    if !matrix.is_square() || matrix.nrows() == 0 {
        return Err(Error::Validation(format!(
            "{what} must be a non-empty square matrix, got {}x{}",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let n = matrix.nrows();
    for i in 0..n {
        for j in i..n {
            let gap = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
            if !gap.is_finite() || gap > STATE_TOLERANCE {
                return Err(Error::Validation(format!(
                    "{what} is not Hermitian: |M[{i},{j}] - conj(M[{j},{i}])| = {gap:e}"
                )));
            }
        }
    }
    Ok((&matrix + matrix.adjoint()).unscale(2.0))
}

/// Eigenpairs of a Hermitian matrix, stably sorted by eigenvalue.
fn sorted_eigenpairs(
    matrix: &DMatrix<Complex64>,
    descending: bool,
) -> Vec<Eigenpair> {
    let eig = matrix.clone().symmetric_eigen();
    let mut pairs: Vec<Eigenpair> = eig
        .eigenvalues
        .iter()
        .zip(eig.eigenvectors.column_iter())
        .map(|(&value, vector)| (value, vector.into_owned()))
        .collect();
    if descending {
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    } else {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    pairs
}

impl QuantumState {
    /// Validates and symmetrizes a density matrix.
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        let matrix = hermitize(matrix, "density matrix")?;
        let trace = matrix.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > STATE_TOLERANCE {
            return Err(Error::Validation(format!(
                "density matrix trace is {trace}, expected 1"
            )));
        }
        let min_eigenvalue = matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_eigenvalue < -STATE_TOLERANCE {
            return Err(Error::Validation(format!(
                "density matrix is not positive semidefinite (eigenvalue {min_eigenvalue:e})"
            )));
        }
        Ok(Self { matrix })
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[f64]) -> Result<Self> {
        let diag = DVector::from_iterator(
            populations.len(),
            populations.iter().map(|&p| Complex64::new(p, 0.0)),
        );
        Self::new(DMatrix::from_diagonal(&diag))
    }

    /// Pure state `|ψ⟩⟨ψ|`; `psi` is normalized first.
    pub fn pure(psi: &DVector<Complex64>) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Validation("state vector has zero norm".into()));
        }
        let psi = psi.unscale(norm);
        Self::new(&psi * psi.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Diagonal entries (populations in the computational basis).
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }
}

impl HamiltonianSpec {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        Ok(Self {
            matrix: hermitize(matrix, "Hamiltonian")?,
        })
    }

    pub fn diagonal(energies: &[f64]) -> Result<Self> {
        let diag = DVector::from_iterator(
            energies.len(),
            energies.iter().map(|&e| Complex64::new(e, 0.0)),
        );
        Self::new(DMatrix::from_diagonal(&diag))
    }

    /// `(ω0/2) σ_z` in the `(|g⟩, |e⟩)` basis, so `E(|g⟩) = -ω0/2`.
    pub fn qubit(omega0: f64) -> Self {
        Self::diagonal(&[-0.5 * omega0, 0.5 * omega0]).expect("diagonal real matrix is Hermitian")
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scale(factor),
        }
    }

    /// `Tr(H ρ)`.
    pub fn energy(&self, state: &QuantumState) -> f64 {
        (&self.matrix * state.matrix()).trace().re
    }

    /// Eigenpairs ordered by non-decreasing energy.
    pub fn levels(&self) -> Vec<Eigenpair> {
        sorted_eigenpairs(&self.matrix, false)
    }
}

/// Eigenpairs of `state` ordered by non-increasing eigenvalue.
pub fn spectral_sort(state: &QuantumState) -> Vec<Eigenpair> {
    sorted_eigenpairs(state.matrix(), true)
}

fn check_dims(state: &QuantumState, ham: &HamiltonianSpec) -> Result<()> {
    if state.dim() != ham.dim() {
        return Err(Error::Argument(format!(
            "state has dimension {} but Hamiltonian has dimension {}",
            state.dim(),
            ham.dim()
        )));
    }
    Ok(())
}

fn assemble_passive(populations: &[Eigenpair], levels: &[Eigenpair]) -> DMatrix<Complex64> {
    let dim = levels.len();
    let mut sigma = DMatrix::<Complex64>::zeros(dim, dim);
    for ((r, _), (_, level)) in populations.iter().zip(levels) {
        sigma += (level * level.adjoint()).scale(*r);
    }
    sigma
}

/// The passive state of `state` with respect to `ham`.
pub fn passive_state(state: &QuantumState, ham: &HamiltonianSpec) -> Result<QuantumState> {
    check_dims(state, ham)?;
    let populations = spectral_sort(state);
    let levels = ham.levels();
    QuantumState::new(assemble_passive(&populations, &levels))
}

/// Maximum work extractable from `state` by cyclic unitaries.
pub fn ergotropy(state: &QuantumState, ham: &HamiltonianSpec) -> Result<ErgotropyResult> {
    check_dims(state, ham)?;
    let populations = spectral_sort(state);
    let levels = ham.levels();

    let initial_energy = ham.energy(state);
    let passive_energy: f64 = populations
        .iter()
        .zip(&levels)
        .map(|((r, _), (e, _))| r * e)
        .sum();

    let mut overlap_form = 0.0;
    for (n, (r, r_vec)) in populations.iter().enumerate() {
        for (m, (e, e_vec)) in levels.iter().enumerate() {
            let overlap = r_vec.dotc(e_vec).norm_sqr();
            let kronecker = if m == n { 1.0 } else { 0.0 };
            overlap_form += r * e * (overlap - kronecker);
        }
    }

    let ergotropy = initial_energy - passive_energy;
    let scale = levels.iter().map(|(e, _)| e.abs()).fold(1.0, f64::max);
    if (ergotropy - overlap_form).abs() > ROUTE_AGREEMENT * scale {
        return Err(Error::Validation(format!(
            "ergotropy routes disagree: trace form {ergotropy:e}, overlap form {overlap_form:e}"
        )));
    }

    let passive_state = QuantumState::new(assemble_passive(&populations, &levels))?;
    Ok(ErgotropyResult {
        ergotropy,
        passive_state,
        initial_energy,
        passive_energy,
        overlap_form,
    })
}

/// Ergotropy of `diag(1 - p_e, p_e)` under `(ω0/2) σ_z`, in units of `ω0`.
///
/// Equals `(2 p_e - 1) Θ(p_e - 1/2)`; the value at the threshold is zero
/// whichever convention is used for `Θ(0)`.
pub fn ergotropy_qubit_diagonal(p_e: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_e) {
        return Err(Error::Argument(format!(
            "excited population {p_e} outside [0, 1]"
        )));
    }
    Ok((2.0 * p_e - 1.0).max(0.0))
}
