//! Brute-force reference: exact evolution of the full system + environment
//! state vector by dense Hermitian eigendecomposition.
//!
//! Spin operators are unit-normalized Pauli matrices and ħ = 1. A coupling
//! term `(i, j, ω)` contributes `ω σ_i σ_j + ω* σ_j σ_i = 2 Re(ω) σ_i σ_j`.
//! States evolve as `ψ(t) = V e^{-iΛt} V† ψ(0)` with no time stepping.
//!
//! Sign convention for environment models: an environment spin with combined
//! coupling `ω_k` enters as `−ω_k σ_0 σ_k`. Under `e^{-iHt}` this gives the
//! phases `e^{+iω_k t}` on `|0⟩_sys|0⟩_k`, so the system off-diagonal picks up
//! `|α_k|² e^{2iω_k t} + |β_k|² e^{−2iω_k t}` per spin.

use num_complex::Complex64 as C64;

use crate::closed_form::{EnvironmentSpec, TwoQubitEnvSpec};
use crate::coupling::diagonalize_matrix;
use crate::error::{LabError, Result};
use crate::linalg::{self, CMatrix, ZERO};
use crate::spin::{self, BasisAngle, DensityMatrix, QubitState, StateVector, TwoQubitState};

pub const MAX_SPINS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingTerm {
    pub i: usize,
    pub j: usize,
    pub omega: C64,
    pub basis_i: BasisAngle,
    pub basis_j: BasisAngle,
}

impl CouplingTerm {
    pub fn z(i: usize, j: usize, omega: C64) -> Self {
        Self { i, j, omega, basis_i: BasisAngle::Z, basis_j: BasisAngle::Z }
    }

    pub fn in_basis(i: usize, j: usize, omega: C64, basis: BasisAngle) -> Self {
        Self { i, j, omega, basis_i: basis, basis_j: basis }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HamiltonianSpec {
    pub n_spins: usize,
    pub terms: Vec<CouplingTerm>,
}

impl HamiltonianSpec {
    pub fn new(n_spins: usize) -> Self {
        Self { n_spins, terms: Vec::new() }
    }

    pub fn push(&mut self, term: CouplingTerm) -> &mut Self {
        self.terms.push(term);
        self
    }

    /// Drops every term that does not touch spin 0.
    pub fn without_environment_couplings(&self) -> Self {
        Self {
            n_spins: self.n_spins,
            terms: self.terms.iter().copied().filter(|t| t.i == 0 || t.j == 0).collect(),
        }
    }
}

fn check_capacity(n_spins: usize) -> Result<()> {
    if n_spins > MAX_SPINS {
        return Err(LabError::Capacity { spins: n_spins, max: MAX_SPINS });
    }
    if n_spins == 0 {
        return Err(LabError::InvalidSize("hamiltonian needs at least one spin".into()));
    }
    Ok(())
}

/// Assembles the dense `2^M × 2^M` Hamiltonian.
pub fn build_hamiltonian(spec: &HamiltonianSpec) -> Result<CMatrix> {
    check_capacity(spec.n_spins)?;
    let m = spec.n_spins;
    let dim = 1usize << m;
    let mut h = CMatrix::zeros(dim);
    for term in &spec.terms {
        if term.i == term.j {
            return Err(LabError::Validation(format!("self-interaction term on spin {}", term.i)));
        }
        if term.i >= m || term.j >= m {
            return Err(LabError::InvalidSize(format!(
                "term ({}, {}) out of range for {m} spins",
                term.i, term.j
            )));
        }
        let strength = 2.0 * term.omega.re;
        if strength == 0.0 {
            continue;
        }
        let (ai, bi) = term.basis_i.pauli_components();
        let (aj, bj) = term.basis_j.pauli_components();
        // σ = [[a, b], [b, -a]]; element σ[out][in]
        let si = [[ai, bi], [bi, -ai]];
        let sj = [[aj, bj], [bj, -aj]];
        let mask_i = 1usize << (m - 1 - term.i);
        let mask_j = 1usize << (m - 1 - term.j);
        for col in 0..dim {
            let in_i = usize::from(col & mask_i != 0);
            let in_j = usize::from(col & mask_j != 0);
            for out_i in 0..2 {
                let ci = si[out_i][in_i];
                if ci == 0.0 {
                    continue;
                }
                for out_j in 0..2 {
                    let cj = sj[out_j][in_j];
                    if cj == 0.0 {
                        continue;
                    }
                    let mut row = col & !mask_i & !mask_j;
                    if out_i == 1 {
                        row |= mask_i;
                    }
                    if out_j == 1 {
                        row |= mask_j;
                    }
                    h[(row, col)] += C64::new(strength * ci * cj, 0.0);
                }
            }
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullStateVector {
    amps: Vec<C64>,
}

impl FullStateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(LabError::InvalidDimension { dim: amps.len() });
        }
        let n = linalg::norm_sqr(&amps);
        if (n - 1.0).abs() > spin::NORM_TOLERANCE {
            return Err(LabError::Validation(format!("state norm² is {n}, expected 1")));
        }
        Ok(Self { amps })
    }

    /// Tensor product of single-spin states, first factor leftmost.
    pub fn product<'a, I>(factors: I) -> Self
    where
        I: IntoIterator<Item = &'a [C64]>,
    {
        let amps = factors
            .into_iter()
            .fold(vec![C64::new(1.0, 0.0)], |acc, f| linalg::kron_vec(&acc, f));
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn n_spins(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn norm(&self) -> f64 {
        linalg::norm_sqr(&self.amps).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl StateVector for FullStateVector {
    fn amplitudes(&self) -> &[C64] {
        &self.amps
    }
}

/// Eigendecomposition of a Hamiltonian, reusable across times and states.
#[derive(Debug, Clone)]
pub struct Propagator {
    eigvecs: CMatrix,
    eigvals: Vec<f64>,
}

impl Propagator {
    pub fn new(h: &CMatrix) -> Result<Self> {
        let (eigvecs, eigvals) = diagonalize_matrix(h)?;
        Ok(Self { eigvecs, eigvals })
    }

    pub fn from_spec(spec: &HamiltonianSpec) -> Result<Self> {
        Self::new(&build_hamiltonian(spec)?)
    }

    pub fn dim(&self) -> usize {
        self.eigvals.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigvals
    }

    fn check_dim(&self, psi: &FullStateVector) -> Result<()> {
        if psi.dim() != self.dim() {
            return Err(LabError::DimensionMismatch { expected: self.dim(), got: psi.dim() });
        }
        Ok(())
    }

    pub fn evolve(&self, psi0: &FullStateVector, t: f64) -> Result<FullStateVector> {
        self.check_dim(psi0)?;
        let coeffs = self.eigvecs.adjoint_matvec(&psi0.amps);
        Ok(self.apply_phases(&coeffs, t))
    }

    /// Evolves one initial state to many times, projecting onto the
    /// eigenbasis once.
    pub fn trajectory(&self, psi0: &FullStateVector, times: &[f64]) -> Result<Vec<FullStateVector>> {
        use rayon::prelude::*;
        self.check_dim(psi0)?;
        let coeffs = self.eigvecs.adjoint_matvec(&psi0.amps);
        Ok(times.par_iter().map(|&t| self.apply_phases(&coeffs, t)).collect())
    }

    fn apply_phases(&self, coeffs: &[C64], t: f64) -> FullStateVector {
        let phased: Vec<C64> = coeffs
            .iter()
            .zip(&self.eigvals)
            .map(|(c, &e)| if *c == ZERO { ZERO } else { c * C64::from_polar(1.0, -e * t) })
            .collect();
        FullStateVector { amps: self.eigvecs.matvec(&phased) }
    }
}

/// `ψ(t) = e^{-iHt} ψ(0)`. Builds the eigendecomposition on every call; use
/// [`Propagator`] to evolve to several times.
pub fn evolve_exact(h: &CMatrix, psi0: &FullStateVector, t: f64) -> Result<FullStateVector> {
    Propagator::new(h)?.evolve(psi0, t)
}

/// Reduced density matrix of the listed spins.
pub fn oracle_rdm(psi: &FullStateVector, keep: &[usize]) -> Result<DensityMatrix> {
    spin::reduced_from_pure(&psi.amps, keep)
}

/// `⟨ψ|H|ψ⟩`
pub fn energy(h: &CMatrix, psi: &FullStateVector) -> f64 {
    linalg::inner(&psi.amps, &h.matvec(&psi.amps)).re
}

/// Many-to-one model for one system spin (index 0) and the environment
/// spins `1..=N`, all acting in the environment's basis.
pub fn single_qubit_model(
    sys: &QubitState,
    env: &EnvironmentSpec,
) -> Result<(HamiltonianSpec, FullStateVector)> {
    let n = env.len() + 1;
    check_capacity(n)?;
    let mut spec = HamiltonianSpec::new(n);
    for (k, s) in env.spins().iter().enumerate() {
        spec.push(CouplingTerm::in_basis(0, k + 1, C64::new(-0.5 * s.omega, 0.0), env.basis()));
    }
    let psi = FullStateVector::product(
        std::iter::once(sys.amplitudes()).chain(env.spins().iter().map(|s| s.state.amplitudes())),
    );
    Ok((spec, psi))
}

/// Two system spins (indices 0, 1) and environment spins `2..`.
pub fn two_qubit_model(
    sys: &TwoQubitState,
    env: &TwoQubitEnvSpec,
) -> Result<(HamiltonianSpec, FullStateVector)> {
    let n = env.len() + 2;
    check_capacity(n)?;
    let mut spec = HamiltonianSpec::new(n);
    for (k, s) in env.spins().iter().enumerate() {
        spec.push(CouplingTerm::in_basis(0, k + 2, C64::new(-0.5 * s.omega1, 0.0), env.basis()));
        spec.push(CouplingTerm::in_basis(1, k + 2, C64::new(-0.5 * s.omega2, 0.0), env.basis()));
    }
    let psi = FullStateVector::product(
        std::iter::once(sys.amplitudes()).chain(env.spins().iter().map(|s| s.state.amplitudes())),
    );
    Ok((spec, psi))
}
