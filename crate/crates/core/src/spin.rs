//! Qubit states, Pauli operators in a rotated basis, density matrices,
//! partial traces, two-qubit basis changes and fidelity.
//!
//! Tensor-factor convention: factor 0 is the leftmost ket symbol and the most
//! significant bit of a basis index, so `|b0 b1 … b(M-1)⟩` has index
//! `Σ b_k 2^(M-1-k)`. Two-qubit amplitudes are ordered `|00⟩, |01⟩, |10⟩, |11⟩`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;

use crate::coupling::jacobi_eigen;
use crate::error::{LabError, Result};
use crate::linalg::{self, CMatrix, ONE, ZERO};

pub type ComplexScalar = C64;

pub const NORM_TOLERANCE: f64 = 1e-12;
pub const DENSITY_TOLERANCE: f64 = 1e-12;
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

/// Anything that exposes a pure state as a vector of amplitudes.
pub trait StateVector {
    fn amplitudes(&self) -> &[C64];

    fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self.amplitudes())
    }
}

fn check_norm(amps: &[C64]) -> Result<()> {
    let n = linalg::norm_sqr(amps);
    if (n - 1.0).abs() > NORM_TOLERANCE {
        return Err(LabError::Validation(format!("state norm² is {n}, expected 1")));
    }
    Ok(())
}

/// `α|0⟩ + β|1⟩`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    amps: [C64; 2],
}

impl QubitState {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let amps = [alpha, beta];
        check_norm(&amps)?;
        Ok(Self { amps })
    }

    /// Rescales `(alpha, beta)` to unit norm.
    pub fn normalized(alpha: C64, beta: C64) -> Result<Self> {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(LabError::Validation("cannot normalize a zero state".into()));
        }
        Ok(Self { amps: [alpha / n, beta / n] })
    }

    pub fn zero() -> Self {
        Self { amps: [ONE, ZERO] }
    }

    pub fn one() -> Self {
        Self { amps: [ZERO, ONE] }
    }

    /// `(|0⟩ + |1⟩)/√2`
    pub fn plus() -> Self {
        Self { amps: [C64::new(FRAC_1_SQRT_2, 0.0), C64::new(FRAC_1_SQRT_2, 0.0)] }
    }

    pub fn alpha(&self) -> C64 {
        self.amps[0]
    }

    pub fn beta(&self) -> C64 {
        self.amps[1]
    }

    /// `|α|² − |β|²`, the weight of the sine term in a coherence factor.
    pub fn z_polarization(&self) -> f64 {
        self.amps[0].norm_sqr() - self.amps[1].norm_sqr()
    }

    /// Coordinates of this state in the eigenbasis of `σ_θ`.
    pub fn in_basis(&self, angle: BasisAngle) -> Self {
        let [[a, b], [c, d]] = angle.rotation();
        // R† applied to the amplitudes
        let x = self.amps[0] * a + self.amps[1] * c;
        let y = self.amps[0] * b + self.amps[1] * d;
        Self { amps: [x, y] }
    }
}

impl StateVector for QubitState {
    fn amplitudes(&self) -> &[C64] {
        &self.amps
    }
}

/// `α|00⟩ + β|01⟩ + γ|10⟩ + δ|11⟩`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitState {
    amps: [C64; 4],
}

impl TwoQubitState {
    pub fn new(amps: [C64; 4]) -> Result<Self> {
        check_norm(&amps)?;
        Ok(Self { amps })
    }

    pub fn from_real(amps: [f64; 4]) -> Result<Self> {
        Self::new(amps.map(|x| C64::new(x, 0.0)))
    }

    pub fn product(a: &QubitState, b: &QubitState) -> Self {
        let v = linalg::kron_vec(a.amplitudes(), b.amplitudes());
        Self { amps: [v[0], v[1], v[2], v[3]] }
    }

    fn bell(sign_pair: bool, sign: f64) -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        let amps = if sign_pair {
            [ZERO, h, h * sign, ZERO]
        } else {
            [h, ZERO, ZERO, h * sign]
        };
        Self { amps }
    }

    /// `(|00⟩ + |11⟩)/√2`
    pub fn bell_00() -> Self {
        Self::bell(false, 1.0)
    }

    /// `(|01⟩ + |10⟩)/√2`, the triplet.
    pub fn bell_01() -> Self {
        Self::bell(true, 1.0)
    }

    /// `(|00⟩ − |11⟩)/√2`
    pub fn bell_10() -> Self {
        Self::bell(false, -1.0)
    }

    /// `(|01⟩ − |10⟩)/√2`, the singlet.
    pub fn bell_11() -> Self {
        Self::bell(true, -1.0)
    }

    pub fn singlet() -> Self {
        Self::bell_11()
    }

    pub fn triplet() -> Self {
        Self::bell_01()
    }

    /// Equal superposition of all four basis states.
    pub fn uniform() -> Self {
        Self { amps: [C64::new(0.5, 0.0); 4] }
    }

    pub fn amps(&self) -> [C64; 4] {
        self.amps
    }

    pub fn overlap(&self, other: &Self) -> C64 {
        linalg::inner(&self.amps, &other.amps)
    }

    /// True when the states differ only by a global phase.
    pub fn equal_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        (self.overlap(other).norm() - 1.0).abs() <= tol
    }
}

impl StateVector for TwoQubitState {
    fn amplitudes(&self) -> &[C64] {
        &self.amps
    }
}

/// Polar angle of the action basis in the x–z plane (φ = 0).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BasisAngle(pub f64);

impl BasisAngle {
    pub const Z: BasisAngle = BasisAngle(0.0);
    pub const X: BasisAngle = BasisAngle(std::f64::consts::FRAC_PI_2);

    pub fn theta(&self) -> f64 {
        self.0
    }

    pub fn is_z(&self) -> bool {
        self.0 == 0.0
    }

    /// Real rotation `R(θ)` whose columns are the `+1` and `−1` eigenvectors
    /// of `σ_θ`: `R|0⟩ = cos(θ/2)|0⟩ + sin(θ/2)|1⟩`.
    pub fn rotation(&self) -> [[f64; 2]; 2] {
        let (s, c) = (self.0 / 2.0).sin_cos();
        [[c, -s], [s, c]]
    }

    pub fn rotation_matrix(&self) -> CMatrix {
        let r = self.rotation();
        CMatrix::from_real_rows(&r).expect("2x2")
    }

    /// Components of `σ_θ` as `[[a, b], [b, -a]]` with `a = cos θ`, `b = sin θ`.
    pub fn pauli_components(&self) -> (f64, f64) {
        let (s, c) = self.0.sin_cos();
        (c, s)
    }
}

/// `σ_θ = sin θ σ_x + cos θ σ_z`
pub fn pauli_operator(angle: BasisAngle) -> CMatrix {
    let (a, b) = angle.pauli_components();
    CMatrix::from_real_rows(&[[a, b], [b, -a]]).expect("2x2")
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity and unit trace. Positivity is checked by
    /// [`DensityMatrix::check`].
    pub fn new(mat: CMatrix) -> Result<Self> {
        let rho = Self { mat };
        rho.check_hermitian_trace()?;
        Ok(rho)
    }

    pub(crate) fn from_matrix_unchecked(mat: CMatrix) -> Self {
        Self { mat }
    }

    pub fn from_pure(amps: &[C64]) -> Self {
        let n = amps.len();
        let mut mat = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                mat[(i, j)] = amps[i] * amps[j].conj();
            }
        }
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.mat.max_abs_diff(&other.mat)
    }

    fn check_hermitian_trace(&self) -> Result<()> {
        let residual = self.mat.hermiticity_residual();
        if residual > DENSITY_TOLERANCE {
            return Err(LabError::NotHermitian { residual });
        }
        let tr = self.mat.trace();
        if (tr - ONE).norm() > DENSITY_TOLERANCE {
            return Err(LabError::Validation(format!("trace is {tr}, expected 1")));
        }
        Ok(())
    }

    /// Full validity check: Hermitian, unit trace, eigenvalues ≥ −1e−10.
    pub fn check(&self) -> Result<()> {
        self.check_hermitian_trace()?;
        let (_, eig) = jacobi_eigen(&self.mat)?;
        let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -POSITIVITY_TOLERANCE {
            return Err(LabError::Validation(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }

    /// Transforms `ρ → U ρ U†`.
    pub fn conjugated(&self, u: &CMatrix) -> Self {
        Self { mat: u.matmul(&self.mat).matmul(&u.adjoint()) }
    }
}

fn factor_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(LabError::InvalidDimension { dim });
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Splits a factor set into (kept bit offsets, traced bit offsets) within a
/// `2^m`-dimensional index.
fn split_factors(m: usize, keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    if kept.windows(2).any(|w| w[0] == w[1]) {
        return Err(LabError::Validation("duplicate factor in keep set".into()));
    }
    if let Some(&bad) = kept.iter().find(|&&k| k >= m) {
        return Err(LabError::InvalidSize(format!("factor {bad} out of range for {m} factors")));
    }
    let traced = (0..m).filter(|k| !kept.contains(k)).collect();
    Ok((kept, traced))
}

/// For each assignment of bits to `factors` (first factor most significant),
/// the contribution to the full basis index.
fn partial_indices(m: usize, factors: &[usize]) -> Vec<usize> {
    let f = factors.len();
    (0..1usize << f)
        .map(|a| {
            factors
                .iter()
                .enumerate()
                .filter(|(pos, _)| a >> (f - 1 - pos) & 1 == 1)
                .map(|(_, &k)| 1usize << (m - 1 - k))
                .sum()
        })
        .collect()
}

/// Traces out every factor not listed in `keep`. Kept factors appear in
/// ascending order in the result.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let m = factor_count(rho.dim())?;
    let (kept, traced) = split_factors(m, keep)?;
    let ki = partial_indices(m, &kept);
    let ti = partial_indices(m, &traced);
    let dk = ki.len();
    let mut out = CMatrix::zeros(dk);
    for a in 0..dk {
        for b in 0..dk {
            out[(a, b)] = ti.iter().map(|e| rho.get(ki[a] | e, ki[b] | e)).sum();
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Reduced density matrix of a pure state, without forming `|ψ⟩⟨ψ|`.
pub fn reduced_from_pure(psi: &[C64], keep: &[usize]) -> Result<DensityMatrix> {
    let m = factor_count(psi.len())?;
    let (kept, traced) = split_factors(m, keep)?;
    let ki = partial_indices(m, &kept);
    let ti = partial_indices(m, &traced);
    let dk = ki.len();
    let mut out = CMatrix::zeros(dk);
    for a in 0..dk {
        for b in a..dk {
            let v: C64 = ti.iter().map(|e| psi[ki[a] | e] * psi[ki[b] | e].conj()).sum();
            out[(a, b)] = v;
            out[(b, a)] = v.conj();
        }
        out[(a, a)] = C64::new(out[(a, a)].re, 0.0);
    }
    Ok(DensityMatrix::from_matrix_unchecked(out))
}

/// Amplitudes of `state` in the product basis `{R(θ)|b⟩ ⊗ R(θ)|b'⟩}`, i.e.
/// `(R(θ)† ⊗ R(θ)†)|ψ⟩`. For the Bell states this reproduces the familiar
/// θ-basis table; the singlet is invariant for every θ.
pub fn rotate_two_qubit(state: &TwoQubitState, angle: BasisAngle) -> TwoQubitState {
    let r = two_qubit_rotation(angle);
    let v = r.adjoint_matvec(&state.amps);
    TwoQubitState { amps: [v[0], v[1], v[2], v[3]] }
}

/// `R(θ) ⊗ R(θ)` as a 4×4 matrix.
pub fn two_qubit_rotation(angle: BasisAngle) -> CMatrix {
    let r = angle.rotation_matrix();
    r.kron(&r)
}

/// Overlap probability `⟨ψ₀|ρ|ψ₀⟩`.
pub fn fidelity<S: StateVector + ?Sized>(psi0: &S, rho: &DensityMatrix) -> Result<f64> {
    let psi = psi0.amplitudes();
    if psi.len() != rho.dim() {
        return Err(LabError::DimensionMismatch { expected: rho.dim(), got: psi.len() });
    }
    let rho_psi = rho.as_matrix().matvec(psi);
    Ok(linalg::inner(psi, &rho_psi).re)
}
