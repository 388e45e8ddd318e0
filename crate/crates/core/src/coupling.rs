//! Hermitian coupling matrices, a cyclic Jacobi eigensolver and the
//! many-to-one reduction.
//!
//! The reduction diagonalizes the environment block (indices `1..n`) of the
//! coupling matrix with a unitary `W` and applies `diag(1, W)` as a
//! similarity transform. The result is an arrowhead matrix: the system row
//! and column carry effective couplings to quasi-spins, and the environment
//! block is diagonal.

use num_complex::Complex64 as C64;

use crate::error::{LabError, Result};
use crate::linalg::{CMatrix, ZERO};

/// Off-diagonal Frobenius norm at which the Jacobi iteration stops,
/// scaled by `max(1, ‖A‖_F)`.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Hermiticity tolerance for inputs, scaled by `max(1, max|a_ij|)`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Hermitian matrix of pairwise couplings `ω_ij` (rad/time, ħ = 1).
/// Index 0 is the system spin.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    entries: CMatrix,
}

impl CouplingMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        check_hermitian(&entries)?;
        Ok(Self { entries })
    }

    pub fn n(&self) -> usize {
        self.entries.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn is_arrowhead(&self, tol: f64) -> bool {
        let n = self.n();
        (1..n).all(|i| (1..n).all(|j| i == j || self.entries[(i, j)].norm() <= tol))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// max |(U†U − I)_ij|
    pub fn unitarity_residual(&self) -> f64 {
        self.0
            .adjoint()
            .matmul(&self.0)
            .max_abs_diff(&CMatrix::identity(self.0.dim()))
    }
}

/// Arrowhead form of a coupling matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedCoupling {
    pub omega00: f64,
    /// ω′_0i for quasi-spins i = 1..n
    pub effective_couplings: Vec<C64>,
    /// Ω_ii for quasi-spins i = 1..n
    pub self_energies: Vec<f64>,
    /// Unitary `W` with columns giving each quasi-spin in terms of the
    /// physical environment spins.
    pub basis: UnitaryMatrix,
}

impl ReducedCoupling {
    pub fn n(&self) -> usize {
        self.effective_couplings.len() + 1
    }

    pub fn arrowhead(&self) -> CouplingMatrix {
        let n = self.n();
        let mut m = CMatrix::zeros(n);
        m[(0, 0)] = C64::new(self.omega00, 0.0);
        for (k, (w, s)) in self.effective_couplings.iter().zip(&self.self_energies).enumerate() {
            let i = k + 1;
            m[(0, i)] = *w;
            m[(i, 0)] = w.conj();
            m[(i, i)] = C64::new(*s, 0.0);
        }
        CouplingMatrix { entries: m }
    }
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    let scale = m.as_slice().iter().map(|x| x.norm()).fold(1.0, f64::max);
    let residual = m.hermiticity_residual();
    if residual > HERMITIAN_TOLERANCE * scale {
        return Err(LabError::NotHermitian { residual });
    }
    Ok(())
}

/// Cyclic Jacobi on a Hermitian matrix. Returns eigenvectors as the columns
/// of `V` and eigenvalues in the order the sweeps leave them on the diagonal.
///
/// Sweeps visit the upper triangle row by row. Each rotation is the unitary
/// `J` with `J_pp = J_qq = c`, `J_pq = s e^{iφ}`, `J_qp = -s e^{-iφ}` where
/// `a_pq = |a_pq| e^{iφ}`.
pub fn jacobi_eigen(h: &CMatrix) -> Result<(CMatrix, Vec<f64>)> {
    check_hermitian(h)?;
    let n = h.dim();
    let mut a = h.clone();
    // symmetrize so the iteration works on an exactly Hermitian matrix
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
        for j in i + 1..n {
            let v = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
    }
    let mut v = CMatrix::identity(n);
    let fro = a.as_slice().iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let target = JACOBI_TOLERANCE * fro.max(1.0);

    let mut converged = false;
    for _ in 0..=JACOBI_MAX_SWEEPS {
        if a.off_diagonal_norm() < target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if r < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                let phase = apq / r;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_e = phase * s; // s e^{iφ}
                let s_ec = s_e.conj(); // s e^{-iφ}

                // A <- A J
                for row in 0..n {
                    let x = a[(row, p)];
                    let y = a[(row, q)];
                    a[(row, p)] = x * c - s_ec * y;
                    a[(row, q)] = s_e * x + y * c;
                }
                // A <- J† A
                for col in 0..n {
                    let x = a[(p, col)];
                    let y = a[(q, col)];
                    a[(p, col)] = x * c - s_e * y;
                    a[(q, col)] = s_ec * x + y * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::new(app - t * r, 0.0);
                a[(q, q)] = C64::new(aqq + t * r, 0.0);
                // V <- V J
                for row in 0..n {
                    let x = v[(row, p)];
                    let y = v[(row, q)];
                    v[(row, p)] = x * c - s_ec * y;
                    v[(row, q)] = s_e * x + y * c;
                }
            }
        }
    }
    if !converged {
        return Err(LabError::Validation(format!(
            "jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps (off-diagonal norm {:.3e})",
            a.off_diagonal_norm()
        )));
    }
    let eig = (0..n).map(|i| a[(i, i)].re).collect();
    Ok((v, eig))
}

/// Eigendecomposition `H = U diag(λ) U†` with `λ` ascending. Ties keep the
/// order produced by the sweeps.
pub fn diagonalize_hermitian(h: &CouplingMatrix) -> Result<(UnitaryMatrix, Vec<f64>)> {
    let (v, eig) = diagonalize_matrix(h.as_matrix())?;
    Ok((UnitaryMatrix(v), eig))
}

/// Same as [`diagonalize_hermitian`] for a bare Hermitian matrix.
pub fn diagonalize_matrix(h: &CMatrix) -> Result<(CMatrix, Vec<f64>)> {
    let (v, eig) = jacobi_eigen(h)?;
    let n = eig.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig[i].total_cmp(&eig[j]));
    if order.iter().enumerate().all(|(k, &i)| k == i) {
        return Ok((v, eig));
    }
    let mut u = CMatrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            u[(row, new_col)] = v[(row, old_col)];
        }
    }
    Ok((u, order.iter().map(|&i| eig[i]).collect()))
}

/// Reduces an all-to-all coupling matrix to many-to-one (arrowhead) form.
///
/// Quasi-spins keep the order the eigensolver leaves them in, so an
/// environment block that is already diagonal comes back untouched.
pub fn many_to_one_reduce(h: &CouplingMatrix) -> Result<ReducedCoupling> {
    let n = h.n();
    if n < 2 {
        return Err(LabError::InvalidSize(format!(
            "many-to-one reduction needs at least 2 spins, got {n}"
        )));
    }
    let m = n - 1;
    let mut block = CMatrix::zeros(m);
    for i in 0..m {
        for j in 0..m {
            block[(i, j)] = h.get(i + 1, j + 1);
        }
    }
    let (w, self_energies) = jacobi_eigen(&block)?;
    let effective_couplings = (0..m)
        .map(|i| (0..m).map(|j| h.get(0, j + 1) * w[(j, i)]).sum())
        .collect();
    Ok(ReducedCoupling {
        omega00: h.get(0, 0).re,
        effective_couplings,
        self_energies,
        basis: UnitaryMatrix(w),
    })
}
