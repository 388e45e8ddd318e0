//! Infinite Gaussian spin bath.
//!
//! Couplings follow the density `(1/√(4πλ)) e^{−ω²/4λ}` (variance `2λ`).
//! Averaging the per-spin phase `e^{2iωt}` over this density damps the system
//! off-diagonal by `e^{−4λt²}`. The same law with an independent parameter
//! `μ` describes the transformed-variance form.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::error::{LabError, Result};
use crate::quadrature;
use crate::spin::DensityMatrix;

pub const QUADRATURE_TOLERANCE: f64 = 1e-10;
/// Integration half-width in units of `√λ`; the Gaussian tail beyond is
/// below `e^{−625}`.
pub const QUADRATURE_HALF_WIDTH: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathParams {
    lam: f64,
    mu: f64,
}

impl BathParams {
    pub fn new(lam: f64, mu: f64) -> Result<Self> {
        check_positive("lambda", lam)?;
        check_positive("mu", mu)?;
        Ok(Self { lam, mu })
    }

    pub fn lam(&self) -> f64 {
        self.lam
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `e^{−4λt²}`
    pub fn coherence(&self, t: f64) -> f64 {
        damping(self.lam, t)
    }

    /// `e^{−4μt²}`
    pub fn transformed_coherence(&self, t: f64) -> f64 {
        damping(self.mu, t)
    }

    /// Standard deviation of the coupling density.
    pub fn coupling_std(&self) -> f64 {
        (2.0 * self.lam).sqrt()
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(LabError::Domain(format!("{name} must be positive and finite, got {x}")));
    }
    Ok(())
}

#[inline]
fn damping(lam: f64, t: f64) -> f64 {
    (-4.0 * lam * t * t).exp()
}

fn gaussian_weight(lam: f64, w: f64) -> f64 {
    (-w * w / (4.0 * lam)).exp() / (4.0 * PI * lam).sqrt()
}

/// Mean coupling magnitude over the positive half-line, `√(λ/π)`.
pub fn mean_abs_coupling(lam: f64) -> Result<f64> {
    check_positive("lambda", lam)?;
    Ok((lam / PI).sqrt())
}

/// `(1/√(4πλ)) ∫₀^∞ e^{−ω²/4λ} |ω| dω` by adaptive quadrature.
pub fn mean_abs_coupling_quadrature(lam: f64) -> Result<f64> {
    check_positive("lambda", lam)?;
    let upper = QUADRATURE_HALF_WIDTH * lam.sqrt();
    let r = quadrature::integrate(|w| gaussian_weight(lam, w) * w, 0.0, upper, QUADRATURE_TOLERANCE)?;
    Ok(r.value)
}

/// Off-diagonal damping `e^{−4λt²}` of an infinite Gaussian bath.
pub fn analytic_coherence(t: f64, lam: f64) -> Result<f64> {
    check_positive("lambda", lam)?;
    Ok(damping(lam, t))
}

/// `(1/√(4πλ)) ∫ e^{2iωt} e^{−ω²/4λ} dω` by adaptive quadrature.
pub fn damping_integral_quadrature(t: f64, lam: f64) -> Result<C64> {
    check_positive("lambda", lam)?;
    let half = QUADRATURE_HALF_WIDTH * lam.sqrt();
    let re = quadrature::integrate(
        |w| gaussian_weight(lam, w) * (2.0 * w * t).cos(),
        -half,
        half,
        QUADRATURE_TOLERANCE,
    )?;
    let im = quadrature::integrate(
        |w| gaussian_weight(lam, w) * (2.0 * w * t).sin(),
        -half,
        half,
        QUADRATURE_TOLERANCE,
    )?;
    Ok(C64::new(re.value, im.value))
}

fn validated_qubit(rho0: &DensityMatrix) -> Result<()> {
    if rho0.dim() != 2 {
        return Err(LabError::Validation(format!("expected a 2x2 density matrix, got {}", rho0.dim())));
    }
    rho0.check()
}

fn damp_off_diagonal(rho0: &DensityMatrix, factor: C64) -> DensityMatrix {
    let mut m = rho0.as_matrix().clone();
    m[(0, 1)] *= factor;
    m[(1, 0)] *= factor.conj();
    DensityMatrix::from_matrix_unchecked(m)
}

/// Reduced qubit state after time `t` in the bath: the ensemble of
/// `U(ω,t) ρ₀ U(ω,t)†` weighted by the coupling density, which leaves the
/// diagonal alone and scales the off-diagonal by `e^{−4λt²}`.
pub fn operator_sum_rdm(rho0: &DensityMatrix, lam: f64, t: f64) -> Result<DensityMatrix> {
    validated_qubit(rho0)?;
    let d = analytic_coherence(t, lam)?;
    Ok(damp_off_diagonal(rho0, C64::new(d, 0.0)))
}

/// [`operator_sum_rdm`] with the weighted integral evaluated numerically.
pub fn operator_sum_rdm_quadrature(rho0: &DensityMatrix, lam: f64, t: f64) -> Result<DensityMatrix> {
    validated_qubit(rho0)?;
    let d = damping_integral_quadrature(t, lam)?;
    Ok(damp_off_diagonal(rho0, d))
}
