//! Reproducible random streams and environment sampling.
//!
//! Streams are ChaCha8 seeded through `SeedableRng::seed_from_u64`; run `k`
//! of an ensemble uses seed `seed + k` (wrapping). Uniform doubles use the
//! 53-bit conversion of `rand`'s `Standard` distribution and Gaussians use
//! the Box–Muller transform on two uniforms, caching the second variate.
//! All of these are platform independent, so a seed fixes every draw.
//!
//! Per-spin draw order: coupling first, then the state amplitudes.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closed_form::{EnvSpin, EnvironmentSpec};
use crate::coupling::CouplingMatrix;
use crate::error::{LabError, Result};
use crate::linalg::CMatrix;
use crate::spin::QubitState;

/// Redraws allowed when a complex-square draw is too close to the zero state.
pub const MAX_REDRAWS: usize = 100;
pub const MIN_PRENORM: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct LabRng {
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl LabRng {
    pub fn new(seed: u64) -> Self {
        Self { inner: ChaCha8Rng::seed_from_u64(seed), spare: None }
    }

    pub fn for_run(seed: u64, run: u64) -> Self {
        Self::new(seed.wrapping_add(run))
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal variate.
    pub fn gaussian(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// How environment states are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sampling {
    /// `α, β` uniform in the square `[−1, 1] + i[−1, 1]`, then normalized.
    #[default]
    ComplexSquare,
    /// `α` uniform in `[0, 1]`, `β = √(1 − α²)`.
    RealUnit,
    /// `α = β = 1/√2`.
    Balanced,
}

impl Sampling {
    pub fn name(self) -> &'static str {
        match self {
            Sampling::ComplexSquare => "complex_square",
            Sampling::RealUnit => "real_unit",
            Sampling::Balanced => "balanced",
        }
    }
}

/// How the Gaussian coupling width is split across `n` spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CouplingNorm {
    /// Each coupling has variance `2λ`.
    #[default]
    PerSpin,
    /// Each coupling has variance `2λ/n`, so their sum has variance `2λ`.
    Aggregate,
}

impl CouplingNorm {
    pub fn name(self) -> &'static str {
        match self {
            CouplingNorm::PerSpin => "per_spin",
            CouplingNorm::Aggregate => "aggregate",
        }
    }

    pub fn std_dev(self, lam: f64, n: usize) -> f64 {
        match self {
            CouplingNorm::PerSpin => (2.0 * lam).sqrt(),
            CouplingNorm::Aggregate => (2.0 * lam / n.max(1) as f64).sqrt(),
        }
    }
}

pub fn sample_state(rng: &mut LabRng, sampling: Sampling) -> Result<QubitState> {
    match sampling {
        Sampling::RealUnit => {
            let a = rng.uniform();
            QubitState::normalized(C64::new(a, 0.0), C64::new((1.0 - a * a).sqrt(), 0.0))
        }
        Sampling::ComplexSquare => {
            for _ in 0..MAX_REDRAWS {
                let alpha = C64::new(rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0));
                let beta = C64::new(rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0));
                if (alpha.norm_sqr() + beta.norm_sqr()).sqrt() >= MIN_PRENORM {
                    return QubitState::normalized(alpha, beta);
                }
            }
            Err(LabError::Sampling(format!("no usable state after {MAX_REDRAWS} draws")))
        }
        Sampling::Balanced => Ok(QubitState::plus()),
    }
}

/// Draws `n` z-basis environment spins with Gaussian couplings (mean 0).
pub fn sample_environment_with(
    rng: &mut LabRng,
    n: usize,
    sampling: Sampling,
    lam: f64,
    norm: CouplingNorm,
) -> Result<EnvironmentSpec> {
    if !(lam > 0.0) {
        return Err(LabError::Domain(format!("lambda must be positive, got {lam}")));
    }
    let std = norm.std_dev(lam, n);
    let mut spins = Vec::with_capacity(n);
    for _ in 0..n {
        let omega = std * rng.gaussian();
        let state = sample_state(rng, sampling)?;
        spins.push(EnvSpin { omega, state });
    }
    Ok(EnvironmentSpec::z_basis(spins))
}

/// [`sample_environment_with`] with per-spin coupling variance `2λ`.
pub fn sample_environment(
    rng: &mut LabRng,
    n: usize,
    sampling: Sampling,
    lam: f64,
) -> Result<EnvironmentSpec> {
    sample_environment_with(rng, n, sampling, lam, CouplingNorm::PerSpin)
}

/// Couplings only, environment states fixed to `state`.
pub fn sample_couplings(rng: &mut LabRng, n: usize, lam: f64, state: QubitState) -> Vec<EnvSpin> {
    let std = (2.0 * lam).sqrt();
    (0..n).map(|_| EnvSpin { omega: std * rng.gaussian(), state }).collect()
}

/// Random Hermitian `n × n` coupling matrix: off-diagonal real and imaginary
/// parts and real diagonal entries all Gaussian with variance `2λ`.
pub fn sample_coupling_matrix(rng: &mut LabRng, n: usize, lam: f64) -> CouplingMatrix {
    let std = (2.0 * lam).sqrt();
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = C64::new(std * rng.gaussian(), 0.0);
        for j in i + 1..n {
            let z = C64::new(std * rng.gaussian(), std * rng.gaussian());
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    CouplingMatrix::new(m).expect("constructed Hermitian")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_environment() {
        let mut rng = LabRng::new(1);
        let env = sample_environment(&mut rng, 0, Sampling::ComplexSquare, 0.2).unwrap();
        assert!(env.is_empty());
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let a = sample_environment(&mut LabRng::new(42), 5, Sampling::ComplexSquare, 0.2).unwrap();
        let b = sample_environment(&mut LabRng::new(42), 5, Sampling::ComplexSquare, 0.2).unwrap();
        assert_eq!(a, b);
        let c = sample_environment(&mut LabRng::new(43), 5, Sampling::ComplexSquare, 0.2).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn run_streams_offset_seed() {
        let mut a = LabRng::for_run(10, 3);
        let mut b = LabRng::new(13);
        assert_eq!(a.uniform(), b.uniform());
        let mut w = LabRng::for_run(u64::MAX, 2);
        let mut v = LabRng::new(1);
        assert_eq!(w.uniform(), v.uniform());
    }

    #[test]
    fn real_unit_states() {
        let mut rng = LabRng::new(7);
        for _ in 0..100 {
            let s = sample_state(&mut rng, Sampling::RealUnit).unwrap();
            assert!(s.alpha().im == 0.0 && s.beta().im == 0.0);
            assert!((0.0..=1.0).contains(&s.alpha().re));
            assert!(s.beta().re >= 0.0);
        }
    }

    #[test]
    fn coupling_moments() {
        // 1e5 draws: mean 0 ± 0.01, variance 2λ ± 5%
        let lam = 0.2;
        let env = sample_environment(&mut LabRng::new(2024), 100_000, Sampling::RealUnit, lam).unwrap();
        let n = env.len() as f64;
        let mean = env.spins().iter().map(|s| s.omega).sum::<f64>() / n;
        let var = env.spins().iter().map(|s| (s.omega - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var / (2.0 * lam) - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn aggregate_norm_scales_variance() {
        assert!((CouplingNorm::Aggregate.std_dev(0.2, 200) - (0.4f64 / 200.0).sqrt()).abs() < 1e-15);
        assert_eq!(CouplingNorm::Aggregate.std_dev(0.2, 0), CouplingNorm::PerSpin.std_dev(0.2, 0));
    }

    #[test]
    fn bad_lambda() {
        assert!(sample_environment(&mut LabRng::new(0), 3, Sampling::RealUnit, 0.0).is_err());
    }
}
