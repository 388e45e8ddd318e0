//! Exact product-form evolution of reduced density matrices.
//!
//! For a system coupled to independent environment spins through `σ_z σ_z`
//! terms, the environment spin `k` with state `α_k|0⟩ + β_k|1⟩` multiplies the
//! element `⟨b|ρ|b'⟩` by
//!
//! ```text
//! |α_k|² e^{iΔt} + |β_k|² e^{−iΔt} = cos(Δt) + (|α_k|² − |β_k|²) i sin(Δt)
//! ```
//!
//! where `Δ` is the coupling-weighted z-charge difference between `b` and
//! `b'` (`+1` for `|0⟩`, `−1` for `|1⟩`). For one system qubit `Δ = 2ω_k` on
//! `|0⟩⟨1|`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::linalg::CMatrix;
use crate::oracle::{self, Propagator};
use crate::spin::{self, BasisAngle, DensityMatrix, QubitState, TwoQubitState};

/// Which scalar a coherence series reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Observable {
    /// `|r(t)|`
    #[default]
    Magnitude,
    /// `Re r(t)`
    RealPart,
}

impl Observable {
    pub fn apply(self, z: C64) -> f64 {
        match self {
            Observable::Magnitude => z.norm(),
            Observable::RealPart => z.re,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Observable::Magnitude => "magnitude",
            Observable::RealPart => "real_part",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvSpin {
    /// combined coupling to the system spin, rad/time
    pub omega: f64,
    pub state: QubitState,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnvironmentSpec {
    spins: Vec<EnvSpin>,
    basis: BasisAngle,
}

impl EnvironmentSpec {
    pub fn new(spins: Vec<EnvSpin>, basis: BasisAngle) -> Self {
        Self { spins, basis }
    }

    pub fn z_basis(spins: Vec<EnvSpin>) -> Self {
        Self::new(spins, BasisAngle::Z)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn spins(&self) -> &[EnvSpin] {
        &self.spins
    }

    pub fn basis(&self) -> BasisAngle {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    /// The first `n` spins.
    pub fn prefix(&self, n: usize) -> Self {
        Self { spins: self.spins[..n.min(self.spins.len())].to_vec(), basis: self.basis }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceSeries {
    pub times: Vec<f64>,
    pub values: Vec<C64>,
    pub n_env: usize,
}

impl CoherenceSeries {
    pub fn observed(&self, obs: Observable) -> Vec<f64> {
        self.values.iter().map(|&z| obs.apply(z)).collect()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.observed(Observable::Magnitude)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.observed(Observable::RealPart)
    }
}

/// Per-spin factor `cos(Δt) + p·i·sin(Δt)` with `p = |α|² − |β|²`.
#[inline]
pub fn spin_factor(state: &QubitState, delta: f64, t: f64) -> C64 {
    let (s, c) = (delta * t).sin_cos();
    C64::new(c, state.z_polarization() * s)
}

fn require_z(basis: BasisAngle) -> Result<()> {
    if !basis.is_z() {
        return Err(LabError::UnsupportedBasis { theta: basis.theta() });
    }
    Ok(())
}

/// Coherence factor `r(t)` multiplying `|0⟩⟨1|` of the system.
pub fn coherence_factor(env: &EnvironmentSpec, t: f64) -> Result<C64> {
    require_z(env.basis)?;
    Ok(env
        .spins
        .iter()
        .map(|s| spin_factor(&s.state, 2.0 * s.omega, t))
        .product())
}

/// `r(t)` over a time grid, evaluated in parallel.
pub fn coherence_series(env: &EnvironmentSpec, times: &[f64]) -> Result<CoherenceSeries> {
    require_z(env.basis)?;
    let values = times
        .par_iter()
        .map(|&t| coherence_factor(env, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(CoherenceSeries { times: times.to_vec(), values, n_env: env.len() })
}

pub fn single_qubit_rdm(sys: &QubitState, env: &EnvironmentSpec, t: f64) -> Result<DensityMatrix> {
    let r = coherence_factor(env, t)?;
    let (a, b) = (sys.alpha(), sys.beta());
    let off = a * b.conj() * r;
    let m = CMatrix::from_rows(&[
        [C64::new(a.norm_sqr(), 0.0), off],
        [off.conj(), C64::new(b.norm_sqr(), 0.0)],
    ])
    .expect("2x2");
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Typical remaining coherence `2^{−N/2}` for `N` environment spins.
pub fn average_coherence_estimate(n_env: usize) -> f64 {
    (-(n_env as f64) / 2.0).exp2()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitEnvSpin {
    /// coupling to system qubit 0
    pub omega1: f64,
    /// coupling to system qubit 1
    pub omega2: f64,
    pub state: QubitState,
}

/// Environment for a two-qubit system. Collective environments couple each
/// spin identically to both system qubits.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TwoQubitEnvSpec {
    spins: Vec<TwoQubitEnvSpin>,
    basis: BasisAngle,
}

impl TwoQubitEnvSpec {
    pub fn collective(spins: Vec<EnvSpin>, basis: BasisAngle) -> Self {
        Self {
            spins: spins
                .into_iter()
                .map(|s| TwoQubitEnvSpin { omega1: s.omega, omega2: s.omega, state: s.state })
                .collect(),
            basis,
        }
    }

    pub fn per_qubit(spins: Vec<TwoQubitEnvSpin>, basis: BasisAngle) -> Self {
        Self { spins, basis }
    }

    pub fn from_environment(env: &EnvironmentSpec) -> Self {
        Self::collective(env.spins.clone(), env.basis)
    }

    pub fn spins(&self) -> &[TwoQubitEnvSpin] {
        &self.spins
    }

    pub fn basis(&self) -> BasisAngle {
        self.basis
    }

    pub fn len(&self) -> usize {
        self.spins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spins.is_empty()
    }

    pub fn is_collective(&self) -> bool {
        self.spins.iter().all(|s| s.omega1 == s.omega2)
    }

    /// Same couplings, environment states re-expressed in the action basis,
    /// basis set to z.
    fn to_action_frame(&self) -> Self {
        let b = self.basis;
        Self {
            spins: self.spins.iter().map(|s| TwoQubitEnvSpin { state: s.state.in_basis(b), ..*s }).collect(),
            basis: BasisAngle::Z,
        }
    }
}

/// `σ_z` eigenvalue of qubit `k` (0 = left) in two-qubit basis index `b`.
#[inline]
fn z_sign(b: usize, k: usize) -> f64 {
    if (b >> (1 - k)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Reduced 4×4 state of two system qubits in a z-basis environment.
pub fn two_qubit_rdm(sys: &TwoQubitState, env: &TwoQubitEnvSpec, t: f64) -> Result<DensityMatrix> {
    require_z(env.basis)?;
    let amps = sys.amps();
    let mut m = CMatrix::zeros(4);
    for b in 0..4 {
        for bp in 0..4 {
            let d0 = z_sign(b, 0) - z_sign(bp, 0);
            let d1 = z_sign(b, 1) - z_sign(bp, 1);
            let factor: C64 = env
                .spins
                .iter()
                .map(|s| spin_factor(&s.state, s.omega1 * d0 + s.omega2 * d1, t))
                .product();
            m[(b, bp)] = amps[b] * amps[bp].conj() * factor;
        }
    }
    Ok(DensityMatrix::from_matrix_unchecked(m))
}

/// Reduced state expressed in the environment's action basis: the system
/// coordinates are `(R(θ)† ⊗ R(θ)†)|ψ⟩`, and the evolution there is the
/// z-basis product form.
pub fn two_qubit_rdm_in_action_basis(
    sys: &TwoQubitState,
    env: &TwoQubitEnvSpec,
    t: f64,
) -> Result<DensityMatrix> {
    let rotated = spin::rotate_two_qubit(sys, env.basis);
    two_qubit_rdm(&rotated, &env.to_action_frame(), t)
}

/// Reduced state for an environment acting in any basis θ (common to the
/// environment and both system qubits), returned in z-basis coordinates.
pub fn two_qubit_rdm_any_basis(
    sys: &TwoQubitState,
    env: &TwoQubitEnvSpec,
    t: f64,
) -> Result<DensityMatrix> {
    if env.basis.is_z() {
        return two_qubit_rdm(sys, env, t);
    }
    let frame = two_qubit_rdm_in_action_basis(sys, env, t)?;
    Ok(frame.conjugated(&spin::two_qubit_rotation(env.basis)))
}

/// Tracks `⟨01|ρ(t)|10⟩ / ⟨01|ρ(0)|10⟩` under a collective environment.
///
/// z-basis environments use the closed form; other bases run the oracle.
pub fn dfs_coherence(
    sys: &TwoQubitState,
    env: &TwoQubitEnvSpec,
    times: &[f64],
) -> Result<CoherenceSeries> {
    if !env.is_collective() {
        return Err(LabError::Validation("dfs_coherence needs a collective environment".into()));
    }
    let amps = sys.amps();
    let initial = amps[1] * amps[2].conj();
    if initial.norm() < 1e-15 {
        return Err(LabError::UndefinedNormalization);
    }
    let values = if env.basis.is_z() {
        times
            .par_iter()
            .map(|&t| two_qubit_rdm(sys, env, t).map(|r| r.get(1, 2) / initial))
            .collect::<Result<Vec<_>>>()?
    } else {
        oracle_two_qubit_track(sys, env, times)?
            .into_iter()
            .map(|r| r.get(1, 2) / initial)
            .collect()
    };
    Ok(CoherenceSeries { times: times.to_vec(), values, n_env: env.len() })
}

/// Reduced two-qubit states from the full-state oracle at each time.
pub fn oracle_two_qubit_track(
    sys: &TwoQubitState,
    env: &TwoQubitEnvSpec,
    times: &[f64],
) -> Result<Vec<DensityMatrix>> {
    let (spec, psi) = oracle::two_qubit_model(sys, env)?;
    let prop = Propagator::from_spec(&spec)?;
    prop.trajectory(&psi, times)?
        .iter()
        .map(|p| oracle::oracle_rdm(p, &[0, 1]))
        .collect()
}

/// Overlap probability of the initial state with the evolved reduced state,
/// for an environment in any basis.
pub fn fidelity_series(
    sys: &TwoQubitState,
    env: &TwoQubitEnvSpec,
    times: &[f64],
) -> Result<Vec<f64>> {
    times
        .par_iter()
        .map(|&t| two_qubit_rdm_any_basis(sys, env, t).and_then(|r| spin::fidelity(sys, &r)))
        .collect()
}
