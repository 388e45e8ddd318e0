use proptest::prelude::*;

use decoherence_lab::bath;
use decoherence_lab::closed_form::{self, EnvSpin, EnvironmentSpec, TwoQubitEnvSpec, TwoQubitEnvSpin};
use decoherence_lab::coupling::{self, CouplingMatrix};
use decoherence_lab::experiments::rng::{self, sample_state};
use decoherence_lab::experiments::{LabRng, Sampling};
use decoherence_lab::linalg::CMatrix;
use decoherence_lab::oracle;
use decoherence_lab::spin::{self, BasisAngle, DensityMatrix, QubitState, StateVector, TwoQubitState};
use decoherence_lab::C64;

fn random_two_qubit(rng: &mut LabRng) -> TwoQubitState {
    let amps = [0; 4].map(|_| C64::new(rng.uniform_in(-1.0, 1.0), rng.uniform_in(-1.0, 1.0)));
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    TwoQubitState::new(amps.map(|a| a / norm)).unwrap()
}

fn random_mixed(rng: &mut LabRng, qubits: usize) -> DensityMatrix {
    let dim = 1usize << qubits;
    let mut m = CMatrix::zeros(dim);
    for _ in 0..3 {
        let v: Vec<C64> = (0..dim).map(|_| C64::new(rng.gaussian(), rng.gaussian())).collect();
        let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>();
        let p = DensityMatrix::from_pure(&v.iter().map(|a| a / n.sqrt()).collect::<Vec<_>>());
        m = m.add(&p.as_matrix().scale(C64::new(1.0 / 3.0, 0.0)));
    }
    DensityMatrix::new(m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pauli_squares_to_identity(theta in -10.0f64..10.0) {
        let p = spin::pauli_operator(BasisAngle(theta));
        prop_assert!(p.matmul(&p).max_abs_diff(&CMatrix::identity(2)) < 1e-14);
        prop_assert!(p.hermiticity_residual() < 1e-15);
    }

    #[test]
    fn basis_rotation_round_trip(seed in any::<u64>(), theta in -7.0f64..7.0) {
        let s = random_two_qubit(&mut LabRng::new(seed));
        let back = spin::rotate_two_qubit(&spin::rotate_two_qubit(&s, BasisAngle(theta)), BasisAngle(-theta));
        for (a, b) in back.amps().iter().zip(s.amps()) {
            prop_assert!((a - b).norm() < 1e-14);
        }
        let q = sample_state(&mut LabRng::new(seed), Sampling::ComplexSquare).unwrap();
        let r = q.in_basis(BasisAngle(theta)).in_basis(BasisAngle(-theta));
        prop_assert!((r.alpha() - q.alpha()).norm() < 1e-14 && (r.beta() - q.beta()).norm() < 1e-14);
    }

    #[test]
    fn singlet_is_rotation_invariant(theta in -7.0f64..7.0) {
        let s = TwoQubitState::singlet();
        prop_assert!(spin::rotate_two_qubit(&s, BasisAngle(theta)).equal_up_to_phase(&s, 1e-14));
    }

    #[test]
    fn fidelity_ignores_global_phase(seed in any::<u64>(), phi in 0.0f64..6.3) {
        let mut rng = LabRng::new(seed);
        let s = random_two_qubit(&mut rng);
        let rho = random_mixed(&mut rng, 2);
        let shifted = TwoQubitState::new(s.amps().map(|a| a * C64::from_polar(1.0, phi))).unwrap();
        let f = spin::fidelity(&s, &rho).unwrap();
        prop_assert!((f - spin::fidelity(&shifted, &rho).unwrap()).abs() < 1e-14);
        prop_assert!((-1e-14..=1.0 + 1e-14).contains(&f));
    }

    #[test]
    fn partial_trace_is_consistent(seed in any::<u64>()) {
        let mut rng = LabRng::new(seed);
        let rho = random_mixed(&mut rng, 3);
        let a = spin::partial_trace(&rho, &[0, 2]).unwrap();
        let b = spin::partial_trace(&rho, &[2, 0]).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!((a.as_matrix().trace() - C64::new(1.0, 0.0)).norm() < 1e-12);
        // tracing in two steps agrees with one step
        let once = spin::partial_trace(&rho, &[0]).unwrap();
        let twice = spin::partial_trace(&a, &[0]).unwrap();
        prop_assert!(once.max_abs_diff(&twice) < 1e-14);
        prop_assert!(a.check().is_ok());
    }

    #[test]
    fn pure_and_mixed_partial_traces_agree(seed in any::<u64>()) {
        let mut rng = LabRng::new(seed);
        let v: Vec<C64> = (0..8).map(|_| C64::new(rng.gaussian(), rng.gaussian())).collect();
        let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let v: Vec<C64> = v.iter().map(|a| a / n).collect();
        let full = DensityMatrix::from_pure(&v);
        for keep in [vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2]] {
            let a = spin::partial_trace(&full, &keep).unwrap();
            let b = spin::reduced_from_pure(&v, &keep).unwrap();
            prop_assert!(a.max_abs_diff(&b) < 1e-14);
        }
    }

    #[test]
    fn reduction_preserves_spectrum_and_norms(seed in any::<u64>(), n in 2usize..10) {
        let h = rng::sample_coupling_matrix(&mut LabRng::new(seed), n, 0.5);
        let red = coupling::many_to_one_reduce(&h).unwrap();
        let arrow = red.arrowhead();
        prop_assert!(arrow.is_arrowhead(1e-12));
        let (_, a) = coupling::diagonalize_hermitian(&h).unwrap();
        let (_, b) = coupling::diagonalize_hermitian(&arrow).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        let before: f64 = (1..n).map(|j| h.get(0, j).norm_sqr()).sum();
        let after: f64 = red.effective_couplings.iter().map(|w| w.norm_sqr()).sum();
        prop_assert!((before - after).abs() < 1e-10 * before.max(1.0));
        prop_assert!(red.basis.unitarity_residual() < 1e-12);
    }

    #[test]
    fn reduction_is_idempotent(seed in any::<u64>(), n in 2usize..9) {
        let h = rng::sample_coupling_matrix(&mut LabRng::new(seed), n, 0.5);
        let arrow = coupling::many_to_one_reduce(&h).unwrap().arrowhead();
        let again = coupling::many_to_one_reduce(&arrow).unwrap().arrowhead();
        prop_assert!(again.as_matrix().max_abs_diff(arrow.as_matrix()) < 1e-12);
    }

    #[test]
    fn spin_factor_is_bounded(seed in any::<u64>(), delta in -5.0f64..5.0, t in 0.0f64..50.0) {
        let s = sample_state(&mut LabRng::new(seed), Sampling::ComplexSquare).unwrap();
        prop_assert!(closed_form::spin_factor(&s, delta, t).norm() <= 1.0 + 1e-14);
    }

    #[test]
    fn single_qubit_rdm_keeps_populations(seed in any::<u64>(), n in 0usize..20, t in 0.0f64..20.0) {
        let mut rng = LabRng::new(seed);
        let env = rng::sample_environment(&mut rng, n, Sampling::ComplexSquare, 0.2).unwrap();
        let sys = sample_state(&mut rng, Sampling::ComplexSquare).unwrap();
        let rho = closed_form::single_qubit_rdm(&sys, &env, t).unwrap();
        let rho0 = sys.density_matrix();
        prop_assert!((rho.get(0, 0) - rho0.get(0, 0)).norm() < 1e-15);
        prop_assert!((rho.get(1, 1) - rho0.get(1, 1)).norm() < 1e-15);
        prop_assert!(rho.get(0, 1).norm() <= rho0.get(0, 1).norm() + 1e-15);
        prop_assert!(rho.check().is_ok());
    }

    #[test]
    fn operator_sum_is_a_valid_channel(seed in any::<u64>(), lam in 0.01f64..2.0, t1 in 0.0f64..5.0, dt in 0.0f64..5.0) {
        let sys = sample_state(&mut LabRng::new(seed), Sampling::ComplexSquare).unwrap();
        let rho0 = sys.density_matrix();
        let a = bath::operator_sum_rdm(&rho0, lam, t1).unwrap();
        let b = bath::operator_sum_rdm(&rho0, lam, t1 + dt).unwrap();
        prop_assert!(a.check().is_ok() && b.check().is_ok());
        prop_assert!(b.get(0, 1).norm() <= a.get(0, 1).norm() + 1e-15);
        prop_assert_eq!(a.get(0, 0), rho0.get(0, 0));
    }

    #[test]
    fn integer_couplings_are_pi_periodic(seed in any::<u64>(), n in 1usize..12, t in 0.0f64..10.0) {
        let mut rng = LabRng::new(seed);
        let spins: Vec<EnvSpin> = (0..n)
            .map(|_| EnvSpin {
                omega: (rng.uniform_in(-5.0, 5.0)).round(),
                state: sample_state(&mut rng, Sampling::ComplexSquare).unwrap(),
            })
            .collect();
        let env = EnvironmentSpec::z_basis(spins);
        let a = closed_form::coherence_factor(&env, t).unwrap();
        let b = closed_form::coherence_factor(&env, t + std::f64::consts::PI).unwrap();
        prop_assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn two_qubit_closed_form_matches_oracle(seed in any::<u64>(), n in 0usize..5) {
        let mut rng = LabRng::new(seed);
        let spins: Vec<TwoQubitEnvSpin> = (0..n)
            .map(|_| TwoQubitEnvSpin {
                omega1: rng.gaussian(),
                omega2: rng.gaussian(),
                state: sample_state(&mut rng, Sampling::ComplexSquare).unwrap(),
            })
            .collect();
        let env = TwoQubitEnvSpec::per_qubit(spins, BasisAngle::Z);
        let sys = random_two_qubit(&mut rng);
        let times = [0.0, 0.7, 2.3, 9.1];
        let track = closed_form::oracle_two_qubit_track(&sys, &env, &times).unwrap();
        for (t, rho) in times.iter().zip(&track) {
            let cf = closed_form::two_qubit_rdm(&sys, &env, *t).unwrap();
            prop_assert!(cf.max_abs_diff(rho) < 1e-10);
        }
    }

    #[test]
    fn rotated_closed_form_matches_oracle(seed in any::<u64>(), n in 1usize..4, theta in 0.0f64..3.2) {
        let mut rng = LabRng::new(seed);
        let env = rng::sample_environment(&mut rng, n, Sampling::ComplexSquare, 0.2).unwrap();
        let env = TwoQubitEnvSpec::collective(env.spins().to_vec(), BasisAngle(theta));
        let sys = random_two_qubit(&mut rng);
        let times = [0.0, 1.3, 4.4];
        let track = closed_form::oracle_two_qubit_track(&sys, &env, &times).unwrap();
        for (t, rho) in times.iter().zip(&track) {
            let cf = closed_form::two_qubit_rdm_any_basis(&sys, &env, *t).unwrap();
            prop_assert!(cf.max_abs_diff(rho) < 1e-10);
        }
    }

    #[test]
    fn oracle_conserves_norm_and_energy(seed in any::<u64>(), n in 1usize..6, t in 0.0f64..10.0) {
        let mut rng = LabRng::new(seed);
        let env = rng::sample_environment(&mut rng, n, Sampling::ComplexSquare, 0.2).unwrap();
        let env = EnvironmentSpec::new(env.spins().to_vec(), BasisAngle(rng.uniform_in(0.0, 3.0)));
        let sys = QubitState::plus();
        let (spec, psi) = oracle::single_qubit_model(&sys, &env).unwrap();
        let h = oracle::build_hamiltonian(&spec).unwrap();
        let out = oracle::evolve_exact(&h, &psi, t).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        prop_assert!((oracle::energy(&h, &out) - oracle::energy(&h, &psi)).abs() < 1e-10);
    }
}

#[test]
fn coupling_matrix_rejects_non_hermitian() {
    let m = CMatrix::from_rows(&[[C64::new(0.0, 0.0), C64::new(1.0, 0.0)], [C64::new(2.0, 0.0), C64::new(0.0, 0.0)]])
        .unwrap();
    assert_eq!(CouplingMatrix::new(m).unwrap_err().kind(), "not_hermitian");
}
