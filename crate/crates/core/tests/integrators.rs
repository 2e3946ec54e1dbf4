use modham::integrators::{run_trajectory, step, symplectic_euler_step};
use modham::phase::symplectic_omega;
use modham::{Hamiltonian32, Matrix, PhasePoint, PhasePoint32, Scheme, SeparableHamiltonian, SmoothScalarFamily, StepperConfig};
use proptest::prelude::*;

fn jacobian(h: &SeparableHamiltonian<f64>, z: &PhasePoint<f64>, eta: f64) -> Matrix<f64> {
    let base = z.to_vec();
    let n = base.len();
    let eps = 1e-6;
    let mut cols = Vec::new();
    for j in 0..n {
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[j] += eps;
        minus[j] -= eps;
        let fp = symplectic_euler_step(h, &PhasePoint::from_vec(&plus).unwrap(), eta).unwrap().to_vec();
        let fm = symplectic_euler_step(h, &PhasePoint::from_vec(&minus).unwrap(), eta).unwrap().to_vec();
        cols.push(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * eps)).collect::<Vec<_>>());
    }
    Matrix::from_fn(n, n, |i, j| cols[j][i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn symplectic_step_preserves_the_form(p in prop::collection::vec(-1.5f64..1.5, 2), q in prop::collection::vec(-1.5f64..1.5, 2), eta in 0.01f64..0.5) {
        let h = SeparableHamiltonian::new(SmoothScalarFamily::log_cosh(), SmoothScalarFamily::log_cosh(), 2).unwrap();
        let z = PhasePoint::new(p, q).unwrap();
        let j = jacobian(&h, &z, eta);
        let omega = symplectic_omega::<f64>(2);
        let lhs = &(&j.transpose() * &omega) * &j;
        prop_assert!((&lhs - &omega).max_abs() < 1e-7);
    }

    #[test]
    fn step_dispatch_matches_direct_call(p in -2.0f64..2.0, q in -2.0f64..2.0, eta in 0.01f64..0.4) {
        let h = SeparableHamiltonian::quadratic_1d(1.5, 0.5);
        let z = PhasePoint::scalar(p, q).unwrap();
        let cfg = StepperConfig::new(eta, Scheme::Symplectic).unwrap();
        let (w, iters) = step(&h, &z, &cfg).unwrap();
        prop_assert_eq!(iters, 0);
        prop_assert_eq!(w, symplectic_euler_step(&h, &z, eta).unwrap());
    }
}

#[test]
fn single_precision_trajectory() {
    let h: Hamiltonian32 = SeparableHamiltonian::new(SmoothScalarFamily::log_cosh(), SmoothScalarFamily::log_cosh(), 1).unwrap();
    let z0: PhasePoint32 = PhasePoint::scalar(1.0, 1.0).unwrap();
    let cfg = StepperConfig::new(0.05f32, Scheme::Symplectic).unwrap();
    let rec = run_trajectory(&h, &z0, &cfg, 1000).unwrap();
    let e0 = rec.energies[0];
    let worst = rec.energies.iter().map(|e| (e - e0).abs()).fold(0.0f32, f32::max);
    assert!(worst < 0.05, "energy excursion {worst}");
}

#[test]
fn explicit_and_implicit_euler_drift_in_opposite_directions() {
    let h = SeparableHamiltonian::quadratic_1d(1.0, 1.0);
    let z0 = PhasePoint::scalar(1.0, 0.0).unwrap();
    let fwd = run_trajectory(&h, &z0, &StepperConfig::new(0.1, Scheme::Forward).unwrap(), 50).unwrap();
    let bwd = run_trajectory(&h, &z0, &StepperConfig::new(0.1, Scheme::Backward).unwrap(), 50).unwrap();
    assert!(fwd.energies[50] > 1.0);
    assert!(bwd.energies[50] < 1.0);
}

#[test]
fn deterministic_reruns() {
    let h = SeparableHamiltonian::new(SmoothScalarFamily::log_cosh(), SmoothScalarFamily::normalized_power(4.0), 1).unwrap();
    let z0 = PhasePoint::scalar(0.5, 0.5).unwrap();
    let cfg = StepperConfig::new(0.1, Scheme::Symplectic).unwrap();
    let a = run_trajectory(&h, &z0, &cfg, 200).unwrap();
    let b = run_trajectory(&h, &z0, &cfg, 200).unwrap();
    assert_eq!(a.points, b.points);
}
