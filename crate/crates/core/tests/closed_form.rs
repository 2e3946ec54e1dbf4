use modham::integrators::exact_quadratic_step;
use modham::mh_closed::{
    conserved_l, conserved_s_1d, integral_form_quadratic_1d, mh_log, mh_quadratic_1d, quadratic_drift, t_function,
    AdjointRep1D, QuadraticMH,
};
use modham::{Error, Matrix, PhasePoint};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spd(rng: &mut ChaCha8Rng, d: usize) -> Matrix<f64> {
    let x = Matrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    (&(&x * &x.transpose()).scale(1.0 / d as f64) + &Matrix::identity(d).scale(0.2)).symmetrized()
}

#[test]
fn radius_contract() {
    assert!(matches!(mh_quadratic_1d(1.0, 1.0, 1.0, 0.0, 1.0), Err(Error::ConvergenceRadiusExceeded(_))));
    assert!(matches!(mh_quadratic_1d(2.0, 2.0, 1.0, 0.0, 0.6), Err(Error::ConvergenceRadiusExceeded(_))));
    let b = Matrix::<f64>::diag(&[1.0, 4.0]);
    assert!(matches!(QuadraticMH::new(&b, &b, 0.3), Err(Error::ConvergenceRadiusExceeded(_))));
}

#[test]
fn integral_form_rejects_large_operator_norm() {
    // abη² < 1 but ‖M(t) − I‖ reaches 1 before t = η
    let r = integral_form_quadratic_1d(1.0, 1.0, 0.9, 1e-10);
    assert!(matches!(r, Err(Error::OperatorNormTooLarge(_))), "{r:?}");
}

#[test]
fn integral_form_small_step_limit() {
    let c = integral_form_quadratic_1d(2.0f64, 3.0, 1e-6, 1e-12).unwrap();
    assert!((c[0] - 2.0).abs() < 1e-9 && (c[1] - 3.0).abs() < 1e-9 && c[2].abs() < 1e-4);
    let rep = AdjointRep1D::new(2.0, 3.0);
    assert_eq!(rep.m(0.0), Matrix::identity(3));
    assert_eq!(rep.v(0.0), vec![2.0, 3.0, 0.0]);
}

#[test]
fn multivariate_drift_and_reduction() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let eta = 0.1;
    let b0 = spd(&mut rng, 3);
    let c = spd(&mut rng, 3);
    let b = b0.scale(0.5 / ((&b0 * &c).op_norm() * eta * eta));
    let z0 = PhasePoint::new(vec![0.3, -0.2, 0.5], vec![0.1, 0.4, -0.6]).unwrap();
    assert!(quadratic_drift(&b, &c, &z0, eta, 1000).unwrap() < 1e-8);

    let z = PhasePoint::new(vec![0.3, -0.2, 0.5], vec![0.1, 0.4, -0.6]).unwrap();
    let tiny = QuadraticMH::new(&b, &c, 1e-9).unwrap().eval(&z).unwrap();
    let energy = b.bilinear(z.p(), z.p()) + c.bilinear(z.q(), z.q());
    assert!((tiny - energy).abs() < 1e-7 * energy.abs());
}

#[test]
fn eigenpair_order_does_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let b = spd(&mut rng, 3);
    let c = spd(&mut rng, 3);
    let eta = 0.2 / (&b * &c).op_norm().sqrt();
    let mh = QuadraticMH::new(&b, &c, eta).unwrap();
    let z = PhasePoint::new(vec![1.0, 0.5, -0.3], vec![-0.2, 0.7, 0.9]).unwrap();
    let base = mh.eval(&z).unwrap();
    let q = mh.eigenvectors();
    let lambda = mh.eigenvalues();
    for perm in [[2, 0, 1], [1, 2, 0], [0, 2, 1]] {
        let qp = Matrix::from_fn(3, 3, |i, j| q[(i, perm[j])] * (1.0 + j as f64));
        let lp: Vec<f64> = perm.iter().map(|&k| lambda[k]).collect();
        let v = mh.eval_with_basis(&z, &qp, &lp).unwrap();
        assert!((v - base).abs() < 1e-12 * base.abs().max(1.0));
    }
}

#[test]
fn log_case_closed_form_is_constant() {
    let (alpha, beta, eta) = (1.0f64, 2.0, 0.1);
    let (mut p, mut q) = (1.0f64, 1.0f64);
    let m0 = mh_log(alpha, beta, p, q, eta).unwrap();
    let l0 = conserved_l(alpha, beta, p, q).unwrap();
    for _ in 0..200 {
        p -= eta / (beta + q);
        q += eta / (alpha + p);
        assert!((conserved_l(alpha, beta, p, q).unwrap() - l0).abs() < 1e-12);
        assert!((mh_log(alpha, beta, p, q, eta).unwrap() - m0).abs() < 1e-10);
    }
    assert!(matches!(mh_log(alpha, beta, p, q, 0.0), Err(Error::InvalidArgument(_))));
}

proptest! {
    #[test]
    fn ratio_is_t(a in 0.1f64..3.0, b in -3.0f64..3.0, p in -2.0f64..2.0, q in -2.0f64..2.0, s in 0.01f64..0.9) {
        prop_assume!(b.abs() > 0.05);
        let eta = (s / (a * b).abs()).sqrt();
        let s_val = conserved_s_1d(a, b, p, q, eta);
        prop_assume!(s_val.abs() > 1e-6);
        let ratio = mh_quadratic_1d(a, b, p, q, eta).unwrap() / s_val;
        prop_assert!((ratio - t_function(eta, a * b).unwrap()).abs() < 1e-12 * ratio.abs());
    }

    #[test]
    fn s_is_invariant(a in 0.1f64..3.0, b in 0.1f64..3.0, p in -2.0f64..2.0, q in -2.0f64..2.0, eta in 0.0f64..0.5) {
        let bm = Matrix::scalar(a);
        let cm = Matrix::scalar(b);
        let z = PhasePoint::scalar(p, q).unwrap();
        let w = exact_quadratic_step(&bm, &cm, &z, eta).unwrap();
        let before = conserved_s_1d(a, b, p, q, eta);
        let after = conserved_s_1d(a, b, w.p()[0], w.q()[0], eta);
        prop_assert!((before - after).abs() < 1e-12 * (1.0 + before.abs()));
    }
}
