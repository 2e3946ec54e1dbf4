//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! `MODHAM_CANCEL_MAX=8` extends the symbolic cancellation check past the
//! required N = 5 (best effort, reported but not gating).

use std::process::ExitCode;
use std::time::{Duration, Instant};

use modham::combinatorics::{
    backseat_bound, backseat_log_bound, backseat_log_sum, backseat_sum, factorial, fubini, lemma1_lhs, lemma1_rhs,
    quartic_alternating_formula, quartic_alternating_ipb,
};
use modham::diagnostics::{loglog_fit, mh_traces, trace_stats};
use modham::games::{
    pushforward_check, regret_identity_residual, run_amd, verify_gap_regret_identity, GameInstance, StrategyPair,
};
use modham::integrators::{exact_quadratic_step, quadratic_step_matrix_1d, symplectic_euler_step};
use modham::mh_closed::{
    flow_solution_operator_1d, integral_form_quadratic_1d, interpolating_flow_check_1d, log_case_product,
    mh_quadratic_1d, t_function, QuadraticMH,
};
use modham::mh_symbolic::{
    bch_correction, cancellation_check, dynkin_correction, phi_bound, poisson, truncated_mh_eval, ExactPoly, Monomial,
    Symbol,
};
use modham::{Coeff, Matrix, PhasePoint, SeparableHamiltonian, SmoothScalarFamily};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn random_spd(rng: &mut ChaCha8Rng, d: usize) -> Matrix<f64> {
    let x = Matrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
    let xxt = &x * &x.transpose();
    (&xxt.scale(1.0 / d as f64) + &Matrix::identity(d).scale(0.2)).symmetrized()
}

fn relative_drift(values: &[f64]) -> f64 {
    let h0 = values[0];
    values.iter().map(|v| (v - h0).abs() / h0.abs()).fold(0.0, f64::max)
}

fn c1_quadratic_conservation() -> Outcome {
    let start = Instant::now();
    let h = SeparableHamiltonian::quadratic_1d(1.0, 1.0);
    let mut z = PhasePoint::scalar(1.0, 0.0).unwrap();
    let mut values = vec![mh_quadratic_1d(1.0, 1.0, 1.0, 0.0, 0.5).unwrap()];
    for _ in 0..10_000 {
        z = symplectic_euler_step(&h, &z, 0.5).map_err(|e| e.to_string())?;
        values.push(mh_quadratic_1d(1.0, 1.0, z.p()[0], z.q()[0], 0.5).unwrap());
    }
    let drift_1d = relative_drift(&values);
    let t_1d = start.elapsed();

    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let d = 3;
    let eta = 0.1;
    let b0 = random_spd(&mut rng, d);
    let c = random_spd(&mut rng, d);
    let sigma = (&b0 * &c).op_norm();
    let b = b0.scale(0.5 / (sigma * eta * eta));
    let h = SeparableHamiltonian::quadratic(b.clone(), c.clone()).unwrap();
    let mh = QuadraticMH::new(&b, &c, eta).map_err(|e| e.to_string())?;
    let p: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let q: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut z = PhasePoint::new(p, q).unwrap();
    let mut values = vec![mh.eval(&z).unwrap()];
    for _ in 0..1000 {
        z = symplectic_euler_step(&h, &z, eta).map_err(|e| e.to_string())?;
        values.push(mh.eval(&z).unwrap());
    }
    let drift_3d = relative_drift(&values);
    let t_3d = start.elapsed();
    let limit = Duration::from_secs(1);
    check(
        drift_1d <= 1e-9 && drift_3d <= 1e-8 && within(t_1d, limit) && within(t_3d, limit),
        format!("1D drift {drift_1d:.2e} ({t_1d:?}), 3D drift {drift_3d:.2e} ({t_3d:?})"),
    )
}

fn c2_integral_form() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for &(a, b, eta) in &[(1.0, 1.0, 0.05), (1.0, -1.0, 0.05), (2.0, 3.0, 0.02)] {
        let c = integral_form_quadratic_1d(a, b, eta, 1e-12).map_err(|e| e.to_string())?;
        let t = t_function(eta, a * b).unwrap();
        let expect = [t * a, t * b, -2.0 * a * b * eta * t];
        for i in 0..3 {
            worst = worst.max((c[i] - expect[i]).abs());
        }
    }
    let elapsed = start.elapsed();
    check(worst <= 1e-8 && within(elapsed, Duration::from_secs(1)), format!("max coefficient error {worst:.2e} ({elapsed:?})"))
}

fn c3_interpolating_flow() -> Outcome {
    let dev = interpolating_flow_check_1d(1.0, 1.0, (1.0, 0.0), 0.1).map_err(|e| e.to_string())?;
    let mut worst_op = 0.0f64;
    for &(a, b, eta) in &[(1.0, 1.0, 0.1), (2.0, 3.0, 0.1), (1.0, -1.0, 0.2), (0.5, 4.0, 0.3)] {
        let m = flow_solution_operator_1d(a, b, eta).map_err(|e| e.to_string())?;
        worst_op = worst_op.max((&m - &quadratic_step_matrix_1d(a, b, eta)).max_abs());
    }
    check(dev <= 1e-9 && worst_op <= 1e-9, format!("flow vs step {dev:.2e}, solution operator {worst_op:.2e}"))
}

fn c4_cancellation() -> Outcome {
    let start = Instant::now();
    let report = cancellation_check(5);
    let elapsed = start.elapsed();
    let mut detail = format!("N ≤ 5 exact zeros: {} ({elapsed:.2?})", report.passed());
    if let Some(n) = std::env::var("MODHAM_CANCEL_MAX").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 5 {
            let start = Instant::now();
            let extended = cancellation_check(n);
            detail.push_str(&format!("; best effort N ≤ {n}: {} ({:.2?})", extended.passed(), start.elapsed()));
        }
    }
    check(report.passed() && within(elapsed, Duration::from_secs(300)), detail)
}

fn c5_phi_table() -> Outcome {
    let expected = [(1, 1), (3, 1), (49, 12), (197, 36), (139, 20), (1049, 108)];
    let mut got = Vec::new();
    let mut ok = true;
    for (n, &(num, den)) in expected.iter().enumerate() {
        let v = phi_bound(n);
        ok &= v == <BigRational as Coeff>::from_ratio(num, den);
        got.push(v.to_string());
    }
    check(ok, format!("Φ(0..5) = {}", got.join(", ")))
}

fn logcosh_hamiltonian() -> SeparableHamiltonian<f64> {
    SeparableHamiltonian::new(SmoothScalarFamily::log_cosh(), SmoothScalarFamily::log_cosh(), 1).unwrap()
}

fn c6_conservation_order() -> Outcome {
    let start = Instant::now();
    let h = logcosh_hamiltonian();
    let z0 = PhasePoint::scalar(1.0, 1.0).unwrap();
    let etas = [0.2, 0.1, 0.05, 0.025];
    let mut max_err = vec![Vec::new(); 4];
    let mut step_err = vec![Vec::new(); 4];
    for &eta in &etas {
        let traces = mh_traces(&h, &z0, eta, 1000, 3).map_err(|e| e.to_string())?;
        for n in 0..4 {
            let s = trace_stats(&traces.values[n]);
            max_err[n].push(s.max_deviation);
            step_err[n].push(s.max_step_change);
        }
    }
    let elapsed = start.elapsed();
    let mut ok = within(elapsed, Duration::from_secs(10));
    let mut parts = Vec::new();
    for n in 0..4 {
        let fit = loglog_fit(&etas, &max_err[n]).map_err(|e| e.to_string())?;
        let per_step = loglog_fit(&etas, &step_err[n]).map_err(|e| e.to_string())?;
        let target = n as f64 + 2.0;
        ok &= (target - 0.3..=target + 0.3).contains(&fit.slope);
        parts.push(format!("N={n}: slope {:.2} (per-step {:.2})", fit.slope, per_step.slope));
    }
    check(ok, format!("{} ({elapsed:.2?})", parts.join(", ")))
}

fn c7_logcosh_traces() -> Outcome {
    let h = logcosh_hamiltonian();
    let z0 = PhasePoint::scalar(1.0, 1.0).unwrap();
    let level = truncated_mh_eval(&h, &z0, 0.05, 1).map_err(|e| e.to_string())?;
    let traces = mh_traces(&h, &z0, 0.05, 1000, 3).map_err(|e| e.to_string())?;
    let ptp: Vec<f64> = traces.values.iter().map(|t| trace_stats(t).peak_to_peak).collect();
    let decreasing = ptp.windows(2).all(|w| w[1] < w[0]);
    let ptp_str: Vec<String> = ptp.iter().map(|v| format!("{v:.2e}")).collect();
    check(
        (level - 0.85316).abs() <= 1e-4 && decreasing,
        format!("H̃^(1)(1,1) = {level:.6}, peak-to-peak N=0..3: {}", ptp_str.join(", ")),
    )
}

fn random_simplex(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..d).map(|_| rng.random_range(0.05..1.0)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

fn c8_regret_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut worst61, mut worst31) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let d = rng.random_range(2..=5);
        let a = Matrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        let game = GameInstance::entropic(a).map_err(|e| e.to_string())?;
        let s0 = StrategyPair::new(random_simplex(&mut rng, d), random_simplex(&mut rng, d));
        let traj = run_amd(&game, &s0, 0.1, 200).map_err(|e| e.to_string())?;
        let cmp = StrategyPair::new(random_simplex(&mut rng, d), random_simplex(&mut rng, d));
        for k in 0..=200 {
            worst61 = worst61.max(regret_identity_residual(&game, &traj, k, &cmp).map_err(|e| e.to_string())?);
        }
        worst31 = worst31.max(verify_gap_regret_identity(&game, &traj, 200).map_err(|e| e.to_string())?);
    }
    check(
        worst61 <= 1e-9 && worst31 <= 1e-9,
        format!("regret energy identity {worst61:.2e} (relative, all prefixes), gap identity {worst31:.2e}"),
    )
}

fn c9_pushforward() -> Outcome {
    let mut worst = 0.0f64;
    for a in [
        Matrix::<f64>::identity(2),
        Matrix::diag(&[2.0, 3.0]),
        Matrix::from_f64_rows(&[&[1.0, 1.0], &[0.0, 2.0]]),
    ] {
        let game = GameInstance::euclidean(a).map_err(|e| e.to_string())?;
        let z0 = PhasePoint::new(vec![0.4, -0.3], vec![0.1, 0.7]).unwrap();
        worst = worst.max(pushforward_check(&game, &z0, 0.1, 100).map_err(|e| e.to_string())?);
    }
    check(worst <= 1e-10, format!("max deviation {worst:.2e}"))
}

fn c10_log_case() -> Outcome {
    let mut worst = 0.0f64;
    for &(alpha, beta) in &[(0.0, 0.0), (1.0, 2.0)] {
        let h = SeparableHamiltonian::new(SmoothScalarFamily::log(alpha), SmoothScalarFamily::log(beta), 1).unwrap();
        let mut z = PhasePoint::scalar(10.0, 10.0).unwrap();
        let c0 = log_case_product(alpha, beta, 10.0, 10.0);
        for _ in 0..10_000 {
            z = symplectic_euler_step(&h, &z, 0.1).map_err(|e| e.to_string())?;
            worst = worst.max((log_case_product(alpha, beta, z.p()[0], z.q()[0]) - c0).abs() / c0);
        }
    }
    check(worst <= 1e-12, format!("max relative change of (α+p)(β+q): {worst:.2e}"))
}

fn c11_combinatorics() -> Outcome {
    let lemma = (1..=10).all(|k| (1..=k).all(|n| lemma1_lhs(k, n) == lemma1_rhs(k, n)));
    let fubini_ok = (1..=20).all(|k| {
        let lhs = fubini(k - 1).to_f64().unwrap();
        let rhs = factorial(k - 1).to_f64().unwrap() / std::f64::consts::LN_2.powi(k as i32);
        lhs < rhs
    });
    let mut backseat = true;
    for &r in &[0.5, 2.0, 10.0] {
        for k in 1..=200 {
            backseat &= match backseat_sum(k, r) {
                Ok(s) => s <= backseat_bound(k, r),
                Err(_) => backseat_log_sum(k, r).map(|s| s <= backseat_log_bound(k, r)).unwrap_or(false),
            };
        }
    }
    let quartic = (1..=4).all(|n| quartic_alternating_ipb(n) == quartic_alternating_formula(n));
    check(
        lemma && fubini_ok && backseat && quartic,
        format!("composition identity {lemma}, Fubini bound {fubini_ok}, backseat bound {backseat}, quartic IPB {quartic}"),
    )
}

fn random_poly(rng: &mut ChaCha8Rng) -> ExactPoly {
    let mut p = ExactPoly::zero();
    for _ in 0..rng.random_range(1..=3) {
        let mut factors = Vec::new();
        for _ in 0..rng.random_range(1..=2) {
            let k = rng.random_range(1..=3u16);
            let s = if rng.random_bool(0.5) { Symbol::F(k) } else { Symbol::G(k) };
            factors.push((s, rng.random_range(1..=2u32)));
        }
        let c = <BigRational as Coeff>::from_ratio(rng.random_range(-5..=5), rng.random_range(1..=4));
        p.add_term(Monomial::from_factors(&factors), c);
    }
    p
}

fn c12_oracle_equivalence() -> Outcome {
    let bch_ok = (0..=6).all(|n| bch_correction(n) == dynkin_correction::<BigRational>(n));

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst_step = 0.0f64;
    for _ in 0..100 {
        let d = rng.random_range(1..=4);
        let b = Matrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0)).symmetrized();
        let c = Matrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0)).symmetrized();
        let eta = rng.random_range(0.01..0.3);
        let p: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let q: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let z = PhasePoint::new(p, q).unwrap();
        let h = SeparableHamiltonian::quadratic(b.clone(), c.clone()).unwrap();
        let exact = exact_quadratic_step(&b, &c, &z, eta).map_err(|e| e.to_string())?;
        let generic = symplectic_euler_step(&h, &z, eta).map_err(|e| e.to_string())?;
        worst_step = worst_step.max(exact.distance(&generic));
    }

    let mut jacobi_ok = true;
    for _ in 0..100 {
        let (u, v, w) = (random_poly(&mut rng), random_poly(&mut rng), random_poly(&mut rng));
        let sum = &(&poisson(&u, &poisson(&v, &w)) + &poisson(&v, &poisson(&w, &u))) + &poisson(&w, &poisson(&u, &v));
        jacobi_ok &= sum.is_zero();
    }
    check(
        bch_ok && worst_step <= 1e-14 && jacobi_ok,
        format!("BCH = Dynkin for n ≤ 6: {bch_ok}, quadratic step mismatch {worst_step:.2e}, Jacobi exact: {jacobi_ok}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("quadratic conservation", c1_quadratic_conservation),
        ("closed form vs integral form", c2_integral_form),
        ("interpolating flow", c3_interpolating_flow),
        ("symbolic cancellation", c4_cancellation),
        ("Φ table", c5_phi_table),
        ("conservation order", c6_conservation_order),
        ("log-cosh MH level and oscillation", c7_logcosh_traces),
        ("regret identities", c8_regret_identities),
        ("pushforward", c9_pushforward),
        ("log case", c10_log_case),
        ("combinatorics", c11_combinatorics),
        ("oracle equivalence", c12_oracle_equivalence),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
