//! Closed-form modified Hamiltonians: the quadratic case through the
//! T-function, its integral-form oracle in the 3×3 adjoint representation,
//! and the logarithmic case.

use crate::error::{Error, Result};
use crate::integrators::{exact_quadratic_step, quadratic_step_matrix_1d};
use crate::linalg::{real_eigen, EigenFailure, Matrix};
use crate::phase::PhasePoint;
use crate::scalar::Real;

/// Below this `|λη²|` the T-function switches to its Taylor polynomial.
const T_SERIES_CUTOFF: f64 = 1e-6;

/// `T(η, λ)`: `arcsin(√x)/√(x(1−x))` for `x = λη² > 0`, the arcsinh branch for
/// `x < 0`, and 1 at `x = 0`.
pub fn t_function<T: Real>(eta: T, lambda: T) -> Result<T> {
    let x = lambda * eta * eta;
    if !x.is_finite() {
        return Err(Error::NonFinite("λη²"));
    }
    if x >= T::one() {
        return Err(Error::ConvergenceRadiusExceeded(x.as_f64()));
    }
    if x.abs() < T::lit(T_SERIES_CUTOFF) {
        // 1 + 2x/3 + 8x²/15 + 16x³/35
        let c = [T::one(), T::lit(2.0 / 3.0), T::lit(8.0 / 15.0), T::lit(16.0 / 35.0)];
        return Ok(c.iter().rev().fold(T::zero(), |acc, &ci| acc * x + ci));
    }
    let s = x.abs().sqrt();
    let denom = (x.abs() * (T::one() - x)).sqrt();
    Ok(if x > T::zero() { s.asin() / denom } else { s.asinh() / denom })
}

/// `S(p, q) = ap² + bq² − 2abηpq`, conserved by symplectic Euler on `ap² + bq²`.
pub fn conserved_s_1d<T: Real>(a: T, b: T, p: T, q: T, eta: T) -> T {
    a * p * p + b * q * q - T::lit(2.0) * a * b * eta * p * q
}

/// `T(η, ab)·S(p, q)`.
pub fn mh_quadratic_1d<T: Real>(a: T, b: T, p: T, q: T, eta: T) -> Result<T> {
    if a == T::zero() || b == T::zero() {
        return Err(Error::InvalidArgument("quadratic coefficients must be nonzero".into()));
    }
    Ok(t_function(eta, a * b)? * conserved_s_1d(a, b, p, q, eta))
}

/// Modified Hamiltonian of `F = pᵀBp`, `G = qᵀCq` under symplectic Euler.
///
/// With `BC = QΛQ⁻¹` and `T(BC) = Q T(η,Λ) Q⁻¹`:
/// `H̃ = pᵀ T(BC) B p + qᵀ C T(BC) q − 2η pᵀ BC T(BC) q`.
#[derive(Clone, Debug)]
pub struct QuadraticMH<T> {
    b: Matrix<T>,
    c: Matrix<T>,
    q: Matrix<T>,
    lambda: Vec<T>,
    eta: T,
    t_b: Matrix<T>,
    c_t: Matrix<T>,
    cross: Matrix<T>,
}

impl<T: Real> QuadraticMH<T> {
    pub fn new(b: &Matrix<T>, c: &Matrix<T>, eta: T) -> Result<Self> {
        if !b.is_square() || !c.is_square() || b.rows() != c.rows() {
            return Err(Error::DimensionMismatch { expected: b.rows(), got: c.rows() });
        }
        if !b.is_symmetric() || !c.is_symmetric() {
            return Err(Error::InvalidArgument("B and C must be symmetric".into()));
        }
        let bc = b * c;
        let radius = bc.op_norm() * eta * eta;
        if radius >= T::one() {
            return Err(Error::ConvergenceRadiusExceeded(radius.as_f64()));
        }
        let eig = real_eigen(&bc).map_err(|e| match e {
            EigenFailure::NonReal => Error::NonRealSpectrum,
            EigenFailure::Defective => Error::DecompositionUnavailable("BC is not diagonalizable".into()),
        })?;
        let q = eig.vectors;
        let q_inv = q.inverse()?;
        let rebuilt = &(&q * &Matrix::diag(&eig.values)) * &q_inv;
        let residual = (&rebuilt - &bc).norm_inf();
        if residual > T::lit(1e-9) * (T::one() + bc.norm_inf()) {
            return Err(Error::DecompositionUnavailable(format!("eigendecomposition residual {residual}")));
        }
        let tl: Vec<T> = eig.values.iter().map(|&l| t_function(eta, l)).collect::<Result<_>>()?;
        let ltl: Vec<T> = eig.values.iter().zip(&tl).map(|(&l, &t)| l * t).collect();
        let t_mat = &(&q * &Matrix::diag(&tl)) * &q_inv;
        let lt_mat = &(&q * &Matrix::diag(&ltl)) * &q_inv;
        Ok(Self {
            t_b: &t_mat * b,
            c_t: c * &t_mat,
            cross: lt_mat.scale(T::lit(2.0) * eta),
            b: b.clone(),
            c: c.clone(),
            q,
            lambda: eig.values,
            eta,
        })
    }

    pub fn b(&self) -> &Matrix<T> {
        &self.b
    }

    pub fn c(&self) -> &Matrix<T> {
        &self.c
    }

    /// Eigenvectors of `BC` as columns.
    pub fn eigenvectors(&self) -> &Matrix<T> {
        &self.q
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.lambda
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    pub fn eval(&self, z: &PhasePoint<T>) -> Result<T> {
        if z.dim() != self.b.rows() {
            return Err(Error::DimensionMismatch { expected: self.b.rows(), got: z.dim() });
        }
        let (p, q) = (z.p(), z.q());
        Ok(self.t_b.bilinear(p, p) + self.c_t.bilinear(q, q) - self.cross.bilinear(p, q))
    }

    /// Same quantity built from an explicit eigenbasis, for checking that the
    /// result does not depend on how eigenpairs are ordered or scaled.
    pub fn eval_with_basis(&self, z: &PhasePoint<T>, q: &Matrix<T>, lambda: &[T]) -> Result<T> {
        let q_inv = q.inverse()?;
        let tl: Vec<T> = lambda.iter().map(|&l| t_function(self.eta, l)).collect::<Result<_>>()?;
        let ltl: Vec<T> = lambda.iter().zip(&tl).map(|(&l, &t)| l * t).collect();
        let t_mat = &(q * &Matrix::diag(&tl)) * &q_inv;
        let lt_mat = &(q * &Matrix::diag(&ltl)) * &q_inv;
        let (p, qv) = (z.p(), z.q());
        Ok((&t_mat * &self.b).bilinear(p, p) + (&self.c * &t_mat).bilinear(qv, qv)
            - T::lit(2.0) * self.eta * lt_mat.bilinear(p, qv))
    }
}

pub fn mh_quadratic_multi<T: Real>(b: &Matrix<T>, c: &Matrix<T>, z: &PhasePoint<T>, eta: T) -> Result<T> {
    QuadraticMH::new(b, c, eta)?.eval(z)
}

/// Max relative deviation of the closed-form MH along `steps` symplectic Euler steps.
pub fn quadratic_drift<T: Real>(b: &Matrix<T>, c: &Matrix<T>, z0: &PhasePoint<T>, eta: T, steps: usize) -> Result<T> {
    let mh = QuadraticMH::new(b, c, eta)?;
    let h0 = mh.eval(z0)?;
    let scale = h0.abs().max(T::min_positive_value());
    let mut z = z0.clone();
    let mut worst = T::zero();
    for _ in 0..steps {
        z = exact_quadratic_step(b, c, &z, eta)?;
        worst = worst.max((mh.eval(&z)? - h0).abs() / scale);
    }
    Ok(worst)
}

/// `F = ap²`, `G = bq²` acting on quadratic forms in the basis `{p², q², pq}`
/// by `u ↦ {u, F}` and `u ↦ {u, G}`.
#[derive(Clone, Debug)]
pub struct AdjointRep1D<T> {
    pub a: T,
    pub b: T,
    pub ad_f: Matrix<T>,
    pub ad_g: Matrix<T>,
}

impl<T: Real> AdjointRep1D<T> {
    pub fn new(a: T, b: T) -> Self {
        let z = T::zero();
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let ad_f = Matrix::from_rows(&[vec![z, z, two * a], vec![z, z, z], vec![z, four * a, z]]);
        let ad_g = Matrix::from_rows(&[vec![z, z, z], vec![z, z, -two * b], vec![-four * b, z, z]]);
        Self { a, b, ad_f, ad_g }
    }

    /// `M(t) = e^{t·ad_G} e^{t·ad_F}`.
    pub fn m(&self, t: T) -> Matrix<T> {
        &self.ad_g.scale(t).expm() * &self.ad_f.scale(t).expm()
    }

    /// Coordinates of `G + e^{t·ad_G} F`.
    pub fn v(&self, t: T) -> Vec<T> {
        let mut v = self.ad_g.scale(t).expm().mul_vec(&[self.a, T::zero(), T::zero()]);
        v[1] = v[1] + self.b;
        v
    }
}

/// Recursion limit for adaptive Simpson.
const QUAD_MAX_DEPTH: usize = 40;
/// Cap on the `(I−M)^j/(j+1)` series.
const SERIES_MAX_TERMS: usize = 2000;

/// Coefficients `(c_pp, c_qq, c_pq)` of the quadratic MH computed from
/// `(1/η)∫₀^η Σ_j (I−M(t))^j/(j+1) v(t) dt`.
pub fn integral_form_quadratic_1d<T: Real>(a: T, b: T, eta: T, quad_tol: T) -> Result<[T; 3]> {
    if eta <= T::zero() || !(quad_tol > T::zero()) {
        return Err(Error::InvalidArgument("η and quadrature tolerance must be positive".into()));
    }
    let rep = AdjointRep1D::new(a, b);
    let integrand = |t: T| -> Result<[T; 3]> {
        let n = &Matrix::identity(3) - &rep.m(t);
        let norm = n.op_norm();
        if norm >= T::one() {
            return Err(Error::OperatorNormTooLarge(norm.as_f64()));
        }
        let mut term = rep.v(t);
        let mut acc = term.clone();
        for j in 1..=SERIES_MAX_TERMS {
            term = n.mul_vec(&term);
            let scaled: Vec<T> = term.iter().map(|&x| x / T::lit((j + 1) as f64)).collect();
            for (s, x) in acc.iter_mut().zip(&scaled) {
                *s = *s + *x;
            }
            if scaled.iter().fold(T::zero(), |m, x| m.max(x.abs())) < quad_tol / T::lit(10.0) {
                return Ok([acc[0], acc[1], acc[2]]);
            }
        }
        Err(Error::QuadratureFailure("matrix-log series did not reach tolerance".into()))
    };
    let integral = adaptive_simpson(&integrand, T::zero(), eta, quad_tol * eta)?;
    Ok(integral.map(|x| x / eta))
}

fn simpson<T: Real>(fa: &[T; 3], fm: &[T; 3], fb: &[T; 3], h: T) -> [T; 3] {
    std::array::from_fn(|i| h / T::lit(6.0) * (fa[i] + T::lit(4.0) * fm[i] + fb[i]))
}

fn adaptive_simpson<T: Real>(f: &impl Fn(T) -> Result<[T; 3]>, a: T, b: T, tol: T) -> Result<[T; 3]> {
    let fa = f(a)?;
    let fb = f(b)?;
    let m = (a + b) / T::lit(2.0);
    let fm = f(m)?;
    let whole = simpson(&fa, &fm, &fb, b - a);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<T: Real>(
    f: &impl Fn(T) -> Result<[T; 3]>,
    a: T,
    b: T,
    fa: [T; 3],
    fm: [T; 3],
    fb: [T; 3],
    whole: [T; 3],
    tol: T,
    depth: usize,
) -> Result<[T; 3]> {
    let m = (a + b) / T::lit(2.0);
    let lm = (a + m) / T::lit(2.0);
    let rm = (m + b) / T::lit(2.0);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(&fa, &flm, &fm, m - a);
    let right = simpson(&fm, &frm, &fb, b - m);
    let err = (0..3).fold(T::zero(), |e, i| e.max((left[i] + right[i] - whole[i]).abs()));
    let fifteen = T::lit(15.0);
    if err <= fifteen * tol {
        return Ok(std::array::from_fn(|i| left[i] + right[i] + (left[i] + right[i] - whole[i]) / fifteen));
    }
    if depth >= QUAD_MAX_DEPTH {
        return Err(Error::QuadratureFailure(format!("no convergence on [{a}, {b}]")));
    }
    let half = tol / T::lit(2.0);
    let l = simpson_rec(f, a, m, fa, flm, fm, left, half, depth + 1)?;
    let r = simpson_rec(f, m, b, fm, frm, fb, right, half, depth + 1)?;
    Ok(std::array::from_fn(|i| l[i] + r[i]))
}

/// RK4 substeps per unit interval `[0, η]`.
const FLOW_SUBSTEPS: usize = 2048;

/// Flows `ż = Ω∇H̃` for the closed-form 1D MH over `[0, η]` with RK4.
pub fn interpolating_flow_1d<T: Real>(a: T, b: T, z: (T, T), eta: T) -> Result<(T, T)> {
    let t = t_function(eta, a * b)?;
    let two = T::lit(2.0);
    // ṗ = −∂_q H̃, q̇ = ∂_p H̃
    let field = |(p, q): (T, T)| -> (T, T) {
        let dp = t * (two * a * p - two * a * b * eta * q);
        let dq = t * (two * b * q - two * a * b * eta * p);
        (-dq, dp)
    };
    let h = eta / T::lit(FLOW_SUBSTEPS as f64);
    let half = h / two;
    let mut cur = z;
    for _ in 0..FLOW_SUBSTEPS {
        let k1 = field(cur);
        let k2 = field((cur.0 + half * k1.0, cur.1 + half * k1.1));
        let k3 = field((cur.0 + half * k2.0, cur.1 + half * k2.1));
        let k4 = field((cur.0 + h * k3.0, cur.1 + h * k3.1));
        let six = T::lit(6.0);
        cur = (
            cur.0 + h / six * (k1.0 + two * k2.0 + two * k3.0 + k4.0),
            cur.1 + h / six * (k1.1 + two * k2.1 + two * k3.1 + k4.1),
        );
    }
    if cur.0.is_finite() && cur.1.is_finite() {
        Ok(cur)
    } else {
        Err(Error::NonFinite("interpolating flow"))
    }
}

/// `‖z(η) − SE(z)‖_∞` for the interpolating flow against one symplectic Euler step.
pub fn interpolating_flow_check_1d<T: Real>(a: T, b: T, z: (T, T), eta: T) -> Result<T> {
    if eta == T::zero() {
        return Ok(T::zero());
    }
    let flowed = interpolating_flow_1d(a, b, z, eta)?;
    let m = quadratic_step_matrix_1d(a, b, eta);
    let stepped = m.mul_vec(&[z.0, z.1]);
    Ok((flowed.0 - stepped[0]).abs().max((flowed.1 - stepped[1]).abs()))
}

/// Time-η solution operator of the interpolating flow, column by column.
pub fn flow_solution_operator_1d<T: Real>(a: T, b: T, eta: T) -> Result<Matrix<T>> {
    let e1 = interpolating_flow_1d(a, b, (T::one(), T::zero()), eta)?;
    let e2 = interpolating_flow_1d(a, b, (T::zero(), T::one()), eta)?;
    Ok(Matrix::from_rows(&[vec![e1.0, e2.0], vec![e1.1, e2.1]]))
}

/// `L(p, q) = log(α+p) + log(β+q)`.
pub fn conserved_l<T: Real>(alpha: T, beta: T, p: T, q: T) -> Result<T> {
    let (x, y) = (alpha + p, beta + q);
    if !(x > T::zero() && y > T::zero()) {
        return Err(Error::DomainViolation(format!("log case needs α+p > 0 and β+q > 0, got {x}, {y}")));
    }
    Ok(x.ln() + y.ln())
}

/// `(α+p)(β+q)`, invariant under symplectic Euler for `F = log(α+p)`, `G = log(β+q)`.
pub fn log_case_product<T: Real>(alpha: T, beta: T, p: T, q: T) -> T {
    (alpha + p) * (beta + q)
}

/// `log(1 − η/L) − (η/L)·log(1 − η/L)` with `L = conserved_l`.
pub fn mh_log<T: Real>(alpha: T, beta: T, p: T, q: T, eta: T) -> Result<T> {
    if !(eta > T::zero()) {
        return Err(Error::InvalidArgument("mh_log needs η > 0".into()));
    }
    let l = conserved_l(alpha, beta, p, q)?;
    if l == T::zero() {
        return Err(Error::DomainViolation("L(p, q) = 0".into()));
    }
    let r = eta / l;
    if r >= T::one() {
        return Err(Error::DomainViolation(format!("η/L = {r} ≥ 1")));
    }
    let lg = (T::one() - r).ln();
    Ok(lg - r * lg)
}

/// 1D closed form evaluated along a trajectory.
pub fn quadratic_1d_values<T: Real>(a: T, b: T, eta: T, points: &[PhasePoint<T>]) -> Result<Vec<T>> {
    let t = t_function(eta, a * b)?;
    Ok(points.iter().map(|z| t * conserved_s_1d(a, b, z.p()[0], z.q()[0], eta)).collect())
}
