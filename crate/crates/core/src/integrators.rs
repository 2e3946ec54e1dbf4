//! Forward, backward and symplectic Euler for separable Hamiltonians.

use crate::error::{Error, Result};
use crate::hamiltonian::SeparableHamiltonian;
use crate::linalg::{norm_inf, Matrix};
use crate::phase::PhasePoint;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Forward,
    Backward,
    Symplectic,
    /// Symplectic Euler written as the linear map of a quadratic Hamiltonian.
    ExactQuadratic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepperConfig<T> {
    pub eta: T,
    pub scheme: Scheme,
    pub implicit_tol: T,
    pub implicit_max_iter: usize,
}

impl<T: Real> StepperConfig<T> {
    pub fn new(eta: T, scheme: Scheme) -> Result<Self> {
        if !(eta > T::zero()) || !eta.is_finite() {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {eta}")));
        }
        Ok(Self { eta, scheme, implicit_tol: T::lit(1e-13), implicit_max_iter: 200 })
    }

    pub fn with_implicit(mut self, tol: T, max_iter: usize) -> Result<Self> {
        if !(tol > T::zero()) {
            return Err(Error::InvalidArgument("implicit tolerance must be positive".into()));
        }
        self.implicit_tol = tol;
        self.implicit_max_iter = max_iter;
        Ok(self)
    }
}

fn finite_point<T: Real>(p: Vec<T>, q: Vec<T>) -> Result<PhasePoint<T>> {
    let z = PhasePoint::from_parts(p, q);
    if z.is_finite() {
        Ok(z)
    } else {
        Err(Error::OracleFailure("step produced a non-finite point"))
    }
}

/// `p' = p − η∇G(q)`, `q' = q + η∇F(p')`.
pub fn symplectic_euler_step<T: Real>(h: &SeparableHamiltonian<T>, z: &PhasePoint<T>, eta: T) -> Result<PhasePoint<T>> {
    h.check_dim(z)?;
    let gq = h.grad_g(z.q())?;
    let p: Vec<T> = z.p().iter().zip(&gq).map(|(&p, &g)| p - eta * g).collect();
    let fp = h.grad_f(&p)?;
    let q = z.q().iter().zip(&fp).map(|(&q, &f)| q + eta * f).collect();
    finite_point(p, q)
}

/// `p' = p − η∇G(q)`, `q' = q + η∇F(p)`.
pub fn forward_euler_step<T: Real>(h: &SeparableHamiltonian<T>, z: &PhasePoint<T>, eta: T) -> Result<PhasePoint<T>> {
    h.check_dim(z)?;
    let gq = h.grad_g(z.q())?;
    let fp = h.grad_f(z.p())?;
    let p = z.p().iter().zip(&gq).map(|(&p, &g)| p - eta * g).collect();
    let q = z.q().iter().zip(&fp).map(|(&q, &f)| q + eta * f).collect();
    finite_point(p, q)
}

/// Solves `p' = p − η∇G(q')`, `q' = q + η∇F(p')`.
///
/// Quadratic Hamiltonians are solved directly; everything else by relaxed
/// fixed-point iteration. Returns the point and the iteration count.
pub fn backward_euler_step<T: Real>(
    h: &SeparableHamiltonian<T>,
    z: &PhasePoint<T>,
    eta: T,
    tol: T,
    max_iter: usize,
) -> Result<(PhasePoint<T>, usize)> {
    h.check_dim(z)?;
    if eta == T::zero() {
        return Ok((z.clone(), 0));
    }
    if let (Some(b), Some(c)) = (h.f().quadratic_matrix(), h.g().quadratic_matrix()) {
        // (I + 4η²CB) p' = p − 2ηCq
        let two_eta = eta + eta;
        let lhs = &Matrix::identity(z.dim()) + &(c * b).scale(two_eta * two_eta);
        let cq = c.mul_vec(z.q());
        let rhs: Vec<T> = z.p().iter().zip(&cq).map(|(&p, &v)| p - two_eta * v).collect();
        let p = lhs.solve(&rhs)?;
        let bp = b.mul_vec(&p);
        let q = z.q().iter().zip(&bp).map(|(&q, &v)| q + two_eta * v).collect();
        return Ok((finite_point(p, q)?, 1));
    }
    let residual = |p: &[T], q: &[T]| -> Result<T> {
        let gq = h.grad_g(q)?;
        let fp = h.grad_f(p)?;
        let rp = (0..p.len()).map(|i| p[i] - z.p()[i] + eta * gq[i]).collect::<Vec<_>>();
        let rq = (0..q.len()).map(|i| q[i] - z.q()[i] - eta * fp[i]).collect::<Vec<_>>();
        Ok(norm_inf(&rp).max(norm_inf(&rq)))
    };
    let mut p = z.p().to_vec();
    let mut q = z.q().to_vec();
    let mut omega = T::one();
    let mut res = residual(&p, &q)?;
    for it in 1..=max_iter {
        let gq = h.grad_g(&q)?;
        let p_new: Vec<T> = (0..p.len()).map(|i| z.p()[i] - eta * gq[i]).collect();
        let fp = h.grad_f(&p_new)?;
        let q_new: Vec<T> = (0..q.len()).map(|i| z.q()[i] + eta * fp[i]).collect();
        let cand_p: Vec<T> = (0..p.len()).map(|i| p[i] + omega * (p_new[i] - p[i])).collect();
        let cand_q: Vec<T> = (0..q.len()).map(|i| q[i] + omega * (q_new[i] - q[i])).collect();
        let cand_res = residual(&cand_p, &cand_q)?;
        if cand_res > res && omega > T::lit(1.0 / 64.0) {
            omega = omega * T::lit(0.5);
        }
        p = cand_p;
        q = cand_q;
        res = cand_res;
        if res <= tol {
            return Ok((finite_point(p, q)?, it));
        }
    }
    Err(Error::ImplicitSolveFailed { residual: res.as_f64(), iterations: max_iter })
}

/// Symplectic Euler for `F = pᵀBp`, `G = qᵀCq`: `p' = p − 2ηCq`, `q' = q + 2ηBp'`.
pub fn exact_quadratic_step<T: Real>(b: &Matrix<T>, c: &Matrix<T>, z: &PhasePoint<T>, eta: T) -> Result<PhasePoint<T>> {
    if b.rows() != z.dim() || c.rows() != z.dim() {
        return Err(Error::DimensionMismatch { expected: b.rows(), got: z.dim() });
    }
    let two_eta = eta + eta;
    let cq = c.mul_vec(z.q());
    let p: Vec<T> = z.p().iter().zip(&cq).map(|(&p, &v)| p - two_eta * v).collect();
    let bp = b.mul_vec(&p);
    let q = z.q().iter().zip(&bp).map(|(&q, &v)| q + two_eta * v).collect();
    finite_point(p, q)
}

/// One-dimensional step matrix `[[1, −2bη], [2aη, 1 − 4abη²]]`.
pub fn quadratic_step_matrix_1d<T: Real>(a: T, b: T, eta: T) -> Matrix<T> {
    let two = T::lit(2.0);
    Matrix::from_rows(&[
        vec![T::one(), -two * b * eta],
        vec![two * a * eta, T::one() - T::lit(4.0) * a * b * eta * eta],
    ])
}

#[derive(Clone, Debug)]
pub struct TrajectoryRecord<T> {
    pub points: Vec<PhasePoint<T>>,
    pub energies: Vec<T>,
    pub config: StepperConfig<T>,
    /// Implicit-solver iterations per step (zero for explicit schemes).
    pub iterations: Vec<usize>,
}

impl<T: Real> TrajectoryRecord<T> {
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }
}

/// Applies one step of the configured scheme.
pub fn step<T: Real>(h: &SeparableHamiltonian<T>, z: &PhasePoint<T>, config: &StepperConfig<T>) -> Result<(PhasePoint<T>, usize)> {
    match config.scheme {
        Scheme::Symplectic => Ok((symplectic_euler_step(h, z, config.eta)?, 0)),
        Scheme::Forward => Ok((forward_euler_step(h, z, config.eta)?, 0)),
        Scheme::Backward => backward_euler_step(h, z, config.eta, config.implicit_tol, config.implicit_max_iter),
        Scheme::ExactQuadratic => match (h.f().quadratic_matrix(), h.g().quadratic_matrix()) {
            (Some(b), Some(c)) => Ok((exact_quadratic_step(b, c, z, config.eta)?, 0)),
            _ => Err(Error::InvalidArgument("exact quadratic scheme needs quadratic F and G".into())),
        },
    }
}

pub fn run_trajectory<T: Real>(
    h: &SeparableHamiltonian<T>,
    z0: &PhasePoint<T>,
    config: &StepperConfig<T>,
    steps: usize,
) -> Result<TrajectoryRecord<T>> {
    h.check_dim(z0)?;
    let mut points = Vec::with_capacity(steps + 1);
    let mut energies = Vec::with_capacity(steps + 1);
    let mut iterations = Vec::with_capacity(steps);
    points.push(z0.clone());
    energies.push(h.value(z0));
    for k in 0..steps {
        let (z, it) = step(h, &points[k], config)
            .map_err(|e| Error::StepFailed { index: k, source: Box::new(e) })?;
        energies.push(h.value(&z));
        points.push(z);
        iterations.push(it);
    }
    Ok(TrajectoryRecord { points, energies, config: config.clone(), iterations })
}
