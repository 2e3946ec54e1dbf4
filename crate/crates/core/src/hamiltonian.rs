use crate::error::{Error, Result};
use crate::family::SmoothScalarFamily;
use crate::phase::PhasePoint;
use crate::scalar::Real;

/// `H(p, q) = F(p) + G(q)`.
#[derive(Clone, Debug)]
pub struct SeparableHamiltonian<T> {
    f: SmoothScalarFamily<T>,
    g: SmoothScalarFamily<T>,
    dim: usize,
}

impl<T: Real> SeparableHamiltonian<T> {
    pub fn new(f: SmoothScalarFamily<T>, g: SmoothScalarFamily<T>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be positive".into()));
        }
        for fixed in [f.fixed_dim(), g.fixed_dim()].into_iter().flatten() {
            if fixed != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: fixed });
            }
        }
        Ok(Self { f, g, dim })
    }

    /// `F = pᵀBp`, `G = qᵀCq`.
    pub fn quadratic(b: crate::linalg::Matrix<T>, c: crate::linalg::Matrix<T>) -> Result<Self> {
        let d = b.rows();
        Self::new(SmoothScalarFamily::quadratic(b), SmoothScalarFamily::quadratic(c), d)
    }

    /// `F = a p²`, `G = b q²`.
    pub fn quadratic_1d(a: T, b: T) -> Self {
        Self::new(SmoothScalarFamily::quadratic_1d(a), SmoothScalarFamily::quadratic_1d(b), 1)
            .expect("scalar quadratic is one-dimensional")
    }

    pub fn f(&self) -> &SmoothScalarFamily<T> {
        &self.f
    }

    pub fn g(&self) -> &SmoothScalarFamily<T> {
        &self.g
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, z: &PhasePoint<T>) -> T {
        self.f.value(z.p()) + self.g.value(z.q())
    }

    pub fn grad_f(&self, p: &[T]) -> Result<Vec<T>> {
        finite(self.f.gradient(p), "grad F")
    }

    pub fn grad_g(&self, q: &[T]) -> Result<Vec<T>> {
        finite(self.g.gradient(q), "grad G")
    }

    /// Hamiltonian vector field `ż = Ω∇H = (-∇G(q), ∇F(p))`.
    pub fn vector_field(&self, z: &PhasePoint<T>) -> Result<(Vec<T>, Vec<T>)> {
        let dp = self.grad_g(z.q())?.into_iter().map(|x| -x).collect();
        Ok((dp, self.grad_f(z.p())?))
    }

    pub(crate) fn check_dim(&self, z: &PhasePoint<T>) -> Result<()> {
        if z.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: z.dim() });
        }
        Ok(())
    }
}

fn finite<T: Real>(v: Vec<T>, what: &'static str) -> Result<Vec<T>> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::OracleFailure(what))
    }
}
