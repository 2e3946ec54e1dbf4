use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// A point `z = (p, q)` of phase space.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint<T> {
    p: Vec<T>,
    q: Vec<T>,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(p: Vec<T>, q: Vec<T>) -> Result<Self> {
        if p.is_empty() || p.len() != q.len() {
            return Err(Error::DimensionMismatch { expected: p.len().max(1), got: q.len() });
        }
        if !p.iter().chain(&q).all(|x| x.is_finite()) {
            return Err(Error::NonFinite("phase point"));
        }
        Ok(Self { p, q })
    }

    /// One-dimensional point.
    pub fn scalar(p: T, q: T) -> Result<Self> {
        Self::new(vec![p], vec![q])
    }

    /// Skips validation; used by steppers that check finiteness themselves.
    pub(crate) fn from_parts(p: Vec<T>, q: Vec<T>) -> Self {
        Self { p, q }
    }

    pub fn p(&self) -> &[T] {
        &self.p
    }

    pub fn q(&self) -> &[T] {
        &self.q
    }

    pub fn dim(&self) -> usize {
        self.p.len()
    }

    pub fn is_finite(&self) -> bool {
        self.p.iter().chain(&self.q).all(|x| x.is_finite())
    }

    /// Stacked coordinates `(p, q)`.
    pub fn to_vec(&self) -> Vec<T> {
        self.p.iter().chain(&self.q).copied().collect()
    }

    pub fn from_vec(z: &[T]) -> Result<Self> {
        if z.len() % 2 != 0 {
            return Err(Error::DimensionMismatch { expected: z.len() + 1, got: z.len() });
        }
        let d = z.len() / 2;
        Self::new(z[..d].to_vec(), z[d..].to_vec())
    }

    /// Infinity-norm distance.
    pub fn distance(&self, other: &Self) -> T {
        self.p
            .iter()
            .zip(&other.p)
            .chain(self.q.iter().zip(&other.q))
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
    }
}

/// The symplectic matrix `Ω = [[0, -I], [I, 0]]` of size `2d`.
pub fn symplectic_omega<T: Real>(d: usize) -> Matrix<T> {
    skew_omega(&Matrix::identity(d))
}

/// `Ω_M = [[0, -M], [Mᵀ, 0]]`.
pub fn skew_omega<T: Real>(m: &Matrix<T>) -> Matrix<T> {
    let d = m.rows();
    Matrix::from_fn(2 * d, 2 * d, |i, j| match (i < d, j < d) {
        (true, false) => -m[(i, j - d)],
        (false, true) => m[(j, i - d)],
        _ => T::zero(),
    })
}
