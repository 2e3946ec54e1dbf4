use crate::error::{Error, Result};
use crate::linalg::{real_eigen, EigenFailure, Matrix};
use crate::phase::skew_omega;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecompositionStatus {
    Exact,
    Failed,
}

/// Payoff matrix `A` with its factorization `A = UV` into symmetric matrices.
#[derive(Clone, Debug)]
pub struct PayoffMatrix<T> {
    a: Matrix<T>,
    factors: Option<(Matrix<T>, Matrix<T>)>,
}

impl<T: Real> PayoffMatrix<T> {
    /// Attempts the symmetric factorization; a failure is recorded, not returned.
    pub fn new(a: Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.rows(), got: a.cols() });
        }
        if !a.is_finite() {
            return Err(Error::NonFinite("payoff matrix"));
        }
        let factors = symmetric_decompose(&a).ok();
        Ok(Self { a, factors })
    }

    pub fn a(&self) -> &Matrix<T> {
        &self.a
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn status(&self) -> DecompositionStatus {
        if self.factors.is_some() {
            DecompositionStatus::Exact
        } else {
            DecompositionStatus::Failed
        }
    }

    pub fn factors(&self) -> Result<(&Matrix<T>, &Matrix<T>)> {
        self.factors
            .as_ref()
            .map(|(u, v)| (u, v))
            .ok_or_else(|| Error::DecompositionUnavailable("payoff matrix has no real symmetric factorization".into()))
    }

    /// `Ω_A = [[0, -A], [Aᵀ, 0]]`.
    pub fn skew_omega(&self) -> Matrix<T> {
        skew_omega(&self.a)
    }
}

/// Writes `A = UV` with `U`, `V` symmetric.
///
/// Symmetric input returns `(A, I)`. Otherwise `A = QDQ⁻¹` is diagonalized over
/// the reals and `U = QDQᵀ`, `V = (QQᵀ)⁻¹`. Non-real or defective spectra are
/// rejected.
pub fn symmetric_decompose<T: Real>(a: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.rows(), got: a.cols() });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite("payoff matrix"));
    }
    if a.is_symmetric() {
        return Ok((a.clone(), Matrix::identity(a.rows())));
    }
    let eig = real_eigen(a).map_err(|e| {
        Error::DecompositionUnavailable(match e {
            EigenFailure::NonReal => "non-real eigenvalues".into(),
            EigenFailure::Defective => "matrix is not diagonalizable".into(),
        })
    })?;
    let q = &eig.vectors;
    let qt = q.transpose();
    let u = &(&*q * &Matrix::diag(&eig.values)) * &qt;
    let v = (&*q * &qt).inverse()?;
    let (u, v) = (u.symmetrized(), v.symmetrized());
    let resid = (&(&u * &v) - a).norm_inf();
    if resid > T::lit(1e-10) * (T::one() + a.norm_inf()) {
        return Err(Error::DecompositionUnavailable(format!("residual {resid} too large")));
    }
    Ok((u, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_symmetric_inputs() {
        let (u, v) = symmetric_decompose(&Matrix::<f64>::identity(2)).unwrap();
        assert_eq!(u, Matrix::identity(2));
        assert_eq!(v, Matrix::identity(2));
        let d = Matrix::<f64>::diag(&[2.0, 3.0]);
        let (u, v) = symmetric_decompose(&d).unwrap();
        assert_eq!(u, d);
        assert_eq!(v, Matrix::identity(2));
    }

    #[test]
    fn upper_triangular_example() {
        let a = Matrix::<f64>::from_f64_rows(&[&[1.0, 1.0], &[0.0, 2.0]]);
        let (u, v) = symmetric_decompose(&a).unwrap();
        assert!(u.is_symmetric() && v.is_symmetric());
        assert!((&(&u * &v) - &a).norm_inf() <= 1e-10 * (1.0 + a.norm_inf()));
    }

    #[test]
    fn rotation_is_unavailable() {
        let a = Matrix::<f64>::from_f64_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert!(matches!(symmetric_decompose(&a), Err(Error::DecompositionUnavailable(_))));
        let p = PayoffMatrix::new(a).unwrap();
        assert_eq!(p.status(), DecompositionStatus::Failed);
    }

    #[test]
    fn jordan_block_is_unavailable() {
        let a = Matrix::<f64>::from_f64_rows(&[&[2.0, 1.0], &[0.0, 2.0]]);
        assert!(matches!(symmetric_decompose(&a), Err(Error::DecompositionUnavailable(_))));
    }
}
