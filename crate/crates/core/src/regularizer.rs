//! Legendre-type regularizers, their convex conjugates and Bregman divergences.

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm_inf, sub, Matrix};
use crate::scalar::Real;

/// Strategy domain.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain<T> {
    Full,
    Simplex,
    Box { lo: Vec<T>, hi: Vec<T> },
}

impl<T: Real> Domain<T> {
    pub fn contains(&self, w: &[T]) -> bool {
        let slack = T::lit(1e-12);
        match self {
            Domain::Full => w.iter().all(|x| x.is_finite()),
            Domain::Simplex => {
                let sum: T = w.iter().copied().sum();
                w.iter().all(|&x| x >= -slack) && (sum - T::one()).abs() <= T::lit(1e-9)
            }
            Domain::Box { lo, hi } => {
                lo.len() == w.len()
                    && w.iter().zip(lo.iter().zip(hi)).all(|(&x, (&l, &h))| x >= l - slack && x <= h + slack)
            }
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, Domain::Full)
    }
}

/// A regularizer supplied by the caller.
pub trait RegularizerOracle<T>: Send + Sync + Debug {
    fn value(&self, w: &[T]) -> T;
    fn gradient(&self, w: &[T]) -> Vec<T>;
    fn conjugate_value(&self, x: &[T]) -> T;
    fn conjugate_gradient(&self, x: &[T]) -> Vec<T>;
    fn domain(&self) -> Domain<T>;
}

#[derive(Clone, Debug)]
pub enum RegularizerKind<T> {
    /// `½ wᵀMw` with `M` symmetric positive definite.
    HalfSquaredNorm { m: Matrix<T>, m_inv: Matrix<T> },
    /// `Σ w_i log w_i` on the probability simplex.
    NegativeEntropy,
    Custom(Arc<dyn RegularizerOracle<T>>),
}

#[derive(Clone, Debug)]
pub struct Regularizer<T> {
    kind: RegularizerKind<T>,
}

/// Coordinates are floored here before taking logarithms.
pub const ENTROPY_FLOOR: f64 = 1e-300;

/// Outcome of [`Regularizer::conjugate_pair_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugateReport {
    pub max_residual: f64,
    pub samples: usize,
    pub passed: bool,
}

impl<T: Real> Regularizer<T> {
    pub fn half_squared_norm(m: Matrix<T>) -> Result<Self> {
        let m = m.symmetrized();
        let m_inv = m.inverse()?;
        Ok(Self { kind: RegularizerKind::HalfSquaredNorm { m, m_inv } })
    }

    pub fn euclidean(d: usize) -> Self {
        Self::half_squared_norm(Matrix::identity(d)).expect("identity is invertible")
    }

    pub fn negative_entropy() -> Self {
        Self { kind: RegularizerKind::NegativeEntropy }
    }

    pub fn custom(oracle: Arc<dyn RegularizerOracle<T>>) -> Self {
        Self { kind: RegularizerKind::Custom(oracle) }
    }

    pub fn kind(&self) -> &RegularizerKind<T> {
        &self.kind
    }

    pub fn domain(&self) -> Domain<T> {
        match &self.kind {
            RegularizerKind::HalfSquaredNorm { .. } => Domain::Full,
            RegularizerKind::NegativeEntropy => Domain::Simplex,
            RegularizerKind::Custom(o) => o.domain(),
        }
    }

    fn check(&self, w: &[T]) -> Result<()> {
        if self.domain().contains(w) {
            Ok(())
        } else {
            Err(Error::DomainViolation(format!("{w:?}")))
        }
    }

    pub fn value(&self, w: &[T]) -> Result<T> {
        self.check(w)?;
        Ok(match &self.kind {
            RegularizerKind::HalfSquaredNorm { m, .. } => T::lit(0.5) * m.bilinear(w, w),
            RegularizerKind::NegativeEntropy => w
                .iter()
                .map(|&x| if x > T::zero() { x * x.ln() } else { T::zero() })
                .sum(),
            RegularizerKind::Custom(o) => o.value(w),
        })
    }

    /// `∇Ψ(w)`, the map into the dual space.
    pub fn gradient(&self, w: &[T]) -> Result<Vec<T>> {
        self.check(w)?;
        Ok(match &self.kind {
            RegularizerKind::HalfSquaredNorm { m, .. } => m.mul_vec(w),
            RegularizerKind::NegativeEntropy => {
                let floor = T::lit(ENTROPY_FLOOR);
                w.iter().map(|&x| T::one() + x.max(floor).ln()).collect()
            }
            RegularizerKind::Custom(o) => o.gradient(w),
        })
    }

    /// `Ψ*(x)`.
    pub fn conjugate_value(&self, x: &[T]) -> T {
        match &self.kind {
            RegularizerKind::HalfSquaredNorm { m_inv, .. } => T::lit(0.5) * m_inv.bilinear(x, x),
            RegularizerKind::NegativeEntropy => log_sum_exp(x),
            RegularizerKind::Custom(o) => o.conjugate_value(x),
        }
    }

    /// `∇Ψ*(x)`, the inverse of [`Regularizer::gradient`].
    pub fn conjugate_gradient(&self, x: &[T]) -> Vec<T> {
        match &self.kind {
            RegularizerKind::HalfSquaredNorm { m_inv, .. } => m_inv.mul_vec(x),
            RegularizerKind::NegativeEntropy => softmax(x),
            RegularizerKind::Custom(o) => o.conjugate_gradient(x),
        }
    }

    /// `D_Ψ(w, w̃) = Ψ(w) − Ψ(w̃) − ∇Ψ(w̃)ᵀ(w − w̃)`.
    pub fn bregman(&self, w: &[T], w_tilde: &[T]) -> Result<T> {
        if w.len() != w_tilde.len() {
            return Err(Error::DimensionMismatch { expected: w.len(), got: w_tilde.len() });
        }
        if let RegularizerKind::NegativeEntropy = self.kind {
            // KL form avoids cancellation between the two entropy values.
            self.check(w)?;
            self.check(w_tilde)?;
            let floor = T::lit(ENTROPY_FLOOR);
            let sw: T = w.iter().copied().sum();
            let st: T = w_tilde.iter().copied().sum();
            let kl: T = w
                .iter()
                .zip(w_tilde)
                .map(|(&a, &b)| if a > T::zero() { a * (a / b.max(floor)).ln() } else { T::zero() })
                .sum();
            return Ok((kl - sw + st).max(T::zero()));
        }
        let g = self.gradient(w_tilde)?;
        Ok(self.value(w)? - self.value(w_tilde)? - dot(&g, &sub(w, w_tilde)))
    }

    /// `D_Ψ*(x, x̃)` on the dual side.
    pub fn conjugate_bregman(&self, x: &[T], x_tilde: &[T]) -> T {
        let g = self.conjugate_gradient(x_tilde);
        self.conjugate_value(x) - self.conjugate_value(x_tilde) - dot(&g, &sub(x, x_tilde))
    }

    /// Worst `‖∇Ψ*(∇Ψ(w)) − w‖_∞` over the samples; passes at 1e-10.
    pub fn conjugate_pair_check(&self, samples: &[Vec<T>]) -> ConjugateReport {
        let mut worst = 0.0f64;
        for w in samples {
            let r = match self.gradient(w) {
                Ok(x) => norm_inf(&sub(&self.conjugate_gradient(&x), w)).as_f64(),
                Err(_) => f64::INFINITY,
            };
            worst = worst.max(if r.is_nan() { f64::INFINITY } else { r });
        }
        ConjugateReport { max_residual: worst, samples: samples.len(), passed: worst <= 1e-10 }
    }
}

pub fn log_sum_exp<T: Real>(x: &[T]) -> T {
    let m = x.iter().copied().fold(T::neg_infinity(), T::max);
    m + x.iter().map(|&v| (v - m).exp()).sum::<T>().ln()
}

pub fn softmax<T: Real>(x: &[T]) -> Vec<T> {
    let m = x.iter().copied().fold(T::neg_infinity(), T::max);
    let e: Vec<T> = x.iter().map(|&v| (v - m).exp()).collect();
    let s: T = e.iter().copied().sum();
    e.into_iter().map(|v| v / s).collect()
}
