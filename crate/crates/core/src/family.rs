//! Smooth scalar functions `F: ℝ^d → ℝ` with derivative oracles.
//!
//! Built-in non-quadratic kinds act coordinate-wise, `F(x) = Σ φ(x_i)`, so
//! their Hessians are diagonal and the d = 1 case is just `φ`.

use std::fmt::Debug;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// User-supplied function with optional higher derivatives.
pub trait ScalarOracle<T>: Send + Sync + Debug {
    fn value(&self, x: &[T]) -> T;
    fn gradient(&self, x: &[T]) -> Vec<T>;
    fn hessian(&self, _x: &[T]) -> Option<Matrix<T>> {
        None
    }
    /// `Σ_jk ∂³F/∂x_i∂x_j∂x_k u_j v_k`.
    fn third_contract(&self, _x: &[T], _u: &[T], _v: &[T]) -> Option<Vec<T>> {
        None
    }
    /// k-th derivative of a one-dimensional function.
    fn derivative(&self, _x: T, _k: usize) -> Option<T> {
        None
    }
}

#[derive(Clone, Debug)]
pub enum FamilyKind<T> {
    /// `xᵀBx` with `B` symmetric.
    Quadratic(Matrix<T>),
    /// `Σ log cosh(x_i)`.
    LogCosh,
    /// `Σ log(shift + x_i)`.
    Log { shift: T },
    /// `Σ scale·|x_i|^exponent`.
    Power { exponent: T, scale: T },
    Custom(Arc<dyn ScalarOracle<T>>),
}

#[derive(Clone, Debug)]
pub struct SmoothScalarFamily<T> {
    kind: FamilyKind<T>,
    max_order: usize,
}

pub const LOGCOSH_MAX_ORDER: usize = 12;
const UNBOUNDED_ORDER: usize = 64;

impl<T: Real> SmoothScalarFamily<T> {
    pub fn quadratic(b: Matrix<T>) -> Self {
        assert!(b.is_square(), "quadratic coefficient must be square");
        Self { kind: FamilyKind::Quadratic(b.symmetrized()), max_order: usize::MAX }
    }

    /// `a·x²` in one dimension.
    pub fn quadratic_1d(a: T) -> Self {
        Self::quadratic(Matrix::scalar(a))
    }

    pub fn log_cosh() -> Self {
        Self { kind: FamilyKind::LogCosh, max_order: LOGCOSH_MAX_ORDER }
    }

    pub fn log(shift: T) -> Self {
        Self { kind: FamilyKind::Log { shift }, max_order: UNBOUNDED_ORDER }
    }

    /// `|x|^exponent`.
    pub fn power(exponent: T) -> Self {
        Self::scaled_power(exponent, T::one())
    }

    /// `|x|^exponent / exponent`, whose derivative is `sign(x)|x|^(exponent-1)`.
    pub fn normalized_power(exponent: T) -> Self {
        Self::scaled_power(exponent, T::one() / exponent)
    }

    pub fn scaled_power(exponent: T, scale: T) -> Self {
        Self { kind: FamilyKind::Power { exponent, scale }, max_order: UNBOUNDED_ORDER }
    }

    pub fn custom(oracle: Arc<dyn ScalarOracle<T>>, max_order: usize) -> Self {
        Self { kind: FamilyKind::Custom(oracle), max_order }
    }

    pub fn kind(&self) -> &FamilyKind<T> {
        &self.kind
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// Coefficient matrix for quadratic kinds.
    pub fn quadratic_matrix(&self) -> Option<&Matrix<T>> {
        match &self.kind {
            FamilyKind::Quadratic(b) => Some(b),
            _ => None,
        }
    }

    /// Fixed dimension, if the kind has one.
    pub fn fixed_dim(&self) -> Option<usize> {
        self.quadratic_matrix().map(|b| b.rows())
    }

    pub fn value(&self, x: &[T]) -> T {
        match &self.kind {
            FamilyKind::Quadratic(b) => b.bilinear(x, x),
            FamilyKind::Custom(o) => o.value(x),
            _ => x.iter().map(|&xi| self.univariate(xi, 0)).sum(),
        }
    }

    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        match &self.kind {
            FamilyKind::Quadratic(b) => b.mul_vec(x).into_iter().map(|v| v + v).collect(),
            FamilyKind::Custom(o) => o.gradient(x),
            _ => x.iter().map(|&xi| self.univariate(xi, 1)).collect(),
        }
    }

    pub fn hessian(&self, x: &[T]) -> Result<Matrix<T>> {
        self.check_order(2)?;
        match &self.kind {
            FamilyKind::Quadratic(b) => Ok(b.scale(T::lit(2.0))),
            FamilyKind::Custom(o) => {
                o.hessian(x).ok_or(Error::OracleOrderExceeded { requested: 2, available: 1 })
            }
            _ => Ok(Matrix::diag(&x.iter().map(|&xi| self.univariate(xi, 2)).collect::<Vec<_>>())),
        }
    }

    /// Third-derivative tensor contracted with `u` and `v` in its last two slots.
    pub fn third_contract(&self, x: &[T], u: &[T], v: &[T]) -> Result<Vec<T>> {
        self.check_order(3)?;
        match &self.kind {
            FamilyKind::Quadratic(_) => Ok(vec![T::zero(); x.len()]),
            FamilyKind::Custom(o) => {
                o.third_contract(x, u, v).ok_or(Error::OracleOrderExceeded { requested: 3, available: 2 })
            }
            _ => Ok((0..x.len()).map(|i| self.univariate(x[i], 3) * u[i] * v[i]).collect()),
        }
    }

    /// k-th derivative of the one-dimensional function.
    pub fn derivative(&self, x: T, k: usize) -> Result<T> {
        self.check_order(k)?;
        match &self.kind {
            FamilyKind::Quadratic(b) => {
                if b.rows() != 1 {
                    return Err(Error::DimensionMismatch { expected: 1, got: b.rows() });
                }
                let a = b[(0, 0)];
                Ok(match k {
                    0 => a * x * x,
                    1 => T::lit(2.0) * a * x,
                    2 => T::lit(2.0) * a,
                    _ => T::zero(),
                })
            }
            FamilyKind::Custom(o) => o
                .derivative(x, k)
                .ok_or(Error::OracleOrderExceeded { requested: k, available: 0 }),
            _ => Ok(self.univariate(x, k)),
        }
    }

    /// Derivatives of orders `0..=n` at `x`.
    pub fn derivatives(&self, x: T, n: usize) -> Result<Vec<T>> {
        (0..=n).map(|k| self.derivative(x, k)).collect()
    }

    fn check_order(&self, k: usize) -> Result<()> {
        if k > self.max_order {
            Err(Error::OracleOrderExceeded { requested: k, available: self.max_order })
        } else {
            Ok(())
        }
    }

    fn univariate(&self, x: T, k: usize) -> T {
        match &self.kind {
            FamilyKind::LogCosh => log_cosh_derivative(x, k),
            FamilyKind::Log { shift } => {
                let s = *shift + x;
                if !(s > T::zero()) {
                    return T::nan();
                }
                if k == 0 {
                    return s.ln();
                }
                let sign = if k % 2 == 1 { T::one() } else { -T::one() };
                let fact: T = (1..k).map(|i| T::lit(i as f64)).fold(T::one(), |a, b| a * b);
                sign * fact / s.powi(k as i32)
            }
            FamilyKind::Power { exponent, scale } => {
                let e = *exponent;
                let mut falling = T::one();
                for i in 0..k {
                    falling = falling * (e - T::lit(i as f64));
                }
                if falling == T::zero() {
                    return T::zero();
                }
                let sign = if k % 2 == 1 { x.signum() } else { T::one() };
                *scale * falling * x.abs().powf(e - T::lit(k as f64)) * sign
            }
            FamilyKind::Quadratic(_) | FamilyKind::Custom(_) => unreachable!("handled by caller"),
        }
    }
}

/// Coefficients (ascending powers of `t = tanh x`) of `d^k/dx^k log cosh x` for `k ≥ 1`,
/// from `P_1 = t`, `P_{k+1} = P_k'·(1 - t²)`.
fn tanh_polynomials() -> &'static Vec<Vec<f64>> {
    static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = vec![vec![0.0], vec![0.0, 1.0]];
        for k in 1..=LOGCOSH_MAX_ORDER {
            let prev = &table[k];
            let deriv: Vec<f64> = (1..prev.len()).map(|i| i as f64 * prev[i]).collect();
            let mut next = vec![0.0; deriv.len() + 2];
            for (i, &c) in deriv.iter().enumerate() {
                next[i] += c;
                next[i + 2] -= c;
            }
            table.push(next);
        }
        table
    })
}

fn log_cosh_derivative<T: Real>(x: T, k: usize) -> T {
    if k == 0 {
        let ax = x.abs();
        return ax + (T::lit(-2.0) * ax).exp().ln_1p() - T::LN_2();
    }
    let t = x.tanh();
    let coeffs = &tanh_polynomials()[k];
    coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * t + T::lit(c))
}

/// Contracted third derivative via the full gradient oracle of the Hessian, used
/// only when checking oracles: `(H(x + h v) - H(x - h v)) u / 2h`.
pub fn third_contract_fd<T: Real>(f: &SmoothScalarFamily<T>, x: &[T], u: &[T], v: &[T]) -> Result<Vec<T>> {
    let h = T::lit(1e-4);
    let plus: Vec<T> = x.iter().zip(v).map(|(&a, &b)| a + h * b).collect();
    let minus: Vec<T> = x.iter().zip(v).map(|(&a, &b)| a - h * b).collect();
    let hp = f.hessian(&plus)?.mul_vec(u);
    let hm = f.hessian(&minus)?.mul_vec(u);
    Ok(hp.iter().zip(&hm).map(|(&a, &b)| (a - b) / (h + h)).collect())
}
