//! Numeric evaluation of truncated modified Hamiltonians `Σ_{j≤N} η^j H_j`.

use crate::error::{Error, Result};
use crate::hamiltonian::SeparableHamiltonian;
use crate::linalg::dot;
use crate::phase::PhasePoint;
use crate::scalar::Real;

use super::bch::bch_correction;
use super::term::ExactPoly;

/// `H_0..=H_N` compiled for repeated evaluation in one dimension.
#[derive(Clone, Debug)]
pub struct TruncatedMh {
    corrections: Vec<ExactPoly>,
    /// Highest derivative order any `H_j` needs.
    order_needed: usize,
}

impl TruncatedMh {
    pub fn new(n: usize) -> Self {
        let corrections: Vec<ExactPoly> = (0..=n).map(bch_correction).collect();
        let order_needed = corrections
            .iter()
            .map(|h| {
                let (a, b) = h.max_orders();
                a.max(b)
            })
            .max()
            .unwrap_or(0);
        Self { corrections, order_needed }
    }

    pub fn order(&self) -> usize {
        self.corrections.len() - 1
    }

    pub fn corrections(&self) -> &[ExactPoly] {
        &self.corrections
    }

    /// Per-order terms `η^j H_j(z)` for `j = 0..=N`.
    pub fn terms<T: Real>(&self, h: &SeparableHamiltonian<T>, z: &PhasePoint<T>, eta: T) -> Result<Vec<T>> {
        if h.dim() != 1 || z.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: z.dim() });
        }
        let f = h.f().derivatives(z.p()[0], self.order_needed)?;
        let g = h.g().derivatives(z.q()[0], self.order_needed)?;
        let mut pow = T::one();
        let mut out = Vec::with_capacity(self.corrections.len());
        for hj in &self.corrections {
            out.push(pow * hj.eval(&f, &g));
            pow = pow * eta;
        }
        Ok(out)
    }

    pub fn eval<T: Real>(&self, h: &SeparableHamiltonian<T>, z: &PhasePoint<T>, eta: T) -> Result<T> {
        Ok(self.terms(h, z, eta)?.into_iter().sum())
    }

    /// Every partial sum `H̃^(0), …, H̃^(N)` at once.
    pub fn partial_sums<T: Real>(&self, h: &SeparableHamiltonian<T>, z: &PhasePoint<T>, eta: T) -> Result<Vec<T>> {
        let mut acc = T::zero();
        Ok(self
            .terms(h, z, eta)?
            .into_iter()
            .map(|t| {
                acc = acc + t;
                acc
            })
            .collect())
    }
}

/// `H̃^(N)(z) = Σ_{j≤N} η^j H_j(z)` for a one-dimensional Hamiltonian.
pub fn truncated_mh_eval<T: Real>(h: &SeparableHamiltonian<T>, z: &PhasePoint<T>, eta: T, n: usize) -> Result<T> {
    TruncatedMh::new(n).eval(h, z, eta)
}

/// `H̃^(N)` for `N ≤ 3` in any dimension, from gradients and Hessians:
///
/// `F + G − (η/2)∇F·∇G + (η²/12)(∇Gᵀ F'' ∇G + ∇Fᵀ G'' ∇F) − (η³/12) ∇Fᵀ G'' F'' ∇G`.
pub fn general_d_truncation_eval<T: Real>(h: &SeparableHamiltonian<T>, z: &PhasePoint<T>, eta: T, n: usize) -> Result<T> {
    if n > 3 {
        return Err(Error::InvalidArgument(format!("general-dimension evaluator supports N ≤ 3, got {n}")));
    }
    if z.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), got: z.dim() });
    }
    let mut total = h.value(z);
    if n == 0 {
        return Ok(total);
    }
    let df = h.grad_f(z.p())?;
    let dg = h.grad_g(z.q())?;
    total = total - eta * T::lit(0.5) * dot(&df, &dg);
    if n == 1 {
        return Ok(total);
    }
    let hf = h.f().hessian(z.p())?;
    let hg = h.g().hessian(z.q())?;
    let eta2 = eta * eta;
    total = total + eta2 / T::lit(12.0) * (hf.bilinear(&dg, &dg) + hg.bilinear(&df, &df));
    if n == 2 {
        return Ok(total);
    }
    let hf_dg = hf.mul_vec(&dg);
    let hg_hf_dg = hg.mul_vec(&hf_dg);
    Ok(total - eta2 * eta / T::lit(12.0) * dot(&df, &hg_hf_dg))
}
