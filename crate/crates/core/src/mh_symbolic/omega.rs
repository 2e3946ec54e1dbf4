//! Taylor coefficients `C_{j,k}` of `H_k` along one symplectic Euler step,
//! the diagonal cancellation check and the remainder constant `Φ(N)`.
//!
//! One step moves `p` by `−η g_1` and `q` by `η φ(η)` with
//! `φ(η) = Σ_t (−η g_1)^t/t! · f_{t+1}` (the Taylor series of `F'(p')`). The
//! factors `g_1` and `φ` are frozen: they multiply the mixed partials of `H_k`
//! after differentiation and are never differentiated themselves.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::combinatorics::{binomial, factorial};

use super::bch::bch_correction;
use super::term::ExactPoly;

/// Caches shared by every `C_{j,k}` evaluation.
#[derive(Default)]
pub struct OmegaEngine {
    /// `∂_p^m ∂_q^l H_k` keyed by `(k, m, l)`.
    partials: HashMap<(usize, usize, usize), ExactPoly>,
    /// `phi_powers[r][t]` is the `η^t` coefficient of `φ(η)^r`.
    phi_powers: Vec<Vec<ExactPoly>>,
    phi_order: usize,
    corrections: Vec<ExactPoly>,
}

fn rational(n: BigInt, d: BigInt) -> BigRational {
    BigRational::new(n, d)
}

impl OmegaEngine {
    pub fn new() -> Self {
        Self::default()
    }

    fn correction(&mut self, k: usize) -> ExactPoly {
        while self.corrections.len() <= k {
            let next = bch_correction(self.corrections.len());
            self.corrections.push(next);
        }
        self.corrections[k].clone()
    }

    fn partial(&mut self, k: usize, m: usize, l: usize) -> ExactPoly {
        if let Some(v) = self.partials.get(&(k, m, l)) {
            return v.clone();
        }
        let v = if m == 0 && l == 0 {
            self.correction(k)
        } else if m > 0 {
            self.partial(k, m - 1, l).diff_p()
        } else {
            self.partial(k, 0, l - 1).diff_q()
        };
        self.partials.insert((k, m, l), v.clone());
        v
    }

    fn phi_series(order: usize) -> Vec<ExactPoly> {
        (0..=order)
            .map(|t| {
                let sign = if t % 2 == 0 { 1 } else { -1 };
                let c = rational(BigInt::from(sign), BigInt::from(factorial(t)));
                (&ExactPoly::g(1).pow(t as u32) * &ExactPoly::f(t as u16 + 1)).scale(&c)
            })
            .collect()
    }

    /// Ensures `φ^r` is tabulated to `η^order` for `r ≤ max_power`.
    fn ensure_phi(&mut self, max_power: usize, order: usize) {
        if self.phi_powers.len() > max_power && self.phi_order >= order {
            return;
        }
        let order = order.max(self.phi_order);
        let phi = Self::phi_series(order);
        let mut powers = vec![{
            let mut one = vec![ExactPoly::zero(); order + 1];
            one[0] = ExactPoly::constant(BigRational::from_integer(BigInt::from(1)));
            one
        }];
        for r in 1..=max_power.max(self.phi_powers.len().saturating_sub(1)) {
            let prev = &powers[r - 1];
            let mut next = vec![ExactPoly::zero(); order + 1];
            for (a, pa) in prev.iter().enumerate() {
                if pa.is_zero() {
                    continue;
                }
                for (b, pb) in phi.iter().enumerate().take(order + 1 - a) {
                    next[a + b] = &next[a + b] + &(pa * pb);
                }
            }
            powers.push(next);
        }
        self.phi_powers = powers;
        self.phi_order = order;
    }

    /// `C_{j,k}`, the `η^j` coefficient of `H_k(p', q') − H_k(p, q)`.
    pub fn coefficient(&mut self, j: usize, k: usize) -> ExactPoly {
        assert!(j >= 1, "C_{{j,k}} is defined for j ≥ 1");
        self.ensure_phi(j, j);
        let g1 = ExactPoly::g(1);
        let mut out = ExactPoly::zero();
        for i in 1..=j {
            let inv_fact = BigInt::from(factorial(i));
            for m in 0..=i {
                if self.phi_powers[i - m][j - i].is_zero() {
                    continue;
                }
                let deriv = self.partial(k, m, i - m);
                if deriv.is_zero() {
                    continue;
                }
                let sign = if m % 2 == 0 { 1 } else { -1 };
                let c = rational(BigInt::from(sign) * BigInt::from(binomial(i, m)), inv_fact.clone());
                let frozen = &g1.pow(m as u32) * &self.phi_powers[i - m][j - i];
                out.add_assign_scaled(&(&deriv * &frozen), &c);
            }
        }
        out
    }

    /// `Σ_{j=0}^{i} C_{i+1−j, j}`, the `η^{i+1}` change of `Σ η^k H_k` over one step.
    pub fn diagonal(&mut self, i: usize) -> ExactPoly {
        let mut total = ExactPoly::zero();
        for j in 0..=i {
            total = &total + &self.coefficient(i + 1 - j, j);
        }
        total
    }

    /// `Φ(N) = Σ_{m=0}^{N} ‖C_{N+2−m, m}‖_1`.
    pub fn phi_bound(&mut self, n: usize) -> BigRational {
        (0..=n)
            .map(|m| self.coefficient(n + 2 - m, m).l1_norm())
            .fold(<BigRational as Zero>::zero(), |a, b| a + b)
    }
}

/// `C_{j,k}` with a fresh cache.
pub fn omega_coefficient(j: usize, k: usize) -> ExactPoly {
    OmegaEngine::new().coefficient(j, k)
}

#[derive(Clone, Debug)]
pub struct CancellationReport {
    pub max_order: usize,
    /// Orders `i` checked, each with whether its diagonal vanished.
    pub levels: Vec<(usize, bool)>,
    /// First nonzero diagonal, if any.
    pub witness: Option<(usize, ExactPoly)>,
}

impl CancellationReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Checks that every diagonal `Σ_j C_{i+1−j, j}` with `i ≤ n` is exactly zero.
pub fn cancellation_check(n: usize) -> CancellationReport {
    let mut engine = OmegaEngine::new();
    cancellation_check_with(&mut engine, n, |_, _| {})
}

/// As [`cancellation_check`], reporting each finished level through `progress`.
pub fn cancellation_check_with(
    engine: &mut OmegaEngine,
    n: usize,
    mut progress: impl FnMut(usize, bool),
) -> CancellationReport {
    let mut levels = Vec::new();
    let mut witness = None;
    for i in 0..=n {
        let d = engine.diagonal(i);
        let ok = d.is_zero();
        progress(i, ok);
        levels.push((i, ok));
        if !ok && witness.is_none() {
            witness = Some((i, d));
        }
    }
    CancellationReport { max_order: n, levels, witness }
}

/// Exact `Φ(n)`.
pub fn phi_bound(n: usize) -> BigRational {
    OmegaEngine::new().phi_bound(n)
}
