//! Polynomials in the derivative symbols `f_k = F^(k)(p)` and `g_k = G^(k)(q)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use crate::scalar::{Coeff, Real};

/// `F(k)` stands for `f_k`, `G(k)` for `g_k`; `F` symbols sort before `G` symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    F(u16),
    G(u16),
}

impl fmt::Display for Symbol {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::F(k) => write!(out, "f_{k}"),
            Symbol::G(k) => write!(out, "g_{k}"),
        }
    }
}

/// Sorted list of `(symbol, exponent)` with positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn symbol(s: Symbol) -> Self {
        Monomial(vec![(s, 1)])
    }

    /// Builds from arbitrary factors, merging repeats.
    pub fn from_factors(factors: &[(Symbol, u32)]) -> Self {
        let mut m = Monomial::one();
        for &(s, e) in factors {
            if e > 0 {
                m = m.mul(&Monomial(vec![(s, e)]));
            }
        }
        m
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, s: Symbol) -> u32 {
        self.0.iter().find(|(t, _)| *t == s).map_or(0, |&(_, e)| e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Derivative with respect to `p` (`want_f`) or `q`: a sum of
    /// `(multiplicity, monomial)` terms by the product rule.
    fn derivative(&self, want_f: bool) -> Vec<(u32, Monomial)> {
        let mut out = Vec::new();
        for (idx, &(s, e)) in self.0.iter().enumerate() {
            let next = match (s, want_f) {
                (Symbol::F(k), true) => Symbol::F(k + 1),
                (Symbol::G(k), false) => Symbol::G(k + 1),
                _ => continue,
            };
            let mut rest = self.0.clone();
            if e == 1 {
                rest.remove(idx);
            } else {
                rest[idx].1 = e - 1;
            }
            out.push((e, Monomial(rest).mul(&Monomial::symbol(next))));
        }
        out
    }

    pub fn eval<T: Real>(&self, f: &[T], g: &[T]) -> T {
        self.0.iter().fold(T::one(), |acc, &(s, e)| {
            let v = match s {
                Symbol::F(k) => f[k as usize],
                Symbol::G(k) => g[k as usize],
            };
            acc * v.powi(e as i32)
        })
    }

    /// Highest derivative index of an `f` and a `g` symbol.
    pub fn max_orders(&self) -> (usize, usize) {
        let mut m = (0, 0);
        for &(s, _) in &self.0 {
            match s {
                Symbol::F(k) => m.0 = m.0.max(k as usize),
                Symbol::G(k) => m.1 = m.1.max(k as usize),
            }
        }
        m
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(s, e)| format!("{s}^{e}")).collect();
        write!(out, "{}", parts.join(" * "))
    }
}

/// Sparse polynomial with canonical term order and no zero coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct TermPoly<C> {
    terms: BTreeMap<Monomial, C>,
}

pub type ExactPoly = TermPoly<BigRational>;

impl<C: Coeff> Default for TermPoly<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coeff> TermPoly<C> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn monomial(m: Monomial, c: C) -> Self {
        let mut t = Self::zero();
        t.add_term(m, c);
        t
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::monomial(Monomial::symbol(s), C::one())
    }

    pub fn f(k: u16) -> Self {
        Self::symbol(Symbol::F(k))
    }

    pub fn g(k: u16) -> Self {
        Self::symbol(Symbol::G(k))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, s: &C) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.mul(s));
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(m, c)| (m.clone(), c.mul(s))).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(C::one());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    fn derivative(&self, want_f: bool) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            for (mult, dm) in m.derivative(want_f) {
                out.add_term(dm, c.mul(&C::from_ratio(mult as i64, 1)));
            }
        }
        out
    }

    /// `∂/∂p`, sending `f_k ↦ f_{k+1}` and annihilating `g_k`.
    pub fn diff_p(&self) -> Self {
        self.derivative(true)
    }

    /// `∂/∂q`, sending `g_k ↦ g_{k+1}` and annihilating `f_k`.
    pub fn diff_q(&self) -> Self {
        self.derivative(false)
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> C {
        self.terms.values().fold(C::zero(), |acc, c| acc.add(&c.abs()))
    }

    /// Substitutes `f_k ← f[k]`, `g_k ← g[k]`.
    pub fn eval<T: Real>(&self, f: &[T], g: &[T]) -> T {
        self.terms.iter().map(|(m, c)| T::lit(c.to_f64()) * m.eval(f, g)).sum()
    }

    /// Highest derivative indices of `f` and `g` appearing in any term.
    pub fn max_orders(&self) -> (usize, usize) {
        self.terms.keys().fold((0, 0), |acc, m| {
            let o = m.max_orders();
            (acc.0.max(o.0), acc.1.max(o.1))
        })
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> TermPoly<D> {
        let mut out = TermPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// One line per term, `coeff * f_i^a * g_j^b`, in canonical order.
    pub fn to_term_list(&self) -> Vec<String> {
        self.terms
            .iter()
            .map(|(m, c)| if m.0.is_empty() { format!("{c}") } else { format!("{c} * {m}") })
            .collect()
    }
}

impl<C: Coeff> fmt::Display for TermPoly<C> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(out, "0");
        }
        write!(out, "{}", self.to_term_list().join(" + "))
    }
}

impl<C: Coeff> Add for &TermPoly<C> {
    type Output = TermPoly<C>;
    fn add(self, rhs: &TermPoly<C>) -> TermPoly<C> {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &C::one());
        out
    }
}

impl<C: Coeff> Sub for &TermPoly<C> {
    type Output = TermPoly<C>;
    fn sub(self, rhs: &TermPoly<C>) -> TermPoly<C> {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &C::one().neg());
        out
    }
}

impl<C: Coeff> Neg for &TermPoly<C> {
    type Output = TermPoly<C>;
    fn neg(self) -> TermPoly<C> {
        self.scale(&C::one().neg())
    }
}

impl<C: Coeff> Mul for &TermPoly<C> {
    type Output = TermPoly<C>;
    fn mul(self, rhs: &TermPoly<C>) -> TermPoly<C> {
        let mut out = TermPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }
}
