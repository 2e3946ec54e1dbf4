//! Exact Stirling, Fubini and Bernoulli numbers, the composition identity
//! `Σ k!/Π r_i!s_i! = n!·2^k·S(k,n)`, and the backseat sum with its bound.

use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::mh_symbolic::{ipb, BracketWord, ExactPoly, Letter, Symbol};
use crate::scalar::Coeff;

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - i) / BigUint::from(i + 1))
}

fn stirling_table() -> &'static Mutex<Vec<Vec<BigUint>>> {
    static TABLE: OnceLock<Mutex<Vec<Vec<BigUint>>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![vec![BigUint::one()]]))
}

/// Stirling number of the second kind `S(k, n)`; zero outside `0 ≤ n ≤ k`.
pub fn stirling2(k: usize, n: usize) -> BigUint {
    if n > k {
        return BigUint::zero();
    }
    let mut table = stirling_table().lock().expect("stirling table poisoned");
    while table.len() <= k {
        let prev = table.last().unwrap().clone();
        let m = prev.len();
        let row: Vec<BigUint> = (0..=m)
            .map(|j| {
                let same = if j < m { &prev[j] * BigUint::from(j) } else { BigUint::zero() };
                let down = if j > 0 { prev[j - 1].clone() } else { BigUint::zero() };
                same + down
            })
            .collect();
        table.push(row);
    }
    table[k][n].clone()
}

/// Fubini (ordered Bell) number `a_n = Σ_m m!·S(n, m)`.
pub fn fubini(n: usize) -> BigUint {
    (0..=n).map(|m| factorial(m) * stirling2(n, m)).sum()
}

/// `Σ k!/Π r_i! s_i!` over all `(r_1, s_1, …, r_n, s_n)` with `r_i + s_i > 0`
/// summing to `k`, by direct enumeration.
pub fn lemma1_lhs(k: usize, n: usize) -> BigUint {
    fn rec(pairs_left: usize, remaining: usize, denom: &BigUint, kf: &BigUint, acc: &mut BigUint) {
        if pairs_left == 0 {
            if remaining == 0 {
                *acc += kf / denom;
            }
            return;
        }
        // leave at least one letter for every remaining pair
        for total in 1..=remaining.saturating_sub(pairs_left - 1) {
            for r in 0..=total {
                let d = denom * factorial(r) * factorial(total - r);
                rec(pairs_left - 1, remaining - total, &d, kf, acc);
            }
        }
    }
    if n == 0 || n > k {
        return BigUint::zero();
    }
    let mut acc = BigUint::zero();
    rec(n, k, &BigUint::one(), &factorial(k), &mut acc);
    acc
}

/// `n!·2^k·S(k, n)`.
pub fn lemma1_rhs(k: usize, n: usize) -> BigUint {
    factorial(n) * (BigUint::one() << k) * stirling2(k, n)
}

/// Bernoulli numbers by the Akiyama–Tanigawa algorithm (with `B_1 = +1/2`).
pub fn bernoulli(n: usize) -> BigRational {
    let mut a: Vec<BigRational> = (0..=n).map(|m| BigRational::new(BigInt::one(), BigInt::from(m + 1))).collect();
    for m in 0..=n {
        a[m] = BigRational::new(BigInt::one(), BigInt::from(m + 1));
        for j in (1..=m).rev() {
            a[j - 1] = BigRational::from_integer(BigInt::from(j)) * (&a[j - 1] - &a[j]);
        }
    }
    a[0].clone()
}

/// Independent formula `B_n = Σ_m (−1)^m m!·S(n, m)/(m + 1)` (with `B_1 = −1/2`).
pub fn bernoulli_via_stirling(n: usize) -> BigRational {
    (0..=n)
        .map(|m| {
            let sign = if m % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            let num = sign * BigInt::from(factorial(m) * stirling2(n, m));
            BigRational::new(num, BigInt::from(m + 1))
        })
        .fold(<BigRational as Zero>::zero(), |a, b| a + b)
}

/// Growth base `(2 + r + √(r(4 + r)))/2` of the backseat sum.
pub fn backseat_base(r: f64) -> f64 {
    (2.0 + r + (r * (4.0 + r)).sqrt()) / 2.0
}

/// `log Σ_{n=1}^k Π_{m=0}^{n−1} r(k² − m²)/(n² − m²)`, accumulated in log space.
pub fn backseat_log_sum(k: usize, r: f64) -> Result<f64> {
    if k == 0 || !(r > 0.0) {
        return Err(Error::InvalidArgument("backseat sum needs k ≥ 1 and r > 0".into()));
    }
    let kk = (k * k) as f64;
    let logs: Vec<f64> = (1..=k)
        .map(|n| {
            let nn = (n * n) as f64;
            (0..n).map(|m| (r * (kk - (m * m) as f64) / (nn - (m * m) as f64)).ln()).sum()
        })
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(top + logs.iter().map(|l| (l - top).exp()).sum::<f64>().ln())
}

/// The backseat sum in plain floating point; overflows are reported.
pub fn backseat_sum(k: usize, r: f64) -> Result<f64> {
    if k == 0 || !(r > 0.0) {
        return Err(Error::InvalidArgument("backseat sum needs k ≥ 1 and r > 0".into()));
    }
    let kk = (k * k) as f64;
    let mut total = 0.0;
    for n in 1..=k {
        let nn = (n * n) as f64;
        let prod: f64 = (0..n).map(|m| r * (kk - (m * m) as f64) / (nn - (m * m) as f64)).product();
        total += prod;
    }
    if total.is_finite() {
        Ok(total)
    } else {
        Err(Error::Overflow(format!("backseat sum for k = {k}, r = {r}; use the log form")))
    }
}

/// `k·((2 + r + √(r(4 + r)))/2)^k`.
pub fn backseat_bound(k: usize, r: f64) -> f64 {
    k as f64 * backseat_base(r).powi(k as i32)
}

pub fn backseat_log_bound(k: usize, r: f64) -> f64 {
    (k as f64).ln() + k as f64 * backseat_base(r).ln()
}

/// Value of an IPB for `F = a p²`, `G = b q²` at `(p, q) = (1, 1)`.
pub fn quadratic_ipb_value(word: &BracketWord, leading: Letter, a: &BigRational, b: &BigRational) -> BigRational {
    let poly: ExactPoly = ipb(word, leading);
    let two = BigRational::from_integer(BigInt::from(2));
    let f = [a.clone(), &two * a, &two * a];
    let g = [b.clone(), &two * b, &two * b];
    let mut total = <BigRational as Zero>::zero();
    for (m, c) in poly.terms() {
        let mut v = c.clone();
        for &(s, e) in m.factors() {
            let base = match s {
                Symbol::F(k) if (k as usize) < 3 => f[k as usize].clone(),
                Symbol::G(k) if (k as usize) < 3 => g[k as usize].clone(),
                _ => <BigRational as Zero>::zero(),
            };
            v *= num_traits::pow(base, e as usize);
        }
        total += v;
    }
    total
}

/// Outcome of [`quadratic_ipb_bound_check`].
#[derive(Clone, Debug)]
pub struct IpbBoundReport {
    pub words_checked: usize,
    pub worst_ratio: f64,
    pub passed: bool,
}

/// Checks `|IPB(1, 1)| ≤ (max{4a, 4b})^weight` for every word of weight ≤ `max_weight`.
pub fn quadratic_ipb_bound_check(a: f64, b: f64, max_weight: usize) -> Result<IpbBoundReport> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidArgument("quadratic coefficients must be positive".into()));
    }
    let ar = BigRational::from_float(a).ok_or(Error::NonFinite("a"))?;
    let br = BigRational::from_float(b).ok_or(Error::NonFinite("b"))?;
    let base = 4.0 * a.max(b);
    let mut worst = 0.0f64;
    let mut count = 0;
    for w in 1..=max_weight {
        let bound = base.powi(w as i32);
        for word in BracketWord::all_of_weight(w) {
            for leading in [Letter::F, Letter::G] {
                let v = quadratic_ipb_value(&word, leading, &ar, &br);
                worst = worst.max(ToPrimitive::to_f64(&Signed::abs(&v)).unwrap_or(f64::INFINITY) / bound);
                count += 1;
            }
        }
    }
    Ok(IpbBoundReport { words_checked: count, worst_ratio: worst, passed: worst <= 1.0 })
}

/// `|{G F G F … G F}|` (n alternating pairs) for `F = p⁴`, `G = q⁴` at `(1, 1)`.
pub fn quartic_alternating_ipb(n: usize) -> BigInt {
    let word = BracketWord::new(vec![1; 2 * n]).expect("alternating word is well formed");
    let poly: ExactPoly = ipb(&word, Letter::G);
    // p⁴ has derivatives 1, 4, 12, 24, 24 at p = 1
    let derivs = [1i64, 4, 12, 24, 24];
    let mut total = <BigRational as Zero>::zero();
    for (m, c) in poly.terms() {
        let mut v = c.clone();
        for &(s, e) in m.factors() {
            let k = match s {
                Symbol::F(k) | Symbol::G(k) => k as usize,
            };
            let d = derivs.get(k).copied().unwrap_or(0);
            v *= num_traits::pow(<BigRational as Coeff>::from_ratio(d, 1), e as usize);
        }
        total += v;
    }
    Signed::abs(&total).to_integer()
}

/// `(n + 1)(2n)!·4^(2n−1)`.
pub fn quartic_alternating_formula(n: usize) -> BigInt {
    BigInt::from(n + 1) * BigInt::from(factorial(2 * n)) * num_traits::pow(BigInt::from(4), 2 * n - 1)
}
