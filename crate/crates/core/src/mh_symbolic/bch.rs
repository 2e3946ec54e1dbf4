//! Corrections `H_n` of the modified Hamiltonian `Σ η^n H_n`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::combinatorics::{bernoulli, factorial};
use crate::scalar::Coeff;

use super::bracket::{ipb_letters, poisson, BracketWord, Letter};
use super::term::{ExactPoly, TermPoly};

fn ratio<C: Coeff>(r: &BigRational) -> C {
    C::from_rational(r)
}

/// Builds `H_0..=H_n` by the recursive BCH formula with `X = F`, `Y = G`:
///
/// `Z_1 = X + Y`,
/// `(m+1) Z_{m+1} = ½{X − Y, Z_m} + Σ_p B_{2p}/(2p)! Σ_{k_1+…+k_{2p}=m} {Z_{k_1}, {…, {Z_{k_{2p}}, X + Y}}}`,
///
/// and `H_j = Z_{j+1}`.
pub fn bch_corrections<C: Coeff>(n: usize) -> Vec<TermPoly<C>> {
    let x = TermPoly::<C>::f(0);
    let y = TermPoly::<C>::g(0);
    let sum = &x + &y;
    let diff = &x - &y;
    let half = C::from_ratio(1, 2);
    let bern: Vec<C> = (0..=n + 1)
        .map(|k| {
            let b = bernoulli(k);
            let fact = BigRational::from_integer(BigInt::from(factorial(k)));
            ratio(&(b / fact))
        })
        .collect();
    // z[k] = Z_k; z[0] unused
    let mut z: Vec<TermPoly<C>> = vec![TermPoly::zero(), sum.clone()];
    let mut nested: HashMap<Vec<usize>, TermPoly<C>> = HashMap::new();
    for m in 1..=n {
        let mut next = poisson(&diff, &z[m]).scale(&half);
        for p in 1..=m / 2 {
            let weight = &bern[2 * p];
            if weight.is_zero() {
                continue;
            }
            for comp in compositions(m, 2 * p) {
                let term = nested_bracket(&comp, &z, &sum, &mut nested);
                next.add_assign_scaled(&term, weight);
            }
        }
        z.push(next.scale(&C::from_ratio(1, (m + 1) as i64)));
    }
    z.into_iter().skip(1).collect()
}

/// `{Z_{k_1}, {Z_{k_2}, …, {Z_{k_last}, X + Y}}}`, memoized by suffix.
fn nested_bracket<C: Coeff>(
    ks: &[usize],
    z: &[TermPoly<C>],
    sum: &TermPoly<C>,
    memo: &mut HashMap<Vec<usize>, TermPoly<C>>,
) -> TermPoly<C> {
    if let Some(v) = memo.get(ks) {
        return v.clone();
    }
    let inner = if ks.len() == 1 { sum.clone() } else { nested_bracket(&ks[1..], z, sum, memo) };
    let v = poisson(&z[ks[0]], &inner);
    memo.insert(ks.to_vec(), v.clone());
    v
}

/// Compositions of `total` into exactly `parts` positive parts.
pub(crate) fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn rec(total: usize, parts: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if parts == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for first in 1..=total.saturating_sub(parts - 1) {
            cur.push(first);
            rec(total - first, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts <= total {
        rec(total, parts, &mut Vec::new(), &mut out);
    }
    out
}

fn cache() -> &'static Mutex<Vec<ExactPoly>> {
    static CACHE: OnceLock<Mutex<Vec<ExactPoly>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(Vec::new()))
}

/// Exact `H_n`, memoized across calls.
pub fn bch_correction(n: usize) -> ExactPoly {
    let mut table = cache().lock().expect("correction cache poisoned");
    if table.len() <= n {
        *table = bch_corrections(n);
    }
    table[n].clone()
}

/// `H_n` by direct enumeration of bracket words of weight `n + 1`:
///
/// `H_n = 1/(n+1) Σ_m (−1)^{m−1}/m Σ {F^{s_1} G^{r_1} … F^{s_m} G^{r_m}} / Π r_i! s_i!`,
///
/// with words led by `F` and nested from the left.
pub fn dynkin_correction<C: Coeff>(n: usize) -> TermPoly<C> {
    let k = n + 1;
    // Collect weights per letter sequence so each bracket is built once.
    let mut weights: HashMap<Vec<Letter>, BigRational> = HashMap::new();
    for word in BracketWord::all_of_weight(k) {
        let m = word.rank();
        let letters = word.letters(Letter::F);
        if letters.len() >= 2 && letters[0] == letters[1] {
            continue;
        }
        let mut d = BigInt::from(1);
        for &e in word.exps() {
            d *= BigInt::from(factorial(e));
        }
        let sign = if m % 2 == 1 { 1 } else { -1 };
        let w = BigRational::new(BigInt::from(sign), d * BigInt::from(m) * BigInt::from(k));
        *weights.entry(letters).or_insert_with(|| BigRational::from_integer(BigInt::from(0))) += w;
    }
    let mut keys: Vec<_> = weights.into_iter().collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out = TermPoly::zero();
    for (letters, w) in keys {
        if num_traits::Zero::is_zero(&w) {
            continue;
        }
        out.add_assign_scaled(&ipb_letters::<C>(&letters), &ratio(&w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        <BigRational as Coeff>::from_ratio(n, d)
    }

    #[test]
    fn low_order_corrections() {
        let f = |k| ExactPoly::f(k);
        let g = |k| ExactPoly::g(k);
        assert_eq!(bch_correction(0), &f(0) + &g(0));
        assert_eq!(bch_correction(1), (&f(1) * &g(1)).scale(&r(-1, 2)));
        let h2 = (&(&f(2) * &g(1).pow(2)) + &(&g(2) * &f(1).pow(2))).scale(&r(1, 12));
        assert_eq!(bch_correction(2), h2);
        // −(1/24)·{{{F,G},G},F} = −(1/24)·2 f_1 f_2 g_1 g_2
        let h3 = (&(&(&f(1) * &f(2)) * &g(1)) * &g(2)).scale(&r(-1, 12));
        assert_eq!(bch_correction(3), h3);
    }

    #[test]
    fn dynkin_agrees_at_low_order() {
        for n in 0..=4 {
            assert_eq!(dynkin_correction::<BigRational>(n), bch_correction(n), "n = {n}");
        }
    }

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(4, 2).len(), 3);
        assert_eq!(compositions(5, 5), vec![vec![1; 5]]);
        assert!(compositions(2, 3).is_empty());
    }
}
