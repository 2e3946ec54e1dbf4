//! Poisson brackets and iterated brackets of `F` and `G`.

use crate::error::{Error, Result};
use crate::scalar::Coeff;

use super::term::TermPoly;

/// `{u, v} = −∂_p u·∂_q v + ∂_q u·∂_p v`.
pub fn poisson<C: Coeff>(u: &TermPoly<C>, v: &TermPoly<C>) -> TermPoly<C> {
    &(&u.diff_q() * &v.diff_p()) - &(&u.diff_p() * &v.diff_q())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    F,
    G,
}

impl Letter {
    pub fn other(self) -> Letter {
        match self {
            Letter::F => Letter::G,
            Letter::G => Letter::F,
        }
    }

    pub fn poly<C: Coeff>(self) -> TermPoly<C> {
        match self {
            Letter::F => TermPoly::f(0),
            Letter::G => TermPoly::g(0),
        }
    }
}

/// `{u, F} = f_1·∂_q u` and `{u, G} = −g_1·∂_p u`.
pub fn bracket_with<C: Coeff>(u: &TermPoly<C>, letter: Letter) -> TermPoly<C> {
    match letter {
        Letter::F => &u.diff_q() * &TermPoly::f(1),
        Letter::G => -&(&u.diff_p() * &TermPoly::g(1)),
    }
}

/// Exponent tuple `(r_1, s_1, …, r_n, s_n)` of an iterated bracket.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BracketWord {
    exps: Vec<usize>,
}

impl BracketWord {
    pub fn new(exps: Vec<usize>) -> Result<Self> {
        if exps.is_empty() || exps.len() % 2 != 0 {
            return Err(Error::InvalidArgument(format!("bracket word needs an even, nonzero length: {exps:?}")));
        }
        if exps.chunks(2).any(|c| c[0] + c[1] == 0) {
            return Err(Error::InvalidArgument(format!("empty pair in bracket word {exps:?}")));
        }
        Ok(Self { exps })
    }

    pub fn exps(&self) -> &[usize] {
        &self.exps
    }

    /// Number of pairs.
    pub fn rank(&self) -> usize {
        self.exps.len() / 2
    }

    /// Total number of letters `Σ (r_i + s_i)`.
    pub fn weight(&self) -> usize {
        self.exps.iter().sum()
    }

    /// Letter sequence: `r_1` copies of `leading`, `s_1` of the other letter, and so on.
    pub fn letters(&self, leading: Letter) -> Vec<Letter> {
        let mut out = Vec::with_capacity(self.weight());
        for pair in self.exps.chunks(2) {
            out.extend(std::iter::repeat(leading).take(pair[0]));
            out.extend(std::iter::repeat(leading.other()).take(pair[1]));
        }
        out
    }

    /// All words of the given weight, in lexicographic order of their exponents.
    pub fn all_of_weight(weight: usize) -> Vec<BracketWord> {
        fn rec(remaining: usize, current: &mut Vec<usize>, out: &mut Vec<BracketWord>) {
            if remaining == 0 {
                if !current.is_empty() {
                    out.push(BracketWord { exps: current.clone() });
                }
                return;
            }
            for total in 1..=remaining {
                for r in 0..=total {
                    current.push(r);
                    current.push(total - r);
                    rec(remaining - total, current, out);
                    current.pop();
                    current.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(weight, &mut Vec::new(), &mut out);
        out
    }
}

/// Left-nested bracket of a letter sequence; a single letter is returned as is.
pub fn ipb_letters<C: Coeff>(letters: &[Letter]) -> TermPoly<C> {
    let Some((&first, rest)) = letters.split_first() else {
        return TermPoly::zero();
    };
    let mut acc = first.poly();
    for &l in rest {
        if acc.is_zero() {
            break;
        }
        acc = bracket_with(&acc, l);
    }
    acc
}

/// `{G^{r_1} F^{s_1} …}` for `leading = G`, or with the roles swapped for `leading = F`.
pub fn ipb<C: Coeff>(word: &BracketWord, leading: Letter) -> TermPoly<C> {
    ipb_letters(&word.letters(leading))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mh_symbolic::term::ExactPoly;

    #[test]
    fn base_brackets() {
        let f = ExactPoly::f(0);
        let g = ExactPoly::g(0);
        assert_eq!(poisson(&f, &g), -&(&ExactPoly::f(1) * &ExactPoly::g(1)));
        assert!(poisson(&f, &f).is_zero());
        let fgg = poisson(&poisson(&f, &g), &g);
        assert_eq!(fgg, &ExactPoly::f(2) * &ExactPoly::g(1).pow(2));
    }

    #[test]
    fn fast_path_matches_general_bracket() {
        let u = &(&ExactPoly::f(2) * &ExactPoly::g(1).pow(2)) + &ExactPoly::f(1).pow(3);
        assert_eq!(bracket_with(&u, Letter::F), poisson(&u, &ExactPoly::f(0)));
        assert_eq!(bracket_with(&u, Letter::G), poisson(&u, &ExactPoly::g(0)));
    }

    #[test]
    fn word_examples() {
        let gf = BracketWord::new(vec![1, 1]).unwrap();
        assert_eq!(ipb::<num_rational::BigRational>(&gf, Letter::G), &ExactPoly::f(1) * &ExactPoly::g(1));
        let single = BracketWord::new(vec![0, 1]).unwrap();
        assert_eq!(ipb::<num_rational::BigRational>(&single, Letter::G), ExactPoly::f(0));
        let gff = BracketWord::new(vec![1, 2]).unwrap();
        assert_eq!(ipb::<num_rational::BigRational>(&gff, Letter::G), &ExactPoly::f(1).pow(2) * &ExactPoly::g(2));
    }

    #[test]
    fn malformed_words() {
        assert!(BracketWord::new(vec![]).is_err());
        assert!(BracketWord::new(vec![1]).is_err());
        assert!(BracketWord::new(vec![1, 0, 0, 0]).is_err());
    }

    #[test]
    fn word_enumeration_counts() {
        // weight 1: (1,0), (0,1); weight 2: three single pairs plus four two-pair words
        assert_eq!(BracketWord::all_of_weight(1).len(), 2);
        assert_eq!(BracketWord::all_of_weight(2).len(), 7);
        assert!(BracketWord::all_of_weight(4).iter().all(|w| w.weight() == 4));
    }
}
