use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::{shuffle_words, Alphabet, Word};
use crate::ring::Ring;
use crate::{Error, Result};

/// Degree-truncated noncommutative series `sum_w <S|w> w` over a coefficient
/// ring `R`.
///
/// Invariants: no stored coefficient is structurally zero, and every stored
/// word has length at most `max_degree`.
#[derive(Clone, Debug, PartialEq)]
pub struct Series<R> {
    alphabet: Alphabet,
    max_degree: usize,
    terms: BTreeMap<Word, R>,
}

/// Finitely supported map letter -> scalar.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AlphaVector<R> {
    entries: BTreeMap<usize, R>,
}

impl<R: Ring> AlphaVector<R> {
    pub fn new() -> Self {
        AlphaVector { entries: BTreeMap::new() }
    }

    pub fn with(mut self, letter: usize, value: R) -> Self {
        self.set(letter, value);
        self
    }

    pub fn set(&mut self, letter: usize, value: R) {
        if value.is_zero() {
            self.entries.remove(&letter);
        } else {
            self.entries.insert(letter, value);
        }
    }

    pub fn get(&self, letter: usize) -> R {
        self.entries.get(&letter).cloned().unwrap_or_else(R::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &R)> {
        self.entries.iter().map(|(&k, v)| (k, v))
    }

    /// Letterwise sum.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&k, v) in &other.entries {
            let s = out.get(k).add(v);
            out.set(k, s);
        }
        out
    }
}

impl<R: Ring> Series<R> {
    pub fn zero(alphabet: Alphabet, max_degree: usize) -> Self {
        Series {
            alphabet,
            max_degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(alphabet: Alphabet, max_degree: usize) -> Self {
        let mut s = Self::zero(alphabet, max_degree);
        s.terms.insert(Word::empty(), R::one());
        s
    }

    /// Builds a series from `(word, coefficient)` pairs. Repeated words are
    /// summed, words longer than `max_degree` dropped, zeros pruned.
    pub fn from_terms<I>(alphabet: Alphabet, max_degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, R)>,
    {
        let mut s = Self::zero(alphabet, max_degree);
        for (w, c) in terms {
            s.alphabet.validate(&w)?;
            s.add_term(w, &c);
        }
        Ok(s)
    }

    pub fn monomial(alphabet: Alphabet, max_degree: usize, word: Word, coeff: R) -> Result<Self> {
        Self::from_terms(alphabet, max_degree, [(word, coeff)])
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn coeff(&self, w: &Word) -> R {
        self.terms.get(w).cloned().unwrap_or_else(R::zero)
    }

    pub fn get(&self, w: &Word) -> Option<&R> {
        self.terms.get(w)
    }

    /// Terms in graded lexicographic order of their words.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &R)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &Word> {
        self.terms.keys()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Length of the longest stored word.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Word::len)
    }

    /// True when every stored word has length `d`.
    pub fn is_homogeneous(&self, d: usize) -> bool {
        self.terms.keys().all(|w| w.len() == d)
    }

    pub(crate) fn add_term(&mut self, w: Word, c: &R) {
        if w.len() > self.max_degree || c.is_zero() {
            return;
        }
        let merged = match self.terms.get(&w) {
            Some(old) => old.add(c),
            None => c.clone(),
        };
        if merged.is_zero() {
            self.terms.remove(&w);
        } else {
            self.terms.insert(w, merged);
        }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        if self.max_degree != other.max_degree {
            return Err(Error::DegreeMismatch {
                left: self.max_degree,
                right: other.max_degree,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    /// Coefficientwise product `c * S`.
    pub fn scale(&self, c: &R) -> Self {
        self.map_coeffs(|x| c.mul(x))
    }

    pub fn map_coeffs<F: FnMut(&R) -> R>(&self, mut f: F) -> Self {
        let mut out = Self::zero(self.alphabet.clone(), self.max_degree);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), &f(c));
        }
        out
    }

    /// Drops every word longer than `n`; the result is truncated at `n`.
    pub fn truncate(&self, n: usize) -> Self {
        let mut out = Self::zero(self.alphabet.clone(), n);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c);
        }
        out
    }

    /// Concatenation product `<ST|w> = sum_{uv = w} <S|u><T|v>`, truncated.
    pub fn concat_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.max_degree;
        let mut out = Self::zero(self.alphabet.clone(), n);
        for (u, a) in &self.terms {
            for (v, b) in other.terms.iter() {
                if u.len() + v.len() > n {
                    // Terms are sorted by length; nothing further fits.
                    break;
                }
                out.add_term(u.concat(v), &a.mul(b));
            }
        }
        Ok(out)
    }

    /// Shuffle product, bilinear extension of the word shuffle, truncated.
    pub fn shuffle_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let n = self.max_degree;
        let mut out = Self::zero(self.alphabet.clone(), n);
        for (u, a) in &self.terms {
            for (v, b) in other.terms.iter() {
                if u.len() + v.len() > n {
                    break;
                }
                let ab = a.mul(b);
                for (w, count) in shuffle_words(u, v) {
                    let c = if count == 1 {
                        ab.clone()
                    } else {
                        ab.mul(&R::from_int(count as i64))
                    };
                    out.add_term(w, &c);
                }
            }
        }
        Ok(out)
    }

    /// `<S|P> = sum_w <S|w><P|w>`.
    pub fn pairing(&self, p: &Self) -> Result<R> {
        if self.alphabet != p.alphabet {
            return Err(Error::AlphabetMismatch);
        }
        let (small, large) = if self.len() <= p.len() { (self, p) } else { (p, self) };
        let mut acc = R::zero();
        for (w, c) in &small.terms {
            if let Some(d) = large.terms.get(w) {
                acc = acc.add(&c.mul(d));
            }
        }
        Ok(acc)
    }

    /// Left residual `x^† S`, with `<x^† S|w> = <S|xw>`.
    pub fn left_residual(&self, letter: usize) -> Result<Self> {
        if letter >= self.alphabet.len() {
            return Err(Error::LetterOutOfRange {
                index: letter,
                len: self.alphabet.len(),
            });
        }
        let mut out = Self::zero(self.alphabet.clone(), self.max_degree);
        for (w, c) in &self.terms {
            if let Some(rest) = w.strip_first(letter) {
                out.add_term(rest, c);
            }
        }
        Ok(out)
    }

    /// Applies the coefficient derivation `d` to every coefficient.
    pub fn coefficientwise_derivation(&self) -> Result<Self> {
        if R::one().derivation().is_none() {
            return Err(Error::NoDerivation);
        }
        let mut out = Self::zero(self.alphabet.clone(), self.max_degree);
        for (w, c) in &self.terms {
            let dc = c.derivation().ok_or(Error::NoDerivation)?;
            out.add_term(w.clone(), &dc);
        }
        Ok(out)
    }

    /// Largest word of the support for the graded lexicographic order.
    pub fn leading_monomial(&self) -> Result<&Word> {
        self.terms.keys().next_back().ok_or(Error::ZeroPolynomial)
    }

    /// Coefficientwise equality up to the ring tolerance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        if self.alphabet != other.alphabet {
            return false;
        }
        let words: alloc::collections::BTreeSet<&Word> =
            self.terms.keys().chain(other.terms.keys()).collect();
        words
            .into_iter()
            .all(|w| self.coeff(w).approx_eq(&other.coeff(w)))
    }

    /// Words where `self` and `other` differ beyond tolerance.
    pub fn mismatches(&self, other: &Self) -> Vec<Word> {
        let words: alloc::collections::BTreeSet<&Word> =
            self.terms.keys().chain(other.terms.keys()).collect();
        words
            .into_iter()
            .filter(|w| !self.coeff(w).approx_eq(&other.coeff(w)))
            .cloned()
            .collect()
    }
}

/// `M^† Q = sum_x u_x (x^† Q)` for a multiplier `M = sum_x u_x x`.
pub fn adjoint_multiplier_apply<R: Ring>(m: &Series<R>, q: &Series<R>) -> Result<Series<R>> {
    if m.alphabet != q.alphabet {
        return Err(Error::AlphabetMismatch);
    }
    if !m.is_homogeneous(1) {
        return Err(Error::NotHomogeneous);
    }
    let mut out = Series::zero(q.alphabet.clone(), q.max_degree);
    for (x, u) in m.terms() {
        let letter = x.letters()[0] as usize;
        for (w, c) in q.left_residual(letter)?.terms() {
            out.add_term(w.clone(), &u.mul(c));
        }
    }
    Ok(out)
}

/// `L^* = sum_{n <= N} L^n` for the letter-linear `L = sum_x alpha_x x`.
/// Equivalently `<L^*|w>` is the product of the weights of the letters of `w`.
pub fn star_letter_series<R: Ring>(
    alphabet: &Alphabet,
    coeffs: &AlphaVector<R>,
    max_degree: usize,
) -> Result<Series<R>> {
    if let Some(bad) = coeffs.support().find(|&x| x >= alphabet.len()) {
        return Err(Error::LetterOutOfRange {
            index: bad,
            len: alphabet.len(),
        });
    }
    let mut out = Series::one(alphabet.clone(), max_degree);
    let mut level: Vec<(Word, R)> = alloc::vec![(Word::empty(), R::one())];
    for _ in 0..max_degree {
        let mut next = Vec::with_capacity(level.len() * coeffs.entries.len());
        for (w, c) in &level {
            for (x, a) in coeffs.iter() {
                let prod = c.mul(a);
                if !prod.is_zero() {
                    next.push((w.append(x), prod));
                }
            }
        }
        for (w, c) in &next {
            out.add_term(w.clone(), c);
        }
        level = next;
        if level.is_empty() {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{MPoly, Rational};
    use alloc::vec;

    fn ab() -> Alphabet {
        Alphabet::new(["x0", "x1"]).unwrap()
    }

    fn q(n: i128) -> Rational {
        Rational::from_integer(n)
    }

    fn ser(n: usize, terms: &[(&[usize], i128)]) -> Series<Rational> {
        Series::from_terms(
            ab(),
            n,
            terms
                .iter()
                .map(|(w, c)| (Word::from_indices(w.iter().copied()), q(*c))),
        )
        .unwrap()
    }

    #[test]
    fn leading_monomial_examples() {
        assert_eq!(
            ser(3, &[(&[0], 1), (&[1, 0], 1)]).leading_monomial().unwrap(),
            &Word::from_indices([1, 0])
        );
        assert_eq!(ser(3, &[(&[], 1)]).leading_monomial().unwrap(), &Word::empty());
        assert_eq!(
            ser(3, &[(&[0, 1], 2), (&[1, 0], 3)]).leading_monomial().unwrap(),
            &Word::from_indices([1, 0])
        );
        assert_eq!(ser(3, &[]).leading_monomial(), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn concat_examples() {
        let p = ser(3, &[(&[0], 1)]).concat_mul(&ser(3, &[(&[1], 1)])).unwrap();
        assert!(p.approx_eq(&ser(3, &[(&[0, 1], 1)])));
        let a = ser(3, &[(&[], 1), (&[0], 1)]);
        let sq = a.concat_mul(&a).unwrap();
        assert!(sq.approx_eq(&ser(3, &[(&[], 1), (&[0], 2), (&[0, 0], 1)])));
    }

    #[test]
    fn concat_multiplier_coefficient() {
        // M = u0 x0 + u1 x1 with symbolic u0, u1, s; <S|x1> = s.
        let (u0, u1, s) = (MPoly::var(0), MPoly::var(1), MPoly::var(2));
        let m = Series::from_terms(
            ab(),
            2,
            [(Word::letter(0), u0.clone()), (Word::letter(1), u1)],
        )
        .unwrap();
        let sv = Series::from_terms(ab(), 2, [(Word::empty(), MPoly::one()), (Word::letter(1), s.clone())])
            .unwrap();
        let ms = m.concat_mul(&sv).unwrap();
        assert_eq!(ms.coeff(&Word::from_indices([0, 1])), u0.mul(&s));
    }

    #[test]
    fn truncation_drops_long_words() {
        let a = ser(2, &[(&[0], 1), (&[0, 1], 1)]);
        let p = a.concat_mul(&a).unwrap();
        assert!(p.terms().all(|(w, _)| w.len() <= 2));
        assert_eq!(p.coeff(&Word::from_indices([0, 0])), q(1));
    }

    #[test]
    fn shuffle_examples() {
        let s = ser(3, &[(&[0], 1)]).shuffle_mul(&ser(3, &[(&[1], 1)])).unwrap();
        assert!(s.approx_eq(&ser(3, &[(&[0, 1], 1), (&[1, 0], 1)])));
        let s = ser(3, &[(&[0], 1)]).shuffle_mul(&ser(3, &[(&[0], 1)])).unwrap();
        assert!(s.approx_eq(&ser(3, &[(&[0, 0], 2)])));
        let s = ser(3, &[(&[0, 1], 1)]).shuffle_mul(&ser(3, &[(&[0], 1)])).unwrap();
        assert!(s.approx_eq(&ser(3, &[(&[0, 0, 1], 2), (&[0, 1, 0], 1)])));
    }

    #[test]
    fn mismatched_operands_are_rejected() {
        let a = ser(3, &[(&[0], 1)]);
        let b = ser(4, &[(&[0], 1)]);
        assert_eq!(a.concat_mul(&b).unwrap_err(), Error::DegreeMismatch { left: 3, right: 4 });
        let c = Series::<Rational>::one(Alphabet::new(["a", "b"]).unwrap(), 3);
        assert_eq!(a.shuffle_mul(&c).unwrap_err(), Error::AlphabetMismatch);
        assert_eq!(a.pairing(&c).unwrap_err(), Error::AlphabetMismatch);
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(ser(2, &[(&[], 1), (&[0], 7)]).pairing(&ser(2, &[(&[], 1)])).unwrap(), q(1));
        assert_eq!(ser(2, &[(&[0], 1)]).pairing(&ser(2, &[(&[1], 1)])).unwrap(), q(0));
        assert_eq!(
            ser(2, &[(&[0], 2), (&[1], 3)]).pairing(&ser(2, &[(&[0], 1), (&[1], 1)])).unwrap(),
            q(5)
        );
    }

    #[test]
    fn residual_examples() {
        assert!(ser(3, &[(&[0, 1], 1)]).left_residual(0).unwrap().approx_eq(&ser(3, &[(&[1], 1)])));
        assert!(ser(3, &[(&[0, 1], 1)]).left_residual(1).unwrap().is_zero());
        let r = ser(3, &[(&[0], 1), (&[0, 0, 1], 1)]).left_residual(0).unwrap();
        assert!(r.approx_eq(&ser(3, &[(&[], 1), (&[0, 1], 1)])));
        assert!(ser(3, &[]).left_residual(2).is_err());
    }

    #[test]
    fn adjoint_examples() {
        let m = ser(3, &[(&[0], 1)]);
        let r = adjoint_multiplier_apply(&m, &ser(3, &[(&[0, 1], 1)])).unwrap();
        assert!(r.approx_eq(&ser(3, &[(&[1], 1)])));

        let (u0, u1) = (MPoly::var(0), MPoly::var(1));
        let m = Series::from_terms(ab(), 3, [(Word::letter(0), u0.clone()), (Word::letter(1), u1.clone())])
            .unwrap();
        let poly = |t: &[&[usize]]| {
            Series::from_terms(ab(), 3, t.iter().map(|w| (Word::from_indices(w.iter().copied()), MPoly::one())))
                .unwrap()
        };
        let r = adjoint_multiplier_apply(&m, &poly(&[&[0]])).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.coeff(&Word::empty()), u0);
        let r = adjoint_multiplier_apply(&m, &poly(&[&[0, 1], &[1, 1]])).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.coeff(&Word::letter(1)), u0.add(&u1));

        let not_homogeneous = ser(3, &[(&[0], 1), (&[], 1)]);
        assert_eq!(
            adjoint_multiplier_apply(&not_homogeneous, &ser(3, &[(&[0, 1], 1)])).unwrap_err(),
            Error::NotHomogeneous
        );
    }

    #[test]
    fn derivation_requires_differential_ring() {
        assert_eq!(
            ser(2, &[(&[0], 1)]).coefficientwise_derivation().unwrap_err(),
            Error::NoDerivation
        );
    }

    #[test]
    fn star_examples() {
        let alpha = MPoly::var(0);
        let s = star_letter_series(&ab(), &AlphaVector::new().with(0, alpha.clone()), 2).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.coeff(&Word::empty()), MPoly::one());
        assert_eq!(s.coeff(&Word::letter(0)), alpha);
        assert_eq!(s.coeff(&Word::from_indices([0, 0])), alpha.pow(2));

        let zero = star_letter_series::<MPoly>(&ab(), &AlphaVector::new(), 5).unwrap();
        assert_eq!(zero.len(), 1);

        let beta = MPoly::var(1);
        let l = AlphaVector::new().with(0, alpha.clone()).with(1, beta.clone());
        let s = star_letter_series(&ab(), &l, 3).unwrap();
        assert_eq!(s.coeff(&Word::from_indices([0, 1])), alpha.mul(&beta));
        assert_eq!(s.len(), 15);
    }

    #[test]
    fn alpha_vector_drops_zero_entries() {
        let v = AlphaVector::new().with(0, q(0)).with(1, q(2));
        assert_eq!(v.support().collect::<Vec<_>>(), vec![1]);
        let w = v.add(&AlphaVector::new().with(1, q(-2)));
        assert_eq!(w.support().count(), 0);
    }
}
