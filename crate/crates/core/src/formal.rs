//! Free differential algebra on `X^[k]` (`X = X^[0]`, `d X^[k] = X^[k+1]`)
//! with exact rational coefficients, graded by `weight(X^[k]) = k + 1`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ring::{binomial, factorial, MPoly, Rational, Ring};
use crate::solver::bernoulli_table;
use crate::{Error, Result};

fn zero() -> Rational {
    Rational::from_integer(0)
}

fn one() -> Rational {
    Rational::from_integer(1)
}

fn word_weight(w: &[u8]) -> usize {
    w.iter().map(|&k| k as usize + 1).sum()
}

fn insert(map: &mut BTreeMap<Vec<u8>, Rational>, key: Vec<u8>, c: Rational) {
    let v = map.get(&key).cloned().unwrap_or_else(zero) + c;
    if num_traits::Zero::is_zero(&v) {
        map.remove(&key);
    } else {
        map.insert(key, v);
    }
}

/// Noncommutative polynomial in the `X^[k]`; a word stores the orders `k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeDiffPoly {
    terms: BTreeMap<Vec<u8>, Rational>,
}

impl FreeDiffPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(one(), Vec::new())
    }

    /// `X^[k]`.
    pub fn generator(k: u8) -> Self {
        Self::monomial(one(), alloc::vec![k])
    }

    pub fn monomial(c: Rational, word: Vec<u8>) -> Self {
        let mut p = Self::zero();
        insert(&mut p.terms, word, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<u8>, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (w, c) in terms {
            insert(&mut p.terms, w, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &Rational)> {
        self.terms.iter().map(|(w, c)| (w.as_slice(), c))
    }

    pub fn coeff(&self, word: &[u8]) -> Rational {
        self.terms.get(word).cloned().unwrap_or_else(zero)
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

    pub fn constant_term(&self) -> Rational {
        self.coeff(&[])
    }

    /// Largest weight present, `None` for zero.
    pub fn weight(&self) -> Option<usize> {
        self.terms.keys().map(|w| word_weight(w)).max()
    }

    /// Weight-`w` homogeneous component.
    pub fn component(&self, w: usize) -> Self {
        Self { terms: self.terms.iter().filter(|(k, _)| word_weight(k) == w).map(|(k, c)| (k.clone(), *c)).collect() }
    }

    pub fn truncate(&self, w: usize) -> Self {
        Self { terms: self.terms.iter().filter(|(k, _)| word_weight(k) <= w).map(|(k, c)| (k.clone(), *c)).collect() }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            insert(&mut out.terms, w.clone(), *c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-one())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, v)| (w.clone(), v * c)))
    }

    /// Product truncated at weight `w`.
    pub fn mul(&self, rhs: &Self, w: usize) -> Self {
        let mut out = Self::zero();
        for (a, ca) in &self.terms {
            let wa = word_weight(a);
            for (b, cb) in &rhs.terms {
                if wa + word_weight(b) > w {
                    continue;
                }
                let mut k = a.clone();
                k.extend_from_slice(b);
                insert(&mut out.terms, k, ca * cb);
            }
        }
        out
    }

    /// `[self, rhs]` truncated at weight `w`.
    pub fn commutator(&self, rhs: &Self, w: usize) -> Self {
        self.mul(rhs, w).sub(&rhs.mul(self, w))
    }

    /// `d` extended by Leibniz, truncated at weight `w`.
    pub fn derive(&self, w: usize) -> Self {
        let mut out = Self::zero();
        for (word, c) in &self.terms {
            if word_weight(word) + 1 > w {
                continue;
            }
            for i in 0..word.len() {
                let mut k = word.clone();
                k[i] += 1;
                insert(&mut out.terms, k, *c);
            }
        }
        out
    }
}

impl fmt::Display for FreeDiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut keys: Vec<&Vec<u8>> = self.terms.keys().collect();
        keys.sort_by_key(|w| (word_weight(w), (*w).clone()));
        for (i, w) in keys.into_iter().enumerate() {
            let c = self.terms[w];
            let word: String = if w.is_empty() {
                String::from("1")
            } else {
                w.iter().map(|k| format!("X[{k}]")).collect()
            };
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}*{word}")?;
        }
        Ok(())
    }
}

/// `sum_n P^n / n!` truncated at weight `w`.
pub fn exp_truncated(p: &FreeDiffPoly, w: usize) -> Result<FreeDiffPoly> {
    if !num_traits::Zero::is_zero(&p.constant_term()) {
        return Err(Error::NonzeroConstantTerm);
    }
    let p = p.truncate(w);
    let mut out = FreeDiffPoly::one();
    let mut power = FreeDiffPoly::one();
    for n in 1..=w {
        power = power.mul(&p, w);
        if power.is_zero() {
            break;
        }
        out = out.add(&power.scale(&(one() / factorial(n as u64))));
    }
    Ok(out)
}

/// `D = d(e^X) e^{-X}` truncated at weight `w`.
pub fn compute_d(w: usize) -> FreeDiffPoly {
    let x = FreeDiffPoly::generator(0);
    let ex = exp_truncated(&x, w).expect("no constant term");
    let emx = exp_truncated(&x.neg(), w).expect("no constant term");
    ex.derive(w).mul(&emx, w)
}

/// `sum_n a_n Y^n`, applied as `sum_n a_n ad_X^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesInAd {
    pub coefficients: Vec<Rational>,
}

impl SeriesInAd {
    pub fn identity() -> Self {
        SeriesInAd { coefficients: alloc::vec![one()] }
    }

    /// `psi(t) = (e^t - 1)/t = sum t^n/(n+1)!` up to `t^m`.
    pub fn psi(m: usize) -> Self {
        SeriesInAd { coefficients: (0..=m).map(|n| one() / factorial(n as u64 + 1)).collect() }
    }

    /// `phi(t) = t/(e^t - 1) = sum B_n t^n / n!` up to `t^m`.
    pub fn phi(m: usize) -> Self {
        let b = bernoulli_table(m);
        SeriesInAd { coefficients: b.iter().enumerate().map(|(n, bn)| bn / factorial(n as u64)).collect() }
    }

    /// Cauchy product truncated at `t^m`.
    pub fn product(&self, rhs: &Self, m: usize) -> Self {
        let coefficients = (0..=m)
            .map(|n| {
                (0..=n)
                    .map(|i| {
                        let a = self.coefficients.get(i).cloned().unwrap_or_else(zero);
                        let b = rhs.coefficients.get(n - i).cloned().unwrap_or_else(zero);
                        a * b
                    })
                    .fold(zero(), |acc, v| acc + v)
            })
            .collect();
        SeriesInAd { coefficients }
    }
}

/// `sum_n a_n ad_X^n [target]` truncated at weight `w`.
pub fn apply_ad_series(phi: &SeriesInAd, target: &FreeDiffPoly, w: usize) -> FreeDiffPoly {
    let x = FreeDiffPoly::generator(0);
    let mut out = FreeDiffPoly::zero();
    let mut term = target.truncate(w);
    for a in &phi.coefficients {
        if term.is_zero() {
            break;
        }
        out = out.add(&term.scale(a));
        term = x.commutator(&term, w);
    }
    out
}

/// Element of the tensor square, keyed by word pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorSquare {
    terms: BTreeMap<(Vec<u8>, Vec<u8>), Rational>,
}

impl TensorSquare {
    fn insert(&mut self, key: (Vec<u8>, Vec<u8>), c: Rational) {
        let v = self.terms.get(&key).cloned().unwrap_or_else(zero) + c;
        if num_traits::Zero::is_zero(&v) {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
    }

    /// `P (x) Q`.
    pub fn tensor(p: &FreeDiffPoly, q: &FreeDiffPoly) -> Self {
        let mut out = Self::default();
        for (a, ca) in &p.terms {
            for (b, cb) in &q.terms {
                out.insert((a.clone(), b.clone()), ca * cb);
            }
        }
        out
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

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert(k.clone(), *c);
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.insert(k.clone(), -c);
        }
        out
    }

    /// Componentwise product, truncated at total weight `w`.
    pub fn mul(&self, rhs: &Self, w: usize) -> Self {
        let mut out = Self::default();
        for ((a1, a2), ca) in &self.terms {
            let wa = word_weight(a1) + word_weight(a2);
            for ((b1, b2), cb) in &rhs.terms {
                if wa + word_weight(b1) + word_weight(b2) > w {
                    continue;
                }
                let mut k1 = a1.clone();
                k1.extend_from_slice(b1);
                let mut k2 = a2.clone();
                k2.extend_from_slice(b2);
                out.insert((k1, k2), ca * cb);
            }
        }
        out
    }

    /// `d (x) 1 + 1 (x) d`, truncated at total weight `w`.
    pub fn derive(&self, w: usize) -> Self {
        let mut out = Self::default();
        for ((a, b), c) in &self.terms {
            if word_weight(a) + word_weight(b) + 1 > w {
                continue;
            }
            for i in 0..a.len() {
                let mut k = a.clone();
                k[i] += 1;
                out.insert((k, b.clone()), *c);
            }
            for i in 0..b.len() {
                let mut k = b.clone();
                k[i] += 1;
                out.insert((a.clone(), k), *c);
            }
        }
        out
    }
}

/// The algebra morphism with every `X^[k]` primitive: a word maps to the
/// sum over its splittings into complementary subwords.
pub fn coproduct(p: &FreeDiffPoly) -> TensorSquare {
    let mut out = TensorSquare::default();
    for (w, c) in &p.terms {
        let n = w.len();
        for mask in 0u64..(1u64 << n) {
            let (mut left, mut right) = (Vec::new(), Vec::new());
            for (i, &k) in w.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    left.push(k);
                } else {
                    right.push(k);
                }
            }
            out.insert((left, right), *c);
        }
    }
    out
}

/// Whether `Delta(P) = P (x) 1 + 1 (x) P` up to weight `w`.
pub fn primitivity_check(p: &FreeDiffPoly, w: usize) -> bool {
    let p = p.truncate(w);
    let one = FreeDiffPoly::one();
    coproduct(&p)
        .sub(&TensorSquare::tensor(&p, &one))
        .sub(&TensorSquare::tensor(&one, &p))
        .is_zero()
}

fn geometric_sides(k: u32) -> (MPoly, MPoly, MPoly) {
    let y = MPoly::var(0);
    let z = MPoly::var(1);
    let ymz = y.sub(&z);
    let mut sum = MPoly::zero();
    for l in 0..k {
        sum = sum.add(&y.pow(l).mul(&z.pow(k - 1 - l)));
    }
    let mut binom = MPoly::zero();
    for j in 1..=k {
        let t = ymz.pow(j).mul(&z.pow(k - j)).scale(&binomial(k as u64, j as u64));
        binom = binom.add(&t);
    }
    (sum, binom, ymz)
}

/// `(sum_l Y^l Z^{k-1-l}) (Y - Z) = sum_{j>=1} C(k,j) (Y - Z)^j Z^{k-j}` in
/// exact bivariate polynomials.
pub fn geometric_sum_identity_check(k: u32) -> Result<bool> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1"));
    }
    let (sum, binom, ymz) = geometric_sides(k);
    Ok(sum.mul(&ymz) == binom)
}

/// The same identity without the factor `(Y - Z)` on the left.
pub fn geometric_sum_uncorrected_check(k: u32) -> Result<bool> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1"));
    }
    let (sum, binom, _) = geometric_sides(k);
    Ok(sum == binom)
}

/// `phi(t) psi(t) = 1` up to `t^w`.
pub fn phi_psi_inverse_check(w: usize) -> bool {
    let prod = SeriesInAd::phi(w).product(&SeriesInAd::psi(w), w);
    prod.coefficients.iter().enumerate().all(|(n, c)| if n == 0 { *c == one() } else { num_traits::Zero::is_zero(c) })
}

/// Outcome of one named identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRow {
    pub name: String,
    pub weight: usize,
    pub passed: bool,
}

/// Every identity of this module for weights `1..=w`.
pub fn all_checks(w: usize) -> Vec<CheckRow> {
    let mut rows = Vec::new();
    for weight in 1..=w {
        let d = compute_d(weight);
        let x1 = FreeDiffPoly::generator(1);
        let x = FreeDiffPoly::generator(0);
        let ex = exp_truncated(&x, weight).expect("no constant term");
        let emx = exp_truncated(&x.neg(), weight).expect("no constant term");
        let row = |name: &str, passed: bool| CheckRow { name: String::from(name), weight, passed };
        rows.push(row("exp-inverse", ex.mul(&emx, weight) == FreeDiffPoly::one()));
        rows.push(row("poincare-hausdorff", d == apply_ad_series(&SeriesInAd::psi(weight), &x1, weight)));
        rows.push(row("d-primitive", primitivity_check(&d, weight)));
        rows.push(row("phi-psi-inverse", phi_psi_inverse_check(weight)));
        rows.push(row("geometric-sum", geometric_sum_identity_check(weight as u32).unwrap_or(false)));
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn exp_small_cases() {
        assert_eq!(exp_truncated(&FreeDiffPoly::zero(), 4).unwrap(), FreeDiffPoly::one());
        let x = FreeDiffPoly::generator(0);
        let e = exp_truncated(&x, 2).unwrap();
        let want = FreeDiffPoly::from_terms([(vec![], q(1, 1)), (vec![0], q(1, 1)), (vec![0, 0], q(1, 2))]);
        assert_eq!(e, want);
        assert_eq!(exp_truncated(&FreeDiffPoly::one(), 2), Err(Error::NonzeroConstantTerm));
    }

    #[test]
    fn d_low_weights() {
        let d = compute_d(3);
        assert_eq!(d.component(2), FreeDiffPoly::generator(1).component(2));
        assert_eq!(d.coeff(&[0, 1]), q(1, 2));
        assert_eq!(d.coeff(&[1, 0]), q(-1, 2));
    }

    #[test]
    fn ad_series_basics() {
        let x1 = FreeDiffPoly::generator(1);
        assert_eq!(apply_ad_series(&SeriesInAd::identity(), &x1, 5), x1);
        let ad = SeriesInAd { coefficients: vec![q(0, 1), q(1, 1)] };
        assert_eq!(apply_ad_series(&ad, &x1, 5), FreeDiffPoly::generator(0).commutator(&x1, 5));
    }

    #[test]
    fn primitivity_small() {
        let x = FreeDiffPoly::generator(0);
        assert!(primitivity_check(&x, 4));
        assert!(!primitivity_check(&x.mul(&x, 4), 4));
        assert!(primitivity_check(&compute_d(4), 4));
    }

    #[test]
    fn geometric_sum() {
        for k in 1..=7 {
            assert!(geometric_sum_identity_check(k).unwrap());
        }
        assert!(!geometric_sum_uncorrected_check(1).unwrap());
        assert!(!geometric_sum_uncorrected_check(3).unwrap());
    }

    #[test]
    fn phi_psi() {
        let p = SeriesInAd::phi(6).product(&SeriesInAd::psi(6), 6);
        assert_eq!(p.coefficients[1], q(0, 1));
        assert!(phi_psi_inverse_check(12));
    }
}
