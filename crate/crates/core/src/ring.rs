//! Coefficient rings for truncated series.
//!
//! A [`Ring`] supplies the arithmetic the series kernel needs. Exact rings
//! compare structurally; floating rings declare a tolerance through
//! [`Ring::is_negligible`], which every identity check goes through.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt::Debug;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// Exact rational numbers.
pub type Rational = Ratio<i128>;

/// Absolute equality tolerance for complex coefficients.
pub const COMPLEX_TOL: f64 = 1e-12;

pub trait Ring: Clone + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;

    fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    /// Structural zero. Stored series terms satisfying this are pruned.
    fn is_zero(&self) -> bool;

    /// Zero up to the ring's equality tolerance.
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn approx_eq(&self, rhs: &Self) -> bool {
        self.sub(rhs).is_negligible()
    }

    /// The derivation `d`, when the ring carries one.
    fn derivation(&self) -> Option<Self> {
        None
    }
}

impl Ring for Rational {
    fn zero() -> Self {
        Rational::from_integer(0)
    }
    fn one() -> Self {
        Rational::from_integer(1)
    }
    fn from_int(n: i64) -> Self {
        Rational::from_integer(n as i128)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Ring for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn is_negligible(&self) -> bool {
        self.norm() <= COMPLEX_TOL
    }
}

/// Commutative multivariate polynomial with rational coefficients.
///
/// Variables are numbered; exponent vectors never carry trailing zeros, so
/// equal polynomials have equal maps.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MPoly {
    terms: BTreeMap<Vec<u32>, Rational>,
}

fn trim(mut exps: Vec<u32>) -> Vec<u32> {
    while exps.last() == Some(&0) {
        exps.pop();
    }
    exps
}

impl MPoly {
    pub fn constant(c: Rational) -> Self {
        let mut p = MPoly::default();
        p.insert(Vec::new(), c);
        p
    }

    /// The variable with index `i`.
    pub fn var(i: usize) -> Self {
        let mut exps = alloc::vec![0u32; i + 1];
        exps[i] = 1;
        let mut p = MPoly::default();
        p.insert(exps, Rational::from_integer(1));
        p
    }

    /// `c * prod_i var(i)^exps[i]`.
    pub fn monomial(c: Rational, exps: &[u32]) -> Self {
        let mut p = MPoly::default();
        p.insert(exps.to_vec(), c);
        p
    }

    fn insert(&mut self, exps: Vec<u32>, c: Rational) {
        let key = trim(exps);
        let v = self.terms.get(&key).cloned().unwrap_or_else(|| Rational::from_integer(0)) + c;
        if Zero::is_zero(&v) {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, v);
        }
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        let key = trim(exps.to_vec());
        self.terms.get(&key).cloned().unwrap_or_else(|| Rational::from_integer(0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &Rational)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = MPoly::constant(Rational::from_integer(1));
        for _ in 0..n {
            acc = Ring::mul(&acc, self);
        }
        acc
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = MPoly::default();
        for (k, v) in &self.terms {
            out.insert(k.clone(), v * c);
        }
        out
    }

    /// Numeric value at `point` (variable `i` takes `point[i]`, missing
    /// entries read as zero).
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        let mut total = 0.0;
        for (exps, c) in &self.terms {
            let mut term = *c.numer() as f64 / *c.denom() as f64;
            for (i, &e) in exps.iter().enumerate() {
                let x = point.get(i).copied().unwrap_or(0.0);
                term *= num_traits::Float::powi(x, e as i32);
            }
            total += term;
        }
        total
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.iter().sum()).max()
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.terms
            .values()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(|| Rational::from_integer(0))
    }
}

impl Ring for MPoly {
    fn zero() -> Self {
        MPoly::default()
    }
    fn one() -> Self {
        MPoly::constant(Rational::from_integer(1))
    }
    fn from_int(n: i64) -> Self {
        MPoly::constant(Rational::from_integer(n as i128))
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.insert(k.clone(), *v);
        }
        out
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut acc: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (ka, va) in &self.terms {
            for (kb, vb) in &rhs.terms {
                let n = ka.len().max(kb.len());
                let exps: Vec<u32> = (0..n)
                    .map(|i| ka.get(i).copied().unwrap_or(0) + kb.get(i).copied().unwrap_or(0))
                    .collect();
                *acc.entry(exps).or_insert_with(|| Rational::from_integer(0)) += va * vb;
            }
        }
        acc.retain(|_, v| !Zero::is_zero(v));
        MPoly { terms: acc }
    }
    fn neg(&self) -> Self {
        MPoly {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Binomial coefficient as an exact rational.
pub fn binomial(n: u64, k: u64) -> Rational {
    if k > n {
        return Rational::from_integer(0);
    }
    let k = k.min(n - k);
    let mut acc: i128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i128 / (i + 1) as i128;
    }
    Rational::from_integer(acc)
}

pub fn factorial(n: u64) -> Rational {
    Rational::from_integer((1..=n as i128).product::<i128>().max(1))
}

/// Lossy conversion used when exact data feeds a numeric routine.
pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}
