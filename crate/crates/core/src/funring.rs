//! The differential ring spanned by `z^a (1-z)^b L0^p L1^q` with
//! `L0 = log z` and `L1 = log(1/(1-z))`.
//!
//! Exponents are exact: a rational part plus rational multiples of declared
//! transcendence symbols, each of which carries its numeric value.
//! Coefficients are complex floats.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;

use crate::ring::{binomial, rational_to_f64, Rational, Ring, COMPLEX_TOL};
use crate::{Error, Result};

type C = Complex64;

/// A named transcendence symbol with its numeric value.
#[derive(Clone, Debug)]
pub struct Symbol {
    name: Arc<str>,
    value: f64,
}

impl Symbol {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self) -> f64 {
        self.value
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Symbol {}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name
            .cmp(&other.name)
            .then_with(|| self.value.to_bits().cmp(&other.value.to_bits()))
    }
}

/// Write-once registry of symbol values.
#[derive(Clone, Debug, Default)]
pub struct SymbolTable {
    symbols: BTreeMap<String, Symbol>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares `name`. Re-declaring with the same value returns the existing
    /// symbol; a different value is an error.
    pub fn declare(&mut self, name: &str, value: f64) -> Result<Symbol> {
        if name.is_empty() || name == "1" || !value.is_finite() {
            return Err(Error::InvalidArgument("symbol names must be nonempty, not `1`, with finite value"));
        }
        if let Some(s) = self.symbols.get(name) {
            if s.value.to_bits() != value.to_bits() {
                return Err(Error::SymbolRedeclared(name.to_string()));
            }
            return Ok(s.clone());
        }
        let s = Symbol { name: name.into(), value };
        self.symbols.insert(name.to_string(), s.clone());
        Ok(s)
    }

    pub fn get(&self, name: &str) -> Result<Symbol> {
        self.symbols
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UndeclaredSymbol(name.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.values()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

/// Exact exponent `r + sum c_s s`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Exponent {
    rational: Rational,
    symbols: BTreeMap<Symbol, Rational>,
}

impl Exponent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(r: Rational) -> Self {
        Exponent { rational: r, symbols: BTreeMap::new() }
    }

    pub fn int(n: i64) -> Self {
        Self::rational(Rational::from_integer(n as i128))
    }

    pub fn symbol(s: &Symbol) -> Self {
        Self::zero().with_symbol(s, Rational::from_integer(1))
    }

    /// Adds `c * s`.
    pub fn with_symbol(mut self, s: &Symbol, c: Rational) -> Self {
        let v = self.symbols.remove(s).unwrap_or_else(|| Rational::from_integer(0)) + c;
        if !num_traits::Zero::is_zero(&v) {
            self.symbols.insert(s.clone(), v);
        }
        self
    }

    pub fn rational_part(&self) -> Rational {
        self.rational
    }

    pub fn symbol_coords(&self) -> impl Iterator<Item = (&Symbol, &Rational)> {
        self.symbols.iter()
    }

    /// The exponent as a rational, if it involves no symbol.
    pub fn as_rational(&self) -> Option<Rational> {
        self.symbols.is_empty().then_some(self.rational)
    }

    pub fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(&self.rational) && self.symbols.is_empty()
    }

    pub fn add(&self, rhs: &Exponent) -> Exponent {
        let mut out = self.clone();
        out.rational += rhs.rational;
        for (s, c) in &rhs.symbols {
            out = out.with_symbol(s, *c);
        }
        out
    }

    pub fn neg(&self) -> Exponent {
        self.scale(Rational::from_integer(-1))
    }

    pub fn sub(&self, rhs: &Exponent) -> Exponent {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: Rational) -> Exponent {
        if num_traits::Zero::is_zero(&c) {
            return Exponent::zero();
        }
        Exponent {
            rational: self.rational * c,
            symbols: self.symbols.iter().map(|(s, v)| (s.clone(), v * c)).collect(),
        }
    }

    pub fn add_int(&self, n: i64) -> Exponent {
        self.add(&Exponent::int(n))
    }

    pub fn value(&self) -> f64 {
        rational_to_f64(&self.rational)
            + self
                .symbols
                .iter()
                .map(|(s, c)| rational_to_f64(c) * s.value)
                .sum::<f64>()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, c) in &self.symbols {
            let sign = if c < &Rational::from_integer(0) { "-" } else if first { "" } else { "+" };
            let mag = if c < &Rational::from_integer(0) { -c } else { *c };
            if mag == Rational::from_integer(1) {
                write!(f, "{sign}{}", s.name)?;
            } else {
                write!(f, "{sign}{mag}*{}", s.name)?;
            }
            first = false;
        }
        if !num_traits::Zero::is_zero(&self.rational) || first {
            if first || self.rational < Rational::from_integer(0) {
                write!(f, "{}", self.rational)?;
            } else {
                write!(f, "+{}", self.rational)?;
            }
        }
        Ok(())
    }
}

/// Key `z^a (1-z)^b L0^p L1^q`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct FunKey {
    pub a: Exponent,
    pub b: Exponent,
    pub p: u32,
    pub q: u32,
}

impl FunKey {
    pub fn new(a: Exponent, b: Exponent, p: u32, q: u32) -> Self {
        FunKey { a, b, p, q }
    }

    pub fn one() -> Self {
        Self::default()
    }

    pub fn mul(&self, rhs: &FunKey) -> FunKey {
        FunKey {
            a: self.a.add(&rhs.a),
            b: self.b.add(&rhs.b),
            p: self.p + rhs.p,
            q: self.q + rhs.q,
        }
    }

    pub fn shift(&self, da: i64, db: i64) -> FunKey {
        FunKey {
            a: self.a.add_int(da),
            b: self.b.add_int(db),
            p: self.p,
            q: self.q,
        }
    }

    pub fn is_monoid(&self) -> bool {
        self.p == 0 && self.q == 0
    }
}

impl fmt::Display for FunKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z^({})(1-z)^({})", self.a, self.b)?;
        if self.p > 0 {
            write!(f, "L0^{}", self.p)?;
        }
        if self.q > 0 {
            write!(f, "L1^{}", self.q)?;
        }
        Ok(())
    }
}

/// Element of the differential ring: a finite complex combination of keys.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FunElem {
    terms: BTreeMap<FunKey, C>,
}

/// Relative size under which a sum is treated as exact cancellation.
const CANCEL_REL: f64 = 1e-14;

impl FunElem {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C) -> Self {
        Self::term(c, FunKey::one())
    }

    pub fn term(c: C, key: FunKey) -> Self {
        let mut f = FunElem::zero();
        f.add_term(key, c);
        f
    }

    /// `c z^a (1-z)^b`.
    pub fn monomial(c: C, a: Exponent, b: Exponent) -> Self {
        Self::term(c, FunKey::new(a, b, 0, 0))
    }

    pub fn z_pow(a: Exponent) -> Self {
        Self::monomial(C::new(1.0, 0.0), a, Exponent::zero())
    }

    pub fn one_minus_z_pow(b: Exponent) -> Self {
        Self::monomial(C::new(1.0, 0.0), Exponent::zero(), b)
    }

    pub fn z() -> Self {
        Self::z_pow(Exponent::int(1))
    }

    pub fn l0() -> Self {
        Self::term(C::new(1.0, 0.0), FunKey::new(Exponent::zero(), Exponent::zero(), 1, 0))
    }

    pub fn l1() -> Self {
        Self::term(C::new(1.0, 0.0), FunKey::new(Exponent::zero(), Exponent::zero(), 0, 1))
    }

    pub fn from_terms<I: IntoIterator<Item = (FunKey, C)>>(terms: I) -> Self {
        let mut f = FunElem::zero();
        for (k, c) in terms {
            f.add_term(k, c);
        }
        f
    }

    pub fn add_term(&mut self, key: FunKey, c: C) {
        if c == C::new(0.0, 0.0) {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                let sum = *v + c;
                if sum.norm() <= CANCEL_REL * v.norm().max(c.norm()) {
                    self.terms.remove(&key);
                } else {
                    *v = sum;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FunKey, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &FunKey) -> C {
        self.terms.get(key).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True iff every key has `p = q = 0`.
    pub fn is_monoid_element(&self) -> bool {
        self.terms.keys().all(FunKey::is_monoid)
    }

    pub fn scale(&self, c: C) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (k.clone(), v * c)))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn derive(&self) -> Self {
        let mut out = FunElem::zero();
        for (k, &c) in &self.terms {
            if !k.a.is_zero() {
                out.add_term(k.shift(-1, 0), c * k.a.value());
            }
            if !k.b.is_zero() {
                out.add_term(k.shift(0, -1), -c * k.b.value());
            }
            if k.p > 0 {
                let mut key = k.shift(-1, 0);
                key.p -= 1;
                out.add_term(key, c * k.p as f64);
            }
            if k.q > 0 {
                let mut key = k.shift(0, -1);
                key.q -= 1;
                out.add_term(key, c * k.q as f64);
            }
        }
        out
    }

    /// Value at `z` on the doubly cut plane, principal branches.
    pub fn eval(&self, z: C) -> Result<C> {
        let branches_at_0 = self.terms.keys().any(|k| !k.a.is_zero() || k.p > 0);
        let branches_at_1 = self.terms.keys().any(|k| !k.b.is_zero() || k.q > 0);
        if z.im == 0.0 && ((branches_at_0 && z.re <= 0.0) || (branches_at_1 && z.re >= 1.0)) {
            return Err(Error::OnBranchCut { re: z.re, im: z.im });
        }
        self.eval_with_logs(z.ln(), (C::new(1.0, 0.0) - z).ln())
    }

    /// Value given chosen determinations of `log z` and `log(1-z)`; used for
    /// analytic continuation off the principal sheet.
    pub fn eval_with_logs(&self, log_z: C, log_1mz: C) -> Result<C> {
        let l0 = log_z;
        let l1 = -log_1mz;
        let mut total = C::new(0.0, 0.0);
        for (k, &c) in &self.terms {
            let mut v = c;
            if !k.a.is_zero() {
                v *= (log_z * k.a.value()).exp();
            }
            if !k.b.is_zero() {
                v *= (log_1mz * k.b.value()).exp();
            }
            if k.p > 0 {
                v *= l0.powu(k.p);
            }
            if k.q > 0 {
                v *= l1.powu(k.q);
            }
            total += v;
        }
        if !(total.re.is_finite() && total.im.is_finite()) {
            return Err(Error::Overflow);
        }
        Ok(total)
    }
}

impl Ring for FunElem {
    fn zero() -> Self {
        FunElem::zero()
    }
    fn one() -> Self {
        FunElem::constant(C::new(1.0, 0.0))
    }
    fn from_int(n: i64) -> Self {
        FunElem::constant(C::new(n as f64, 0.0))
    }
    fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, &c) in &rhs.terms {
            out.add_term(k.clone(), c);
        }
        out
    }
    fn mul(&self, rhs: &Self) -> Self {
        let mut out = FunElem::zero();
        for (ka, &ca) in &self.terms {
            for (kb, &cb) in &rhs.terms {
                out.add_term(ka.mul(kb), ca * cb);
            }
        }
        out
    }
    fn neg(&self) -> Self {
        self.scale(C::new(-1.0, 0.0))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn is_negligible(&self) -> bool {
        self.terms.values().all(|c| c.norm() <= COMPLEX_TOL)
    }
    fn derivation(&self) -> Option<Self> {
        Some(self.derive())
    }
}

/// `d(f1) f2 - f1 d(f2)`.
pub fn wronskian(f1: &FunElem, f2: &FunElem) -> FunElem {
    f1.derive().mul(f2).sub(&f1.mul(&f2.derive()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Center {
    Zero,
    One,
}

/// Deck transformation around `0` or `1`.
///
/// Around `0` the loop is counterclockwise: `z^a` picks up `e^{2 i pi a}` and
/// `L0` shifts by `2 i pi`. Around `1` the loop is clockwise: `(1-z)^b` picks
/// up `e^{-2 i pi b}` and `L1` shifts by `2 i pi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonodromyOp {
    pub center: Center,
}

impl MonodromyOp {
    pub const D0: MonodromyOp = MonodromyOp { center: Center::Zero };
    pub const D1: MonodromyOp = MonodromyOp { center: Center::One };

    /// `D^n(f)`.
    pub fn apply(&self, n: i64, f: &FunElem) -> FunElem {
        let shift = C::new(0.0, 2.0 * PI * n as f64);
        let mut out = FunElem::zero();
        for (k, &c) in f.terms() {
            let (phase_exp, log_power) = match self.center {
                Center::Zero => (k.a.value(), k.p),
                Center::One => (-k.b.value(), k.q),
            };
            let phase = C::new(0.0, 2.0 * PI * n as f64 * phase_exp).exp();
            // (L + shift)^m expanded binomially.
            for j in 0..=log_power {
                let mut key = k.clone();
                match self.center {
                    Center::Zero => key.p = j,
                    Center::One => key.q = j,
                }
                let binom = rational_to_f64(&binomial(log_power as u64, j as u64));
                out.add_term(key, c * phase * binom * shift.powu(log_power - j));
            }
        }
        out
    }

    /// Coefficients `P_j` with `f = sum_j P_j L^j` for the log symbol moved by
    /// this operator. Coefficients whose terms are all below `tol` read as
    /// zero; trailing zeros are dropped.
    pub fn log_coefficients(&self, f: &FunElem, tol: f64) -> Vec<FunElem> {
        let mut parts: Vec<FunElem> = Vec::new();
        for (k, &c) in f.terms() {
            if c.norm() <= tol {
                continue;
            }
            let mut key = k.clone();
            let j = match self.center {
                Center::Zero => core::mem::replace(&mut key.p, 0),
                Center::One => core::mem::replace(&mut key.q, 0),
            } as usize;
            if parts.len() <= j {
                parts.resize(j + 1, FunElem::zero());
            }
            parts[j].add_term(key, c);
        }
        while parts.last().is_some_and(FunElem::is_empty) {
            parts.pop();
        }
        parts
    }

    /// Numerically continues `f` along `n` loops of the circle through
    /// `z_start` centred at the singularity, in this operator's orientation,
    /// with `steps` points per loop, and evaluates at the end point.
    pub fn continue_numerically(&self, f: &FunElem, n: i64, z_start: C, steps: usize) -> Result<C> {
        let center = match self.center {
            Center::Zero => C::new(0.0, 0.0),
            Center::One => C::new(1.0, 0.0),
        };
        let radius = (z_start - center).norm();
        if radius == 0.0 || radius >= 1.0 {
            return Err(Error::InvalidArgument("loop must have radius in (0, 1)"));
        }
        if z_start.im == 0.0 && (z_start.re <= 0.0 || z_start.re >= 1.0) {
            return Err(Error::OnBranchCut { re: z_start.re, im: z_start.im });
        }
        let orientation = match self.center {
            Center::Zero => 1.0,
            Center::One => -1.0,
        };
        let one = C::new(1.0, 0.0);
        let mut log_z = z_start.ln();
        let mut log_1mz = (one - z_start).ln();
        let mut prev = z_start;
        let total = steps.max(8) * n.unsigned_abs() as usize;
        let dir = orientation * n.signum() as f64;
        for k in 1..=total {
            let theta = dir * 2.0 * PI * k as f64 / steps.max(8) as f64;
            let z = center + (z_start - center) * C::new(0.0, theta).exp();
            log_z += (z / prev).ln();
            log_1mz += ((one - z) / (one - prev)).ln();
            prev = z;
        }
        f.eval_with_logs(log_z, log_1mz)
    }
}

/// `D^n(f)` for the given operator.
pub fn apply_monodromy(op: MonodromyOp, n: i64, f: &FunElem) -> FunElem {
    op.apply(n, f)
}

/// Decomposition of `f` by powers of the log symbol moved by `op`.
pub fn log_coefficient_elimination(f: &FunElem, op: MonodromyOp, tol: f64) -> Vec<FunElem> {
    op.log_coefficients(f, tol)
}

/// Compares two elements term by term with an absolute tolerance.
pub fn approx_eq(f: &FunElem, g: &FunElem, tol: f64) -> bool {
    f.sub(g).terms().all(|(_, c)| c.norm() <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    fn table() -> (SymbolTable, Symbol, Symbol) {
        let mut t = SymbolTable::new();
        let alpha = t.declare("alpha", 0.3).unwrap();
        let beta = t.declare("beta", core::f64::consts::SQRT_2).unwrap();
        (t, alpha, beta)
    }

    #[test]
    fn symbols_are_write_once() {
        let (mut t, _, _) = table();
        assert!(t.declare("beta", core::f64::consts::SQRT_2).is_ok());
        assert_eq!(t.declare("beta", 1.0), Err(Error::SymbolRedeclared("beta".into())));
        assert_eq!(t.get("gamma").unwrap_err(), Error::UndeclaredSymbol("gamma".into()));
    }

    #[test]
    fn derive_power_product() {
        let (_, alpha, beta) = table();
        let (a, b) = (Exponent::symbol(&alpha), Exponent::symbol(&beta));
        let f = FunElem::monomial(c(1.0), a.clone(), b.clone());
        let want = FunElem::from_terms([
            (FunKey::new(a.add_int(-1), b.clone(), 0, 0), c(0.3)),
            (FunKey::new(a.clone(), b.add_int(-1), 0, 0), c(-core::f64::consts::SQRT_2)),
        ]);
        assert!(approx_eq(&f.derive(), &want, 1e-15));
        assert!(FunElem::one().derive().is_empty());
    }

    #[test]
    fn derive_log_square() {
        let f = FunElem::l0().mul(&FunElem::l0());
        let want = FunElem::term(c(2.0), FunKey::new(Exponent::int(-1), Exponent::zero(), 1, 0));
        assert_eq!(f.derive(), want);
        let g = FunElem::l1();
        assert_eq!(g.derive(), FunElem::one_minus_z_pow(Exponent::int(-1)));
    }

    #[test]
    fn wronskian_examples() {
        let (_, alpha, _) = table();
        let f = FunElem::l0().add(&FunElem::z());
        assert!(wronskian(&f, &f).is_negligible());
        assert_eq!(wronskian(&FunElem::z(), &FunElem::one()), FunElem::one());
        let gamma = Exponent::rational(q(2, 3));
        let a = Exponent::symbol(&alpha);
        let w = wronskian(&FunElem::z_pow(a.clone()), &FunElem::z_pow(gamma.clone()));
        let want = FunElem::z_pow(a.add(&gamma).add_int(-1)).scale(c(0.3 - 2.0 / 3.0));
        assert!(approx_eq(&w, &want, 1e-15));
    }

    #[test]
    fn monodromy_examples() {
        let half = FunElem::z_pow(Exponent::rational(q(1, 2)));
        assert!(approx_eq(&MonodromyOp::D0.apply(1, &half), &half.neg(), 1e-15));
        let third = FunElem::z_pow(Exponent::rational(q(1, 3)));
        assert!(approx_eq(&MonodromyOp::D0.apply(3, &third), &third, 1e-14));
        let shifted = MonodromyOp::D0.apply(5, &FunElem::l0());
        let want = FunElem::l0().add(&FunElem::constant(C::new(0.0, 10.0 * PI)));
        assert!(approx_eq(&shifted, &want, 1e-13));
        // D1 leaves L0 alone.
        assert_eq!(MonodromyOp::D1.apply(2, &FunElem::l0()), FunElem::l0());
    }

    #[test]
    fn eval_examples() {
        let (_, alpha, _) = table();
        let za = FunElem::z_pow(Exponent::symbol(&alpha));
        assert!((za.eval(c(1.0)).unwrap() - c(1.0)).norm() < 1e-15);
        let l1 = FunElem::l1().eval(c(0.5)).unwrap();
        assert!((l1 - c(2f64.ln())).norm() < 1e-15);
        let f = FunElem::monomial(c(1.0), Exponent::rational(q(1, 2)), Exponent::rational(q(1, 3)));
        let want = 2f64.powf(-0.5) * 2f64.powf(-1.0 / 3.0);
        assert!((f.eval(c(0.5)).unwrap() - c(want)).norm() < 1e-15);
        assert!(matches!(f.eval(c(-1.0)), Err(Error::OnBranchCut { .. })));
        assert!(matches!(f.eval(c(2.0)), Err(Error::OnBranchCut { .. })));
    }

    #[test]
    fn cuts_apply_only_to_factors_present() {
        let f = FunElem::z_pow(Exponent::int(3));
        assert!((f.eval(c(1.0)).unwrap() - c(1.0)).norm() < 1e-15);
        assert!(f.eval(c(0.0)).is_err());
        assert!(FunElem::one().eval(c(-3.0)).is_ok());
        assert!(FunElem::l1().eval(c(1.0)).is_err());
    }

    #[test]
    fn log_coefficients() {
        let (_, alpha, _) = table();
        let za = FunElem::z_pow(Exponent::symbol(&alpha));
        let f = za.mul(&FunElem::l0()).mul(&FunElem::l0());
        let parts = log_coefficient_elimination(&f, MonodromyOp::D0, 0.0);
        assert_eq!(parts.len(), 3);
        assert!(parts[0].is_empty() && parts[1].is_empty());
        assert_eq!(parts[2], za);
        assert!(log_coefficient_elimination(&FunElem::zero(), MonodromyOp::D0, 0.0).is_empty());
    }

    #[test]
    fn numeric_loop_matches_operator() {
        let (_, alpha, beta) = table();
        let f = FunElem::monomial(c(1.0), Exponent::symbol(&alpha), Exponent::symbol(&beta))
            .mul(&FunElem::l0().add(&FunElem::l1()));
        let z0 = C::new(0.4, 0.1);
        for op in [MonodromyOp::D0, MonodromyOp::D1] {
            for n in [-1, 1, 2] {
                let numeric = op.continue_numerically(&f, n, z0, 64).unwrap();
                let exact = op.apply(n, &f).eval(z0).unwrap();
                assert!((numeric - exact).norm() < 1e-8 * exact.norm().max(1.0), "{op:?} {n}");
            }
        }
    }

    #[test]
    fn exponent_display() {
        let (_, alpha, beta) = table();
        let e = Exponent::symbol(&beta).scale(q(2, 1)).with_symbol(&alpha, q(-1, 2)).add_int(-1);
        assert_eq!(e.to_string(), "-1/2*alpha+2*beta-1");
        assert_eq!(Exponent::zero().to_string(), "0");
    }
}
