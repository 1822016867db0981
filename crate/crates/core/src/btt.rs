//! Independence certificates for the coefficients of solutions of
//! `d(S) = M S, <S|1> = 1`.
//!
//! Universal statements over the ring are decided relative to explicit finite
//! search spaces of exponent keys; every report records the bounds it used.
//! Keys are formal: two different keys are treated as independent even when
//! the functions they denote satisfy a polynomial identity such as
//! `z + (1-z) = 1`. A relation found over keys is therefore always a genuine
//! functional relation, while a certificate is relative to the key basis.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::funring::{wronskian, Exponent, FunElem, FunKey, MonodromyOp};
use crate::linalg::{null_space, svd, CMatrix};
use crate::ncseries::{adjoint_multiplier_apply, Alphabet, AlphaVector, Series, Word};
use crate::ring::{Rational, Ring};
use crate::{Error, Result};

type C = Complex64;

/// `M = sum_x u_x x` with every `u_x` in the monoid subring (`p = q = 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierSpec {
    names: Vec<String>,
    u: Vec<FunElem>,
}

impl MultiplierSpec {
    /// Rejects zero multipliers and coefficients carrying logarithms.
    pub fn new(names: Vec<String>, u: Vec<FunElem>) -> Result<Self> {
        let spec = Self::allowing_zero(names, u)?;
        if let Some(i) = spec.u.iter().position(FunElem::is_empty) {
            return Err(Error::ZeroMultiplier(i));
        }
        Ok(spec)
    }

    pub fn allowing_zero(names: Vec<String>, u: Vec<FunElem>) -> Result<Self> {
        if names.len() != u.len() {
            return Err(Error::InvalidArgument("one multiplier coefficient per letter"));
        }
        if !names.is_empty() {
            Alphabet::new(names.iter().cloned())?;
        }
        if let Some(i) = u.iter().position(|f| !f.is_monoid_element()) {
            return Err(Error::NotInMonoidRing(i));
        }
        Ok(MultiplierSpec { names, u })
    }

    /// Letters `x0, x1, ...` for the given coefficients.
    pub fn indexed(u: Vec<FunElem>) -> Result<Self> {
        let names = (0..u.len()).map(|i| format!("x{i}")).collect();
        Self::new(names, u)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn coefficients(&self) -> &[FunElem] {
        &self.u
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn alphabet(&self) -> Result<Alphabet> {
        Alphabet::new(self.names.iter().cloned())
    }

    /// `M` as a degree-1 homogeneous series truncated at `max_degree`.
    pub fn as_series(&self, alphabet: &Alphabet, max_degree: usize) -> Result<Series<FunElem>> {
        self.check_alphabet(alphabet)?;
        Series::from_terms(
            alphabet.clone(),
            max_degree,
            self.u.iter().enumerate().map(|(i, u)| (Word::letter(i), u.clone())),
        )
    }

    fn check_alphabet(&self, alphabet: &Alphabet) -> Result<()> {
        if alphabet.len() != self.names.len() || alphabet.names().zip(&self.names).any(|(a, b)| a != b) {
            return Err(Error::AlphabetMismatch);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    CertifiedIndependent,
    RelationFound,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::CertifiedIndependent => "certified_independent",
            Verdict::RelationFound => "relation_found",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    Iii,
    Iv,
    IiiPrime,
    NumericRank,
}

impl Condition {
    pub fn as_str(&self) -> &'static str {
        match self {
            Condition::Iii => "iii",
            Condition::Iv => "iv",
            Condition::IiiPrime => "iii'",
            Condition::NumericRank => "numeric-rank",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    /// `d(f) = sum_x alpha_x u_x`.
    Derivative { alpha: AlphaVector<C>, f: FunElem },
    /// `W(f1, f2) = f2^2 sum_x alpha_x u_x`.
    Wronskian { alpha: AlphaVector<C>, f1: FunElem, f2: FunElem },
    /// Null vector of the evaluation matrix.
    Numeric { coefficients: Vec<C> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceReport {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub search_bounds: String,
    pub condition: Condition,
    /// Named partial verdicts, e.g. the two halves of condition iv.
    pub sub_verdicts: Vec<(String, Verdict)>,
    /// `(sigma_min, sigma_max)` for numeric certificates.
    pub singular_values: Option<(f64, f64)>,
}

impl IndependenceReport {
    fn new(verdict: Verdict, condition: Condition, bounds: String) -> Self {
        IndependenceReport {
            verdict,
            witness: None,
            search_bounds: bounds,
            condition,
            sub_verdicts: Vec::new(),
            singular_values: None,
        }
    }
}

/// Finite set of keys an unknown `f` may be supported on.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpace {
    pub keys: Vec<FunKey>,
    pub description: String,
}

impl SearchSpace {
    pub fn new(keys: Vec<FunKey>, description: impl Into<String>) -> Self {
        let keys: BTreeSet<FunKey> = keys.into_iter().collect();
        SearchSpace {
            keys: keys.into_iter().collect(),
            description: description.into(),
        }
    }

    /// Keys `z^a (1-z)^b` with integer `a, b` in the given inclusive ranges.
    pub fn integer_grid(a_min: i64, a_max: i64, b_min: i64, b_max: i64) -> Self {
        let mut keys = Vec::new();
        for a in a_min..=a_max {
            for b in b_min..=b_max {
                keys.push(FunKey::new(Exponent::int(a), Exponent::int(b), 0, 0));
            }
        }
        Self::new(keys, format!("z^a(1-z)^b, a in [{a_min},{a_max}], b in [{b_min},{b_max}]"))
    }

    /// Keys `1` and `z^{(k+1) beta - l}` for `0 <= k <= k_max` and
    /// `l_min <= l <= l_max`.
    pub fn beta_ladder(beta: &Exponent, k_max: u32, l_min: i64, l_max: i64) -> Self {
        let mut keys = alloc::vec![FunKey::one()];
        for k in 0..=k_max {
            for l in l_min..=l_max {
                let a = beta.scale(Rational::from_integer(k as i128 + 1)).add_int(-l);
                keys.push(FunKey::new(a, Exponent::zero(), 0, 0));
            }
        }
        Self::new(
            keys,
            format!("1 and z^((k+1)*({beta})-l), 0<=k<={k_max}, {l_min}<=l<={l_max}"),
        )
    }

    /// Union with another space.
    pub fn union(&self, other: &SearchSpace) -> Self {
        let mut keys = self.keys.clone();
        keys.extend(other.keys.iter().cloned());
        Self::new(keys, format!("({}) or ({})", self.description, other.description))
    }
}

/// Relative tolerance for the elimination and for re-checking witnesses.
const REL_TOL: f64 = 1e-9;

/// Finds `(c, alpha)` with `sum_k c_k cols_f[k] = sum_x alpha_x cols_alpha[x]`
/// and `alpha != 0`.
fn find_relation(cols_f: &[FunElem], cols_alpha: &[FunElem]) -> Option<(Vec<C>, Vec<C>)> {
    if cols_alpha.is_empty() {
        return None;
    }
    let mut rows: BTreeMap<FunKey, usize> = BTreeMap::new();
    for col in cols_f.iter().chain(cols_alpha) {
        for (k, _) in col.terms() {
            let next = rows.len();
            rows.entry(k.clone()).or_insert(next);
        }
    }
    let nf = cols_f.len();
    let ncols = nf + cols_alpha.len();
    let mut a = CMatrix::zeros(rows.len().max(1), ncols);
    for (j, col) in cols_f.iter().enumerate() {
        for (k, &c) in col.terms() {
            a[(rows[k], j)] = c;
        }
    }
    for (j, col) in cols_alpha.iter().enumerate() {
        for (k, &c) in col.terms() {
            a[(rows[k], nf + j)] = -c;
        }
    }
    let best = null_space(&a, 1e-12)
        .into_iter()
        .map(|v| {
            let weight = v[nf..].iter().map(|c| c.norm()).fold(0.0, f64::max);
            (weight, v)
        })
        .filter(|(w, _)| *w > REL_TOL)
        .max_by(|a, b| a.0.total_cmp(&b.0))?;
    let (weight, v) = best;
    // Normalize so the largest alpha entry is 1.
    let pivot = v[nf..]
        .iter()
        .copied()
        .find(|c| (c.norm() - weight).abs() <= 1e-15 * weight)
        .unwrap_or(C::new(weight, 0.0));
    let scaled: Vec<C> = v.iter().map(|c| clean(c / pivot)).collect();
    Some((scaled[..nf].to_vec(), scaled[nf..].to_vec()))
}

/// Rounds values within a few ulps of a small integer or zero.
fn clean(c: C) -> C {
    let snap = |x: f64| {
        let r = x.round();
        if (x - r).abs() <= 1e-13 * r.abs().max(1.0) {
            r
        } else {
            x
        }
    };
    C::new(snap(c.re), snap(c.im))
}

fn combine(keys: &[FunKey], coeffs: &[C]) -> FunElem {
    FunElem::from_terms(keys.iter().cloned().zip(coeffs.iter().copied()))
}

fn combine_u(u: &[FunElem], alpha: &[C]) -> FunElem {
    u.iter()
        .zip(alpha)
        .fold(FunElem::zero(), |acc, (ux, &a)| acc.add(&ux.scale(a)))
}

fn alpha_vector(alpha: &[C]) -> AlphaVector<C> {
    let mut v = AlphaVector::new();
    for (i, &a) in alpha.iter().enumerate() {
        if a.norm() > REL_TOL {
            v.set(i, a);
        }
    }
    v
}

fn residual_small(residual: &FunElem, scale: f64) -> bool {
    residual.max_abs_coeff() <= REL_TOL * scale.max(1.0)
}

fn check_monoid(m: &MultiplierSpec) -> Result<()> {
    match m.u.iter().position(|f| !f.is_monoid_element()) {
        Some(i) => Err(Error::NotInMonoidRing(i)),
        None => Ok(()),
    }
}

/// Condition iii: `d(f) = sum_x alpha_x u_x` forces `alpha = 0`, with `f`
/// ranging over the span of `space`.
pub fn check_condition_iii(m: &MultiplierSpec, space: &SearchSpace) -> Result<IndependenceReport> {
    check_monoid(m)?;
    let bounds = space.description.clone();
    let cols: Vec<FunElem> = space.keys.iter().map(|k| FunElem::term(C::new(1.0, 0.0), k.clone()).derive()).collect();
    if let Some((c, alpha)) = find_relation(&cols, &m.u) {
        let f = combine(&space.keys, &c);
        let rhs = combine_u(&m.u, &alpha);
        if residual_small(&f.derive().sub(&rhs), rhs.max_abs_coeff()) {
            let mut report = IndependenceReport::new(Verdict::RelationFound, Condition::Iii, bounds);
            report.witness = Some(Witness::Derivative { alpha: alpha_vector(&alpha), f });
            return Ok(report);
        }
        return Ok(IndependenceReport::new(Verdict::Inconclusive, Condition::Iii, bounds));
    }
    Ok(IndependenceReport::new(Verdict::CertifiedIndependent, Condition::Iii, bounds))
}

/// Condition iv: the `u_x` are free over the constants and
/// `d(C) ∩ span(u_x) = {0}`.
pub fn check_condition_iv(m: &MultiplierSpec, space: &SearchSpace) -> Result<IndependenceReport> {
    check_monoid(m)?;
    let bounds = space.description.clone();
    let free = match find_relation(&[], &m.u) {
        Some((_, alpha)) => {
            let mut report = IndependenceReport::new(Verdict::RelationFound, Condition::Iv, bounds.clone());
            report.witness = Some(Witness::Derivative { alpha: alpha_vector(&alpha), f: FunElem::zero() });
            report.sub_verdicts.push(("k-free".to_string(), Verdict::RelationFound));
            report
        }
        None => IndependenceReport::new(Verdict::CertifiedIndependent, Condition::Iv, bounds.clone()),
    };
    if free.verdict == Verdict::RelationFound {
        return Ok(free);
    }
    let inter = check_condition_iii(m, space)?;
    let mut report = IndependenceReport::new(inter.verdict, Condition::Iv, bounds);
    report.witness = inter.witness;
    report.sub_verdicts.push(("k-free".to_string(), Verdict::CertifiedIndependent));
    report.sub_verdicts.push(("d(C) meets span trivially".to_string(), inter.verdict));
    Ok(report)
}

/// Condition iii': `W(f1, f2) = f2^2 sum_x alpha_x u_x` forces `alpha = 0`,
/// for each candidate `f2` and `f1` ranging over `space`. Without a witness
/// the result is inconclusive, since `f2` cannot be exhausted.
pub fn check_condition_iii_prime(
    m: &MultiplierSpec,
    f2_candidates: &[FunElem],
    space: &SearchSpace,
) -> Result<IndependenceReport> {
    check_monoid(m)?;
    if f2_candidates.iter().any(FunElem::is_empty) {
        return Err(Error::ZeroCandidate);
    }
    let bounds = format!("f1 over {}; {} candidate(s) for f2", space.description, f2_candidates.len());
    for f2 in f2_candidates {
        let sq = f2.mul(f2);
        let cols: Vec<FunElem> = space
            .keys
            .iter()
            .map(|k| wronskian(&FunElem::term(C::new(1.0, 0.0), k.clone()), f2))
            .collect();
        let alpha_cols: Vec<FunElem> = m.u.iter().map(|u| sq.mul(u)).collect();
        if let Some((c, alpha)) = find_relation(&cols, &alpha_cols) {
            let f1 = combine(&space.keys, &c);
            let rhs = sq.mul(&combine_u(&m.u, &alpha));
            if residual_small(&wronskian(&f1, f2).sub(&rhs), rhs.max_abs_coeff()) {
                let mut report = IndependenceReport::new(Verdict::RelationFound, Condition::IiiPrime, bounds);
                report.witness = Some(Witness::Wronskian { alpha: alpha_vector(&alpha), f1, f2: f2.clone() });
                return Ok(report);
            }
        }
    }
    Ok(IndependenceReport::new(Verdict::Inconclusive, Condition::IiiPrime, bounds))
}

/// Outcome of [`verify_ncde`] with the offending words.
#[derive(Clone, Debug, PartialEq)]
pub struct NcdeCheck {
    pub unit_ok: bool,
    pub mismatches: Vec<Word>,
}

impl NcdeCheck {
    pub fn holds(&self) -> bool {
        self.unit_ok && self.mismatches.is_empty()
    }
}

/// Checks `<S|1> = 1` and `d<S|xw> = u_x <S|w>` for all `|xw| <= N`.
pub fn verify_ncde_detailed(s: &Series<FunElem>, m: &MultiplierSpec) -> Result<NcdeCheck> {
    m.check_alphabet(s.alphabet())?;
    let unit_ok = s.coeff(&Word::empty()).approx_eq(&FunElem::one());
    let n = s.max_degree();
    let mut words: BTreeSet<Word> = BTreeSet::new();
    for w in s.support() {
        if !w.is_empty() {
            words.insert(w.clone());
        }
        if w.len() < n {
            for x in 0..m.len() {
                words.insert(w.prepend(x));
            }
        }
    }
    let mut mismatches = Vec::new();
    for xw in words {
        let x = xw.first().expect("nonempty");
        let w = Word::from_indices(xw.letters()[1..].iter().map(|&i| i as usize));
        let lhs = s.coeff(&xw).derive();
        let rhs = m.u[x].mul(&s.coeff(&w));
        if !lhs.approx_eq(&rhs) {
            mismatches.push(xw);
        }
    }
    Ok(NcdeCheck { unit_ok, mismatches })
}

pub fn verify_ncde(s: &Series<FunElem>, m: &MultiplierSpec) -> Result<bool> {
    Ok(verify_ncde_detailed(s, m)?.holds())
}

/// `M^† Q + d(Q) = 0`, i.e. `d<Q|u> = -sum_x u_x <Q|xu>` for every `u`.
pub fn coefficient_recursion_check(q: &Series<FunElem>, m: &MultiplierSpec) -> Result<bool> {
    let ms = m.as_series(q.alphabet(), q.max_degree())?;
    let total = adjoint_multiplier_apply(&ms, q)?.add(&q.coefficientwise_derivation()?)?;
    let ok = total.terms().all(|(_, c)| c.is_negligible());
    Ok(ok)
}

/// Counterexample family separating conditions iii and iii': `X = {x0}`,
/// `u0 = z^beta` and `<S|x0^n> = z^{n(beta+1)} / ((beta+1)^n n!)`.
#[derive(Clone, Debug)]
pub struct CounterexampleFixture {
    pub beta: Exponent,
    pub series: Series<FunElem>,
    pub multiplier: MultiplierSpec,
}

pub fn counterexample_fixture(beta: &Exponent, max_degree: usize) -> Result<CounterexampleFixture> {
    if beta.as_rational().is_some() {
        return Err(Error::RationalExponent);
    }
    if max_degree == 0 {
        return Err(Error::InvalidArgument("fixture needs N >= 1"));
    }
    let alphabet = Alphabet::new(["x0"])?;
    let b1 = beta.add_int(1);
    let b1v = b1.value();
    let mut terms = Vec::with_capacity(max_degree + 1);
    let mut denom = 1.0;
    for n in 0..=max_degree {
        if n > 0 {
            denom *= b1v * n as f64;
        }
        let a = b1.scale(Rational::from_integer(n as i128));
        let coeff = FunElem::monomial(C::new(1.0 / denom, 0.0), a, Exponent::zero());
        terms.push((Word::from_indices(core::iter::repeat_n(0, n)), coeff));
    }
    let series = Series::from_terms(alphabet, max_degree, terms)?;
    let multiplier = MultiplierSpec::new(alloc::vec!["x0".to_string()], alloc::vec![FunElem::z_pow(beta.clone())])?;
    Ok(CounterexampleFixture { beta: beta.clone(), series, multiplier })
}

impl CounterexampleFixture {
    /// The differential algebra generated by `z^beta`: `1` and
    /// `z^{(k+1) beta - l}` with `k, l >= 0`, cut at the given bounds.
    pub fn c0_space(&self, k_max: u32, l_max: i64) -> SearchSpace {
        SearchSpace::beta_ladder(&self.beta, k_max, 0, l_max)
    }

    /// The same ladder with `l` allowed negative, which contains `z^{beta+1}`.
    pub fn extended_space(&self, k_max: u32, l_max: i64) -> SearchSpace {
        SearchSpace::beta_ladder(&self.beta, k_max, -l_max, l_max)
    }
}

/// Numeric certificate from the evaluation matrix `[f_j(z_i)]`: certified if
/// `sigma_min > tol sigma_max`, a relation if `sigma_min < tol sigma_max / 100`,
/// inconclusive in between.
pub fn numeric_independence_certificate<F>(funcs: &[F], points: &[C], tol: f64) -> Result<IndependenceReport>
where
    F: Fn(C) -> Result<C>,
{
    let bounds = format!("{} functions at {} sample points, tol {tol:e}", funcs.len(), points.len());
    if funcs.is_empty() {
        return Ok(IndependenceReport::new(Verdict::CertifiedIndependent, Condition::NumericRank, bounds));
    }
    if points.len() < funcs.len() {
        return Err(Error::TooFewSamples { points: points.len(), funcs: funcs.len() });
    }
    let mut a = CMatrix::zeros(points.len(), funcs.len());
    for (j, f) in funcs.iter().enumerate() {
        for (i, &z) in points.iter().enumerate() {
            let v = f(z).map_err(|_| Error::EvaluationFailed { index: j })?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::EvaluationFailed { index: j });
            }
            a[(i, j)] = v;
        }
    }
    let dec = svd(&a)?;
    let smax = dec.singular_values[0];
    let smin = *dec.singular_values.last().expect("nonempty");
    let verdict = if smax == 0.0 || smin < tol * smax / 100.0 {
        Verdict::RelationFound
    } else if smin > tol * smax {
        Verdict::CertifiedIndependent
    } else {
        Verdict::Inconclusive
    };
    let mut report = IndependenceReport::new(verdict, Condition::NumericRank, bounds);
    report.singular_values = Some((smin, smax));
    if verdict == Verdict::RelationFound {
        report.witness = Some(Witness::Numeric { coefficients: dec.v.column(funcs.len() - 1) });
    }
    Ok(report)
}

/// Numeric certificate for ring elements.
pub fn numeric_certificate_for(funcs: &[FunElem], points: &[C], tol: f64) -> Result<IndependenceReport> {
    let evals: Vec<_> = funcs.iter().map(|f| move |z: C| f.eval(z)).collect();
    numeric_independence_certificate(&evals, points, tol)
}

/// Sixteen points evenly spread over `(0.1, 0.9)`, shifted by `0.05 i`.
pub fn default_sample_points() -> Vec<C> {
    (0..16)
        .map(|k| C::new(0.1 + 0.8 * (k as f64 + 0.5) / 16.0, 0.05))
        .collect()
}

/// Rank thresholds used by [`numeric_independence_certificate`].
pub const NUMERIC_RANK_TOL: f64 = 1e-7;

/// `max_i |e^{2 i pi n alpha_i} - 1|`.
pub fn recurrence_defect(alphas: &[f64], n: u64) -> f64 {
    alphas
        .iter()
        .map(|&a| {
            let t = (n as f64 * a).rem_euclid(1.0);
            (C::new(0.0, 2.0 * PI * t).exp() - C::new(1.0, 0.0)).norm()
        })
        .fold(0.0, f64::max)
}

/// Smallest `n` in `[1, n_max]` with defect below `eps`.
pub fn recurrence_times(alphas: &[f64], eps: f64, n_max: u64) -> Result<u64> {
    if eps <= 0.0 || n_max == 0 {
        return Err(Error::InvalidArgument("need eps > 0 and n_max >= 1"));
    }
    let mut best = (1, f64::INFINITY);
    for n in 1..=n_max {
        let d = recurrence_defect(alphas, n);
        if d < eps {
            return Ok(n);
        }
        if d < best.1 {
            best = (n, d);
        }
    }
    Err(Error::NoRecurrence { best_n: best.0, defect: best.1 })
}

/// One step of the monodromy elimination for `f = P0 + P1 L` of log degree
/// one: picks a recurrence time `n` for the characters of `P1` and reads
/// `P1(z)` off `(D^n f - f)(z) / (2 i pi n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogElimination {
    pub n: u64,
    pub recovered: C,
    pub direct: C,
}

pub fn eliminate_log_coefficient(
    f: &FunElem,
    op: MonodromyOp,
    z: C,
    eps: f64,
    n_max: u64,
) -> Result<LogElimination> {
    let parts = op.log_coefficients(f, 0.0);
    if parts.len() > 2 {
        return Err(Error::InvalidArgument("log degree must be at most one"));
    }
    let p1 = parts.get(1).cloned().unwrap_or_default();
    let alphas: Vec<f64> = f
        .terms()
        .map(|(k, _)| match op.center {
            crate::funring::Center::Zero => k.a.value(),
            crate::funring::Center::One => -k.b.value(),
        })
        .collect();
    let n = recurrence_times(&alphas, eps, n_max)?;
    let moved = op.apply(n as i64, f).sub(f).eval(z)?;
    let recovered = moved / C::new(0.0, 2.0 * PI * n as f64);
    Ok(LogElimination { n, recovered, direct: p1.eval(z)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funring::SymbolTable;

    fn c(x: f64) -> C {
        C::new(x, 0.0)
    }

    fn zp(a: i64) -> FunElem {
        FunElem::z_pow(Exponent::int(a))
    }

    fn beta() -> Exponent {
        let mut t = SymbolTable::new();
        Exponent::symbol(&t.declare("beta", core::f64::consts::SQRT_2).unwrap())
    }

    #[test]
    fn condition_iii_examples() {
        let m = MultiplierSpec::indexed(alloc::vec![zp(-1), FunElem::one_minus_z_pow(Exponent::int(-1))]).unwrap();
        let r = check_condition_iii(&m, &SearchSpace::integer_grid(-1, 1, -1, 1)).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedIndependent);

        let m = MultiplierSpec::indexed(alloc::vec![zp(1).scale(c(2.0))]).unwrap();
        let r = check_condition_iii(&m, &SearchSpace::integer_grid(0, 3, 0, 0)).unwrap();
        assert_eq!(r.verdict, Verdict::RelationFound);
        match r.witness.unwrap() {
            Witness::Derivative { alpha, f } => {
                assert_eq!(alpha.get(0), c(1.0));
                assert!(crate::funring::approx_eq(&f.derive(), &zp(1).scale(c(2.0)), 1e-12));
                assert!((f.coeff(&FunKey::new(Exponent::int(2), Exponent::zero(), 0, 0)) - c(1.0)).norm() < 1e-12);
            }
            w => panic!("unexpected witness {w:?}"),
        }

        let empty = MultiplierSpec::new(Vec::new(), Vec::new()).unwrap();
        let r = check_condition_iii(&empty, &SearchSpace::integer_grid(0, 1, 0, 1)).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedIndependent);
    }

    #[test]
    fn condition_iv_examples() {
        let m = MultiplierSpec::indexed(alloc::vec![zp(-1), zp(-1).scale(c(2.0))]).unwrap();
        let r = check_condition_iv(&m, &SearchSpace::integer_grid(-1, 1, -1, 1)).unwrap();
        assert_eq!(r.verdict, Verdict::RelationFound);
        assert_eq!(r.sub_verdicts[0], ("k-free".into(), Verdict::RelationFound));

        let m = MultiplierSpec::indexed(alloc::vec![zp(-1), FunElem::one_minus_z_pow(Exponent::int(-1))]).unwrap();
        let r = check_condition_iv(&m, &SearchSpace::integer_grid(-1, 1, -1, 1)).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedIndependent);
        assert_eq!(r.sub_verdicts.len(), 2);
    }

    #[test]
    fn multiplier_validation() {
        assert_eq!(
            MultiplierSpec::indexed(alloc::vec![FunElem::l0()]).unwrap_err(),
            Error::NotInMonoidRing(0)
        );
        assert_eq!(MultiplierSpec::indexed(alloc::vec![FunElem::zero()]).unwrap_err(), Error::ZeroMultiplier(0));
        assert!(MultiplierSpec::allowing_zero(alloc::vec!["x0".into()], alloc::vec![FunElem::zero()]).is_ok());
    }

    #[test]
    fn iii_prime_examples() {
        let m = MultiplierSpec::indexed(alloc::vec![zp(-1)]).unwrap();
        let r = check_condition_iii_prime(&m, &[FunElem::one()], &SearchSpace::integer_grid(0, 4, 0, 0)).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(check_condition_iii_prime(&m, &[FunElem::zero()], &SearchSpace::integer_grid(0, 1, 0, 0)).is_err());
        let f = zp(2).add(&FunElem::l0());
        assert!(wronskian(&f, &f).is_negligible());
    }

    #[test]
    fn verify_ncde_examples() {
        let a = Alphabet::new(["x0"]).unwrap();
        let m = MultiplierSpec::indexed(alloc::vec![FunElem::one()]).unwrap();
        let one = Series::<FunElem>::one(a.clone(), 0);
        assert!(verify_ncde(&one, &m).unwrap());
        let s = Series::from_terms(a.clone(), 1, [(Word::empty(), FunElem::one()), (Word::letter(0), FunElem::z())]).unwrap();
        assert!(verify_ncde(&s, &m).unwrap());
        let bad = Series::from_terms(a, 1, [(Word::empty(), FunElem::one()), (Word::letter(0), zp(2))]).unwrap();
        let check = verify_ncde_detailed(&bad, &m).unwrap();
        assert!(!check.holds());
        assert_eq!(check.mismatches, alloc::vec![Word::letter(0)]);
    }

    #[test]
    fn recursion_examples() {
        let a = Alphabet::new(["x0"]).unwrap();
        let m = MultiplierSpec::indexed(alloc::vec![zp(-1)]).unwrap();
        let q = Series::from_terms(a.clone(), 1, [(Word::letter(0), FunElem::one()), (Word::empty(), FunElem::l0().neg())]).unwrap();
        assert!(coefficient_recursion_check(&q, &m).unwrap());
        let q = Series::from_terms(a.clone(), 1, [(Word::letter(0), FunElem::one())]).unwrap();
        assert!(!coefficient_recursion_check(&q, &m).unwrap());
        let lam = Series::from_terms(a.clone(), 1, [(Word::empty(), FunElem::constant(c(3.0)))]).unwrap();
        assert!(coefficient_recursion_check(&lam, &m).unwrap());
        let lam = Series::from_terms(a, 1, [(Word::empty(), FunElem::z())]).unwrap();
        assert!(!coefficient_recursion_check(&lam, &m).unwrap());
    }

    #[test]
    fn fixture_coefficients() {
        let b = beta();
        let fx = counterexample_fixture(&b, 4).unwrap();
        assert_eq!(fx.series.coeff(&Word::empty()), FunElem::one());
        let x0 = fx.series.coeff(&Word::letter(0));
        let want = FunElem::z_pow(b.add_int(1)).scale(c(1.0 / (core::f64::consts::SQRT_2 + 1.0)));
        assert!(crate::funring::approx_eq(&x0, &want, 1e-15));
        let x00 = fx.series.coeff(&Word::from_indices([0, 0]));
        assert!(x00.derive().approx_eq(&FunElem::z_pow(b.clone()).mul(&x0)));
        assert!(verify_ncde(&fx.series, &fx.multiplier).unwrap());
        assert_eq!(counterexample_fixture(&Exponent::int(2), 3).unwrap_err(), Error::RationalExponent);
    }

    #[test]
    fn numeric_examples() {
        let pts = default_sample_points();
        let r = numeric_certificate_for(&[FunElem::one(), FunElem::l0(), FunElem::l1()], &pts[..8], NUMERIC_RANK_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedIndependent);
        let f = FunElem::z().add(&FunElem::l1());
        let r = numeric_certificate_for(&[f.clone(), f.scale(c(2.0))], &pts, NUMERIC_RANK_TOL).unwrap();
        assert_eq!(r.verdict, Verdict::RelationFound);
        let Some(Witness::Numeric { coefficients }) = r.witness else { panic!() };
        let ratio = coefficients[0] / coefficients[1];
        assert!((ratio + c(2.0)).norm() < 1e-8);
        let none: [fn(C) -> Result<C>; 0] = [];
        assert_eq!(numeric_independence_certificate(&none, &pts, 1e-7).unwrap().verdict, Verdict::CertifiedIndependent);
    }

    #[test]
    fn recurrence_examples() {
        assert_eq!(recurrence_times(&[1.0 / 3.0], 1e-9, 10).unwrap(), 3);
        assert_eq!(recurrence_times(&[0.0], 1e-3, 10).unwrap(), 1);
        match recurrence_times(&[core::f64::consts::SQRT_2], 1e-12, 5) {
            Err(Error::NoRecurrence { best_n, defect }) => {
                assert!(best_n <= 5);
                assert!(defect >= 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn elimination_recovers_log_coefficient() {
        let mut t = SymbolTable::new();
        let g = t.declare("gamma", core::f64::consts::SQRT_2 / 10.0).unwrap();
        let p0 = FunElem::z_pow(Exponent::symbol(&g)).add(&zp(1));
        let p1 = FunElem::monomial(c(0.5), Exponent::symbol(&g), Exponent::int(1));
        let f = p0.add(&p1.mul(&FunElem::l0()));
        let z = C::new(0.4, 0.2);
        let e = eliminate_log_coefficient(&f, MonodromyOp::D0, z, 1e-4, 100_000).unwrap();
        assert!((e.recovered - e.direct).norm() < 1e-4, "{e:?}");
    }

    #[test]
    fn fixture_separates_iii_from_iii_prime() {
        let b = beta();
        let fx = counterexample_fixture(&b, 6).unwrap();
        let c0 = fx.c0_space(3, 3);
        let r = check_condition_iii(&fx.multiplier, &c0).unwrap();
        assert_eq!(r.verdict, Verdict::CertifiedIndependent);
        // Allowing l = -1 brings z^{beta+1} in, and with it a primitive.
        let ext = fx.extended_space(3, 3);
        assert_eq!(check_condition_iii(&fx.multiplier, &ext).unwrap().verdict, Verdict::RelationFound);

        let r = check_condition_iii_prime(&fx.multiplier, &[FunElem::one()], &ext).unwrap();
        let Some(Witness::Wronskian { alpha, f1, .. }) = r.witness else { panic!("{r:?}") };
        assert_eq!(alpha.get(0), c(1.0));
        let want = FunElem::z_pow(b.add_int(1)).scale(c(1.0 / (core::f64::consts::SQRT_2 + 1.0)));
        assert!(crate::funring::approx_eq(&f1, &want, 1e-12), "{f1:?}");

        // Inside C0 itself: W(z^{2 beta}, z^{beta-1}) = (beta+1) z^{3 beta - 2}.
        let f2 = FunElem::z_pow(b.add_int(-1));
        let r = check_condition_iii_prime(&fx.multiplier, &[FunElem::one(), f2], &c0).unwrap();
        assert_eq!(r.verdict, Verdict::RelationFound);
    }
}
