//! Hyperlogarithms `Li_w` on `{x0, x1}` with `u0 = 1/z`, `u1 = 1/(1-z)`:
//! `d Li_{x w} = u_x Li_w`, `Li_1 = 1`, and the regularization `Li_{x0} = log z`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::funring::{Exponent, FunElem, SymbolTable};
use crate::ncseries::{shuffle_words, Alphabet, Series, Word};
use crate::quadrature::GaussLegendre4;
use crate::ring::{rational_to_f64, Rational};
use crate::{Error, Result};

type C = Complex64;

pub const X0: usize = 0;
pub const X1: usize = 1;

/// Radius of the disc where nested sums are used.
pub const SERIES_RADIUS: f64 = 0.6;
/// Closest allowed approach of a transport segment to `0` or `1`.
pub const MIN_DISTANCE: f64 = 0.05;
const BASE_POINT: f64 = 0.5;

pub fn alphabet() -> Alphabet {
    Alphabet::new(["x0", "x1"]).expect("valid alphabet")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    NestedSum,
    Regularized,
    Transport,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::NestedSum => "nested_sum",
            Method::Regularized => "regularized",
            Method::Transport => "transport",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HyperlogValue {
    pub word: Word,
    pub z: C,
    pub value: C,
    pub method: Method,
    pub err_est: f64,
}

/// `(s_1, ..., s_k)` for `w = x0^{s_1-1} x1 ... x0^{s_k-1} x1`.
fn composition(w: &Word) -> Result<Vec<u32>> {
    if w.last() != Some(X1) {
        return Err(Error::WordNotConvergent);
    }
    let mut out = Vec::new();
    let mut run = 0u32;
    for &l in w.letters() {
        match l as usize {
            X0 => run += 1,
            X1 => {
                out.push(run + 1);
                run = 0;
            }
            _ => return Err(Error::LetterOutOfRange { index: l as usize, len: 2 }),
        }
    }
    Ok(out)
}

/// `sum_{n_1 > ... > n_k >= 1} z^{n_1} / (n_1^{s_1} ... n_k^{s_k})`, stopped
/// once the tail bound drops below `tol`.
pub fn nested_sum_eval(w: &Word, z: C, tol: f64) -> Result<HyperlogValue> {
    let modulus = z.norm();
    if modulus > SERIES_RADIUS {
        return Err(Error::DivergentRegion { modulus });
    }
    let mk = |value, err_est| HyperlogValue { word: w.clone(), z, value, method: Method::NestedSum, err_est };
    if w.is_empty() {
        return Ok(mk(C::new(1.0, 0.0), 0.0));
    }
    let s = composition(w)?;
    let k = s.len();
    if modulus == 0.0 {
        return Ok(mk(C::new(0.0, 0.0), 0.0));
    }
    // inner[j] holds sum over n >= n_{j} > ... > n_k of the inner factors,
    // for j = 1..k-1 (0-based), at the previous n.
    let mut inner = vec![0.0f64; k];
    let mut total = C::new(0.0, 0.0);
    let mut zn = C::new(1.0, 0.0);
    let tol = tol.max(f64::EPSILON * 1e-3);
    let mut n: u32 = 0;
    loop {
        n += 1;
        zn *= z;
        let nf = n as f64;
        let below = if k == 1 { 1.0 } else { inner[1] };
        total += zn * (below / Float::powi(nf, s[0] as i32));
        for j in 1..k {
            let deeper = if j + 1 < k { inner[j + 1] } else { 1.0 };
            inner[j] += deeper / Float::powi(nf, s[j] as i32);
        }
        let grow = Float::powi(1.0 + 1.0 / nf, k as i32 - 1);
        let rho = modulus * grow;
        if rho < 1.0 {
            let bound = Float::powi(modulus, n as i32 + 1) * Float::powi(1.0 + Float::ln(nf + 1.0), k as i32 - 1) / (1.0 - rho);
            if bound < tol {
                return Ok(mk(total, bound));
            }
        }
        if n > 1_000_000 {
            return Err(Error::NonConvergence { iters: n as usize, diff: f64::NAN });
        }
    }
}

/// `Li_w = sum_j (L0^j / j!) * sum_v c_v Li_v` with every `v` empty or
/// ending in `x1`.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularizedDecomposition {
    pub word: Word,
    pub parts: Vec<(usize, Vec<(Word, Rational)>)>,
}

impl RegularizedDecomposition {
    /// `sum c_v x0^j ⧢ v`, which must equal the word itself.
    pub fn reconstruct(&self) -> BTreeMap<Word, Rational> {
        let mut out: BTreeMap<Word, Rational> = BTreeMap::new();
        for (j, combo) in &self.parts {
            let power = Word::from_indices(core::iter::repeat_n(X0, *j));
            for (v, c) in combo {
                for (w, mult) in shuffle_words(&power, v) {
                    let e = out.entry(w).or_insert_with(|| Rational::from_integer(0));
                    *e += c * Rational::from_integer(mult as i128);
                }
            }
        }
        out.retain(|_, c| !num_traits::Zero::is_zero(c));
        out
    }
}

type Decomp = BTreeMap<(usize, Word), Rational>;

fn decompose(w: &Word, memo: &mut BTreeMap<Word, Decomp>) -> Decomp {
    if let Some(d) = memo.get(w) {
        return d.clone();
    }
    let letters = w.letters();
    let r = letters.iter().rev().take_while(|&&l| l as usize == X0).count();
    let mut out = Decomp::new();
    if r == 0 {
        out.insert((0, w.clone()), Rational::from_integer(1));
    } else {
        let u = &letters[..letters.len() - r];
        let tail = core::iter::repeat_n(X0, r - 1);
        let shorter = Word::from_indices(u.iter().map(|&l| l as usize).chain(tail.clone()));
        let inv_r = Rational::new(1, r as i128);
        for ((j, v), c) in decompose(&shorter, memo) {
            add_to(&mut out, (j + 1, v), c * Rational::from_integer(j as i128 + 1) * inv_r);
        }
        for pos in 0..u.len() {
            let mut ins: Vec<usize> = u.iter().map(|&l| l as usize).collect();
            ins.insert(pos, X0);
            let other = Word::from_indices(ins.into_iter().chain(tail.clone()));
            for (key, c) in decompose(&other, memo) {
                add_to(&mut out, key, -c * inv_r);
            }
        }
    }
    memo.insert(w.clone(), out.clone());
    out
}

fn add_to(map: &mut Decomp, key: (usize, Word), c: Rational) {
    let e = map.entry(key.clone()).or_insert_with(|| Rational::from_integer(0));
    *e += c;
    if num_traits::Zero::is_zero(e) {
        map.remove(&key);
    }
}

fn group_parts(d: Decomp) -> Vec<(usize, Vec<(Word, Rational)>)> {
    let mut parts: BTreeMap<usize, Vec<(Word, Rational)>> = BTreeMap::new();
    for ((j, v), c) in d {
        parts.entry(j).or_default().push((v, c));
    }
    parts.into_iter().collect()
}

/// Peels trailing `x0` letters using shuffles with `x0`.
pub fn regularize_trailing_x0(w: &Word) -> RegularizedDecomposition {
    let mut memo = BTreeMap::new();
    RegularizedDecomposition { word: w.clone(), parts: group_parts(decompose(w, &mut memo)) }
}

fn factorial_f64(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn principal_log(z: C) -> Result<C> {
    if z.im == 0.0 && z.re <= 0.0 {
        return Err(Error::OnBranchCut { re: z.re, im: z.im });
    }
    Ok(z.ln())
}

/// Evaluates a decomposition given values of the convergent words.
fn combine<F>(d: &Decomp, z: C, mut conv: F) -> Result<(C, f64)>
where
    F: FnMut(&Word) -> Result<(C, f64)>,
{
    let needs_log = d.keys().any(|(j, _)| *j > 0);
    let l0 = if needs_log { principal_log(z)? } else { C::new(0.0, 0.0) };
    let mut value = C::new(0.0, 0.0);
    let mut err = 0.0;
    for ((j, v), c) in d {
        let (lv, ev) = if v.is_empty() { (C::new(1.0, 0.0), 0.0) } else { conv(v)? };
        let weight = l0.powu(*j as u32) / factorial_f64(*j) * rational_to_f64(c);
        value += weight * lv;
        err += weight.norm() * ev;
    }
    Ok((value, err))
}

/// `Li_w(z)`: nested sums in the disc `|z| <= 0.6`, transport from `1/2`
/// outside it, with trailing `x0` letters regularized.
pub fn li_eval(w: &Word, z: C, tol: f64) -> Result<HyperlogValue> {
    let mut memo = BTreeMap::new();
    let d = decompose(w, &mut memo);
    let convergent_only = d.keys().all(|(j, _)| *j == 0);
    let needs_series = d.keys().any(|(_, v)| !v.is_empty());
    let small = z.norm() <= SERIES_RADIUS;
    let (value, err_est) = if !needs_series || small {
        combine(&d, z, |v| nested_sum_eval(v, z, tol).map(|h| (h.value, h.err_est)))?
    } else {
        let n = d.keys().map(|(_, v)| v.len()).max().unwrap_or(0);
        let (series, err) = transported_series(z, n, tol)?;
        combine(&d, z, |v| Ok((series.coeff(v), err)))?
    };
    let method = if needs_series && !small {
        Method::Transport
    } else if convergent_only {
        Method::NestedSum
    } else {
        Method::Regularized
    };
    Ok(HyperlogValue { word: w.clone(), z, value, method, err_est })
}

fn series_in_disc(z: C, n: usize, tol: f64) -> Result<(Series<C>, f64)> {
    let mut memo = BTreeMap::new();
    let mut conv: BTreeMap<Word, (C, f64)> = BTreeMap::new();
    let mut terms = Vec::new();
    let mut err: f64 = 0.0;
    for w in Word::all_up_to(2, n) {
        let d = decompose(&w, &mut memo);
        let (v, e) = combine(&d, z, |v| {
            if let Some(hit) = conv.get(v) {
                return Ok(*hit);
            }
            let h = nested_sum_eval(v, z, tol)?;
            conv.insert(v.clone(), (h.value, h.err_est));
            Ok((h.value, h.err_est))
        })?;
        err = err.max(e);
        terms.push((w, v));
    }
    Ok((Series::from_terms(alphabet(), n, terms)?, err))
}

fn transported_series(z: C, n: usize, tol: f64) -> Result<(Series<C>, f64)> {
    let base = C::new(BASE_POINT, 0.0);
    let (start, err0) = series_in_disc(base, n, tol)?;
    let fine = chen_transport(n, base, z, &start)?;
    let coarse = chen_transport_panels(n, base, z, &start, default_panels(base, z)? / 2)?;
    let diff = fine.terms().map(|(w, c)| (c - coarse.coeff(w)).norm()).fold(0.0, f64::max);
    Ok((fine, err0 + diff))
}

/// Every `Li_w(z)` with `|w| <= n`, as a series, together with a bound on
/// the coefficient errors.
pub fn li_series(z: C, n: usize, tol: f64) -> Result<(Series<C>, f64)> {
    if z.norm() <= SERIES_RADIUS {
        series_in_disc(z, n, tol)
    } else {
        transported_series(z, n, tol)
    }
}

fn segment_distance(a: C, b: C, p: C) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (a + d * t - p).norm()
}

fn default_panels(from: C, to: C) -> Result<usize> {
    let dist = segment_distance(from, to, C::new(0.0, 0.0)).min(segment_distance(from, to, C::new(1.0, 0.0)));
    if dist < MIN_DISTANCE {
        return Err(Error::PathTooClose { distance: dist });
    }
    Ok((Float::ceil(32.0 * (to - from).norm() / dist) as usize).max(4))
}

/// Transports `S` along the straight segment `z_from -> z_to` by solving the
/// triangular system `d<S|x w> = u_x <S|w>` word length by word length.
pub fn chen_transport(n: usize, z_from: C, z_to: C, s_from: &Series<C>) -> Result<Series<C>> {
    let panels = default_panels(z_from, z_to)?;
    chen_transport_panels(n, z_from, z_to, s_from, panels)
}

/// As [`chen_transport`] with an explicit number of Gauss–Legendre panels.
pub fn chen_transport_panels(n: usize, z_from: C, z_to: C, s_from: &Series<C>, panels: usize) -> Result<Series<C>> {
    if s_from.alphabet().len() != 2 {
        return Err(Error::AlphabetMismatch);
    }
    let dist = segment_distance(z_from, z_to, C::new(0.0, 0.0)).min(segment_distance(z_from, z_to, C::new(1.0, 0.0)));
    if dist < MIN_DISTANCE {
        return Err(Error::PathTooClose { distance: dist });
    }
    let panels = panels.max(1);
    let delta = z_to - z_from;
    let h = 1.0 / panels as f64;
    let gl = GaussLegendre4::new();
    // Forms u_x(z) dz/dtau at every node.
    let forms: [Vec<[C; 4]>; 2] = core::array::from_fn(|x| {
        (0..panels)
            .map(|p| {
                core::array::from_fn(|m| {
                    let zz = z_from + delta * ((p as f64 + gl.nodes[m]) * h);
                    let u = if x == X0 { C::new(1.0, 0.0) / zz } else { C::new(1.0, 0.0) / (C::new(1.0, 0.0) - zz) };
                    u * delta
                })
            })
            .collect()
    });
    struct Track {
        end: C,
        nodes: Vec<[C; 4]>,
    }
    let mut levels: Vec<BTreeMap<Word, Track>> = Vec::with_capacity(n + 1);
    let c0 = s_from.coeff(&Word::empty());
    let mut base = BTreeMap::new();
    base.insert(Word::empty(), Track { end: c0, nodes: vec![[c0; 4]; panels] });
    levels.push(base);
    for len in 1..=n {
        let mut level = BTreeMap::new();
        for (v, tv) in &levels[len - 1] {
            for x in [X0, X1] {
                let w = v.prepend(x);
                let mut acc = s_from.coeff(&w);
                let mut nodes = Vec::with_capacity(panels);
                for (form, node) in forms[x].iter().zip(&tv.nodes) {
                    let f: [C; 4] = core::array::from_fn(|m| form[m] * node[m]);
                    let stage: [C; 4] = core::array::from_fn(|j| {
                        acc + (0..4).map(|m| f[m] * (h * gl.stage[j][m])).sum::<C>()
                    });
                    acc += (0..4).map(|m| f[m] * (h * gl.weights[m])).sum::<C>();
                    nodes.push(stage);
                }
                level.insert(w, Track { end: acc, nodes });
            }
        }
        levels.push(level);
    }
    let terms = levels.into_iter().flat_map(|l| l.into_iter().map(|(w, t)| (w, t.end)));
    Series::from_terms(alphabet(), n, terms)
}

/// Largest `|<S|u><S|v> - sum_w <u ⧢ v|w> <S|w>|` over `|u| + |v| <= n`.
pub fn group_like_defect(s: &Series<C>, n: usize) -> f64 {
    let words = Word::all_up_to(2, n);
    let mut worst: f64 = 0.0;
    for u in &words {
        for v in &words {
            if u.len() + v.len() > n {
                continue;
            }
            let rhs: C = shuffle_words(u, v).into_iter().map(|(w, m)| s.coeff(&w) * m as f64).sum();
            worst = worst.max((s.coeff(u) * s.coeff(v) - rhs).norm());
        }
    }
    worst
}

/// Transports `S` once around `center` (`0` counterclockwise, `1`
/// clockwise) along the regular polygon through `z` with `steps` vertices.
pub fn loop_transport(n: usize, z: C, center: crate::funring::Center, s: &Series<C>, steps: usize) -> Result<Series<C>> {
    let (c, sign) = match center {
        crate::funring::Center::Zero => (C::new(0.0, 0.0), 1.0),
        crate::funring::Center::One => (C::new(1.0, 0.0), -1.0),
    };
    let steps = steps.max(3);
    let r = z - c;
    let mut cur = s.clone();
    let mut from = z;
    for k in 1..=steps {
        let angle = sign * 2.0 * core::f64::consts::PI * k as f64 / steps as f64;
        let to = if k == steps { z } else { c + r * C::from_polar(1.0, angle) };
        cur = chen_transport(n, from, to, &cur)?;
        from = to;
    }
    Ok(cur)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacterCheck {
    pub lhs: C,
    pub rhs: C,
    pub abs_err: f64,
}

/// `sum_{|w| <= n} alpha^{|w|_x0} beta^{|w|_x1} Li_w(z)` against
/// `z^alpha exp(beta L1) = z^alpha (1-z)^{-beta}`, since `Li_{x1} = L1`.
pub fn character_identity_check(alpha: f64, beta: f64, z: C, n: usize, tol: f64) -> Result<CharacterCheck> {
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::InvalidArgument("exponents must be finite"));
    }
    let (series, _) = li_series(z, n, tol)?;
    let lhs: C = series
        .terms()
        .map(|(w, c)| c * Float::powi(alpha, w.count(X0) as i32) * Float::powi(beta, w.count(X1) as i32))
        .sum();
    let mut table = SymbolTable::new();
    let a = Exponent::symbol(&table.declare("alpha", alpha)?);
    let b = Exponent::symbol(&table.declare("beta", beta)?).neg();
    let rhs = FunElem::monomial(C::new(1.0, 0.0), a, b).eval(z)?;
    Ok(CharacterCheck { lhs, rhs, abs_err: (lhs - rhs).norm() })
}
