//! `S'(t) = M(t) S(t)` on closed matrix groups: Picard iteration, the Magnus
//! expansion with its Bernoulli recursion, group and algebra defects,
//! tangent vectors of paths, and gluing of local solutions.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::linalg::{expm, logm_series, CMatrix};
use crate::quadrature::GaussLegendre4;
use crate::ring::{binomial, Rational};
use crate::{Error, Result};

type C = Complex64;

/// `B_n` from `sum_{k <= n} C(n+1, k) B_k = 0`, so `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> Rational {
    bernoulli_table(n)[n]
}

/// `B_0, ..., B_n`.
pub fn bernoulli_table(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::from_integer(1));
    for m in 1..=n {
        let mut acc = Rational::from_integer(0);
        for (k, bk) in b.iter().enumerate() {
            acc += binomial(m as u64 + 1, k as u64) * bk;
        }
        b.push(-acc / Rational::from_integer(m as i128 + 1));
    }
    b
}

/// Continuous matrix-valued function on an interval.
#[derive(Clone)]
pub struct MatFun {
    dim: usize,
    domain: (f64, f64),
    f: Arc<dyn Fn(f64) -> CMatrix + Send + Sync>,
}

impl core::fmt::Debug for MatFun {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MatFun").field("dim", &self.dim).field("domain", &self.domain).finish()
    }
}

impl MatFun {
    pub fn new<F>(dim: usize, domain: (f64, f64), f: F) -> Self
    where
        F: Fn(f64) -> CMatrix + Send + Sync + 'static,
    {
        MatFun { dim, domain, f: Arc::new(f) }
    }

    pub fn constant(a: CMatrix) -> Self {
        let dim = a.rows();
        Self::new(dim, (f64::NEG_INFINITY, f64::INFINITY), move |_| a.clone())
    }

    /// `A + sin(t) B`.
    pub fn const_plus_sin(a: CMatrix, b: CMatrix) -> Self {
        let dim = a.rows();
        Self::new(dim, (f64::NEG_INFINITY, f64::INFINITY), move |t| {
            let mut m = a.clone();
            m.axpy(C::new(Float::sin(t), 0.0), &b);
            m
        })
    }

    /// Skew-symmetric generator `amp * hat(cos(w t), sin(w t), 1/2)`.
    pub fn so3_rotor(amp: f64, freq: f64) -> Self {
        Self::new(3, (f64::NEG_INFINITY, f64::INFINITY), move |t| {
            let (x, y, z) = (Float::cos(freq * t), Float::sin(freq * t), 0.5);
            let d = [0.0, -z, y, z, 0.0, -x, -y, x, 0.0];
            CMatrix::from_real(3, 3, &d).expect("3x3").scale_real(amp)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn eval(&self, t: f64) -> CMatrix {
        (self.f)(t)
    }

    fn check_interval(&self, t0: f64, t1: f64) -> Result<()> {
        let (lo, hi) = (t0.min(t1), t0.max(t1));
        if lo < self.domain.0 || hi > self.domain.1 || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::OutsideDomain { t0, t1 });
        }
        Ok(())
    }
}

type Defect = Arc<dyn Fn(&CMatrix) -> f64 + Send + Sync>;

/// A closed matrix group described by defect functions for the group and
/// its Lie algebra.
#[derive(Clone)]
pub struct GroupSpec {
    pub name: String,
    group: Defect,
    algebra: Defect,
}

impl core::fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("GroupSpec").field("name", &self.name).finish()
    }
}

impl GroupSpec {
    pub fn new<G, A>(name: &str, group: G, algebra: A) -> Self
    where
        G: Fn(&CMatrix) -> f64 + Send + Sync + 'static,
        A: Fn(&CMatrix) -> f64 + Send + Sync + 'static,
    {
        GroupSpec { name: name.to_string(), group: Arc::new(group), algebra: Arc::new(algebra) }
    }

    /// `O(n)`: `|g^T g - I|` and `|u + u^T|`.
    pub fn orthogonal() -> Self {
        Self::new(
            "orthogonal",
            |g| {
                let n = g.rows();
                g.transpose().dot(g).sub(&CMatrix::identity(n)).map_or(f64::INFINITY, |d| d.frobenius_norm())
            },
            |u| u.add(&u.transpose()).map_or(f64::INFINITY, |d| d.frobenius_norm()),
        )
    }

    /// `SL(n)`: `|det g - 1|` and `|tr u|`.
    pub fn special_linear() -> Self {
        Self::new(
            "special-linear",
            |g| g.det().map_or(f64::INFINITY, |d| (d - C::new(1.0, 0.0)).norm()),
            |u| u.trace().norm(),
        )
    }

    /// Unipotent upper triangular matrices and strictly upper triangular
    /// generators.
    pub fn unipotent() -> Self {
        Self::new(
            "unipotent",
            |g| {
                let n = g.rows();
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..=i {
                        let want = if i == j { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) };
                        s += (g[(i, j)] - want).norm_sqr();
                    }
                }
                Float::sqrt(s)
            },
            |u| {
                let n = u.rows();
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..=i {
                        s += u[(i, j)].norm_sqr();
                    }
                }
                Float::sqrt(s)
            },
        )
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "orthogonal" => Some(Self::orthogonal()),
            "special-linear" => Some(Self::special_linear()),
            "unipotent" => Some(Self::unipotent()),
            _ => None,
        }
    }

    pub fn group_defect(&self, g: &CMatrix) -> f64 {
        (self.group)(g)
    }

    pub fn algebra_defect(&self, u: &CMatrix) -> f64 {
        (self.algebra)(u)
    }
}

/// Sampled solution path.
#[derive(Clone, Debug, PartialEq)]
pub struct MatPath {
    pub times: Vec<f64>,
    pub values: Vec<CMatrix>,
    pub solver: String,
    pub step: f64,
    pub order: usize,
}

impl MatPath {
    pub fn last(&self) -> &CMatrix {
        self.values.last().expect("paths are nonempty")
    }

    /// Largest entrywise distance to another path on the same grid.
    pub fn sup_distance(&self, other: &MatPath) -> Result<f64> {
        if self.times.len() != other.times.len() {
            return Err(Error::DimensionMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PicardConfig {
    pub step: f64,
    pub iters: usize,
    pub tol: f64,
}

impl Default for PicardConfig {
    fn default() -> Self {
        PicardConfig { step: 1.0 / 64.0, iters: 200, tol: 1e-13 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MagnusConfig {
    pub step: f64,
    pub order: usize,
}

impl Default for MagnusConfig {
    fn default() -> Self {
        MagnusConfig { step: 1.0 / 64.0, order: 4 }
    }
}

fn panels(t0: f64, t1: f64, step: f64) -> Result<(usize, f64)> {
    if step.is_nan() || step <= 0.0 || step.is_infinite() {
        return Err(Error::InvalidArgument("step must be positive"));
    }
    let len = t1 - t0;
    let n = Float::ceil(Float::abs(len) / step - 1e-9).max(1.0) as usize;
    Ok((n, len / n as f64))
}

fn check_square(m: &MatFun, g0: &CMatrix) -> Result<()> {
    if !g0.is_square() || g0.rows() != m.dim() {
        return Err(Error::DimensionMismatch);
    }
    Ok(())
}

/// Picard iterates on the collocation grid. Node values hold `T` at the four
/// Gauss points of every panel.
struct PicardGrid {
    t0: f64,
    h: f64,
    m_nodes: Vec<[CMatrix; 4]>,
    gl: GaussLegendre4,
}

impl PicardGrid {
    fn new(m: &MatFun, t0: f64, t1: f64, step: f64) -> Result<Self> {
        let (n, h) = panels(t0, t1, step)?;
        let gl = GaussLegendre4::new();
        let m_nodes = (0..n)
            .map(|p| {
                let base = t0 + p as f64 * h;
                core::array::from_fn(|j| m.eval(base + gl.nodes[j] * h))
            })
            .collect();
        Ok(PicardGrid { t0, h, m_nodes, gl })
    }

    /// One application of `T -> g0 + int M T`; returns grid and node values.
    fn apply(&self, g0: &CMatrix, nodes: &[[CMatrix; 4]]) -> (Vec<CMatrix>, Vec<[CMatrix; 4]>) {
        let mut grid = Vec::with_capacity(nodes.len() + 1);
        let mut new_nodes = Vec::with_capacity(nodes.len());
        let mut acc = g0.clone();
        grid.push(acc.clone());
        for (mp, tp) in self.m_nodes.iter().zip(nodes) {
            let mt: [CMatrix; 4] = core::array::from_fn(|k| mp[k].dot(&tp[k]));
            let stage: [CMatrix; 4] = core::array::from_fn(|j| {
                let mut v = acc.clone();
                for (k, mtk) in mt.iter().enumerate() {
                    v.axpy(C::new(self.h * self.gl.stage[j][k], 0.0), mtk);
                }
                v
            });
            for (k, mtk) in mt.iter().enumerate() {
                acc.axpy(C::new(self.h * self.gl.weights[k], 0.0), mtk);
            }
            grid.push(acc.clone());
            new_nodes.push(stage);
        }
        (grid, new_nodes)
    }

    fn times(&self) -> Vec<f64> {
        (0..=self.m_nodes.len()).map(|p| self.t0 + p as f64 * self.h).collect()
    }
}

fn max_diff(a: &[[CMatrix; 4]], b: &[[CMatrix; 4]]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| p.max_abs_diff(q)))
        .fold(0.0, f64::max)
}

/// Solves `S' = M S, S(t0) = g0` on `[t0, t1]` by Picard iteration of the
/// integral equation, discretized by composite four-point Gauss–Legendre
/// collocation.
pub fn picard_solve(m: &MatFun, t0: f64, g0: &CMatrix, t1: f64, cfg: &PicardConfig) -> Result<MatPath> {
    m.check_interval(t0, t1)?;
    check_square(m, g0)?;
    let grid = PicardGrid::new(m, t0, t1, cfg.step)?;
    let mut nodes: Vec<[CMatrix; 4]> = vec![core::array::from_fn(|_| g0.clone()); grid.m_nodes.len()];
    let scale = g0.max_abs().max(1.0);
    let mut diff = f64::INFINITY;
    for _ in 0..cfg.iters {
        let (values, next) = grid.apply(g0, &nodes);
        diff = max_diff(&next, &nodes);
        nodes = next;
        if !diff.is_finite() {
            break;
        }
        if diff < cfg.tol * scale {
            // One more sweep measures the residual of the integral equation.
            let (check, again) = grid.apply(g0, &nodes);
            let residual = max_diff(&again, &nodes);
            if residual >= 10.0 * cfg.tol * scale {
                break;
            }
            let _ = values;
            return Ok(MatPath {
                times: grid.times(),
                values: check,
                solver: "picard".to_string(),
                step: grid.h.abs(),
                order: 8,
            });
        }
    }
    Err(Error::NonConvergence { iters: cfg.iters, diff })
}

/// The first `count + 1` Picard iterates `T_0 = g0, T_{k+1} = g0 + int M T_k`.
pub fn picard_iterates(m: &MatFun, t0: f64, g0: &CMatrix, t1: f64, step: f64, count: usize) -> Result<Vec<MatPath>> {
    m.check_interval(t0, t1)?;
    check_square(m, g0)?;
    let grid = PicardGrid::new(m, t0, t1, step)?;
    let mut nodes: Vec<[CMatrix; 4]> = vec![core::array::from_fn(|_| g0.clone()); grid.m_nodes.len()];
    let times = grid.times();
    let path = |values: Vec<CMatrix>| MatPath {
        times: times.clone(),
        values,
        solver: "picard-iterate".to_string(),
        step: grid.h.abs(),
        order: 8,
    };
    let mut out = vec![path(vec![g0.clone(); times.len()])];
    for _ in 0..count {
        let (values, next) = grid.apply(g0, &nodes);
        nodes = next;
        out.push(path(values));
    }
    Ok(out)
}

/// `Omega_1, ..., Omega_terms` over one step `[t, t + h]`, each term computed
/// by the Bernoulli recursion with the nested integrals collocated at the
/// four Gauss nodes of the step.
pub fn magnus_omega(m: &MatFun, t: f64, h: f64, terms: usize) -> Result<Vec<CMatrix>> {
    if terms == 0 {
        return Err(Error::InvalidArgument("at least one Magnus term is needed"));
    }
    let order = terms;
    let gl = GaussLegendre4::new();
    let bern = bernoulli_table(order);
    let m_nodes: [CMatrix; 4] = core::array::from_fn(|j| m.eval(t + gl.nodes[j] * h));
    let n = m.dim();
    // omega_nodes[k][j] = Omega_{k+1}(c_j h); s[n][i] at node j holds
    // sum over k_1 + ... + k_i = n of ad_{Omega_{k_1}} ... ad_{Omega_{k_i}}[m].
    let mut omega_nodes: Vec<[CMatrix; 4]> = Vec::with_capacity(order);
    let mut omega_end: Vec<CMatrix> = Vec::with_capacity(order);
    let mut s: Vec<Vec<[CMatrix; 4]>> = vec![Vec::new()];
    for level in 1..=order {
        let integrand: [CMatrix; 4] = if level == 1 {
            m_nodes.clone()
        } else {
            let k = level - 1;
            core::array::from_fn(|j| {
                let mut acc = CMatrix::zeros(n, n);
                for i in 1..=k {
                    let coeff = crate::ring::rational_to_f64(&(bern[i] / crate::ring::factorial(i as u64)));
                    if coeff != 0.0 {
                        acc.axpy(C::new(coeff, 0.0), &s[k][i][j]);
                    }
                }
                acc
            })
        };
        let nodes: [CMatrix; 4] = core::array::from_fn(|j| {
            let mut v = CMatrix::zeros(n, n);
            for (q, f) in integrand.iter().enumerate() {
                v.axpy(C::new(h * gl.stage[j][q], 0.0), f);
            }
            v
        });
        let mut end = CMatrix::zeros(n, n);
        for (q, f) in integrand.iter().enumerate() {
            end.axpy(C::new(h * gl.weights[q], 0.0), f);
        }
        omega_nodes.push(nodes);
        omega_end.push(end);
        if level < order {
            // s[level][i] for i = 1..=level.
            let mut row: Vec<[CMatrix; 4]> = vec![core::array::from_fn(|_| CMatrix::zeros(n, n))];
            for i in 1..=level {
                let entry: [CMatrix; 4] = core::array::from_fn(|j| {
                    if i == 1 {
                        omega_nodes[level - 1][j].commutator(&m_nodes[j])
                    } else {
                        let mut acc = CMatrix::zeros(n, n);
                        for kk in 1..=level - i + 1 {
                            let inner = &s[level - kk][i - 1][j];
                            acc.axpy(C::new(1.0, 0.0), &omega_nodes[kk - 1][j].commutator(inner));
                        }
                        acc
                    }
                });
                row.push(entry);
            }
            s.push(row);
        }
    }
    Ok(omega_end)
}

/// Magnus integrator of classical order `order`: per step, `S <- exp(Omega) S`
/// with `Omega = Omega_1 + ... + Omega_{order-1}` (at least `Omega_1`), so the
/// local error is `O(h^{order+1})` for even `order`. A step whose `|Omega_1| + |Omega_2|` reaches `pi`
/// is split in halves.
pub fn magnus_solve(m: &MatFun, t0: f64, g0: &CMatrix, t1: f64, cfg: &MagnusConfig) -> Result<MatPath> {
    if cfg.order == 0 {
        return Err(Error::InvalidArgument("Magnus order must be at least 1"));
    }
    m.check_interval(t0, t1)?;
    check_square(m, g0)?;
    let (n, h) = panels(t0, t1, cfg.step)?;
    let mut times = vec![t0];
    let mut values = vec![g0.clone()];
    let mut s = g0.clone();
    for p in 0..n {
        let start = t0 + p as f64 * h;
        s = magnus_advance(m, start, h, cfg.order, &s, 0)?;
        times.push(t0 + (p + 1) as f64 * h);
        values.push(s.clone());
    }
    Ok(MatPath { times, values, solver: "magnus".to_string(), step: h.abs(), order: cfg.order })
}

/// Number of Magnus terms used by a method of the given classical order.
pub fn magnus_terms(order: usize) -> usize {
    order.saturating_sub(1).max(1)
}

fn magnus_advance(m: &MatFun, t: f64, h: f64, order: usize, s: &CMatrix, depth: u32) -> Result<CMatrix> {
    let omegas = magnus_omega(m, t, h, magnus_terms(order))?;
    let estimate = omegas[0].op_norm() + omegas.get(1).map_or(0.0, CMatrix::op_norm);
    if estimate >= core::f64::consts::PI {
        if depth >= 40 {
            return Err(Error::StepRejected { step: h.abs() });
        }
        let mid = magnus_advance(m, t, h / 2.0, order, s, depth + 1)?;
        return magnus_advance(m, t + h / 2.0, h / 2.0, order, &mid, depth + 1);
    }
    let mut total = omegas[0].clone();
    for o in &omegas[1..] {
        total.axpy(C::new(1.0, 0.0), o);
    }
    Ok(expm(&total).dot(s))
}

/// Explicit Euler, `S <- (I + h M(t)) S`, kept as a non-structure-preserving
/// baseline.
pub fn euler_solve(m: &MatFun, t0: f64, g0: &CMatrix, t1: f64, step: f64) -> Result<MatPath> {
    m.check_interval(t0, t1)?;
    check_square(m, g0)?;
    let (n, h) = panels(t0, t1, step)?;
    let mut times = vec![t0];
    let mut values = vec![g0.clone()];
    let mut s = g0.clone();
    for p in 0..n {
        let t = t0 + p as f64 * h;
        let mut step_m = CMatrix::identity(m.dim());
        step_m.axpy(C::new(h, 0.0), &m.eval(t));
        s = step_m.dot(&s);
        times.push(t + h);
        values.push(s.clone());
    }
    Ok(MatPath { times, values, solver: "euler".to_string(), step: h.abs(), order: 1 })
}

/// Largest group defect along the path.
pub fn group_drift(path: &MatPath, spec: &GroupSpec) -> f64 {
    path.values.iter().map(|g| spec.group_defect(g)).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OneParamReport {
    pub algebra_defect: f64,
    pub max_group_defect: f64,
    /// Largest `|e^{(s+t)u} - e^{su} e^{tu}|` over grid pairs.
    pub semigroup_defect: f64,
}

/// Checks that `t -> e^{t u}` stays on the group for `u` in its algebra.
pub fn one_param_group_check(u: &CMatrix, spec: &GroupSpec, t_grid: &[f64]) -> Result<OneParamReport> {
    let algebra_defect = spec.algebra_defect(u);
    if algebra_defect > 1e-9 * u.max_abs().max(1.0) {
        return Err(Error::NotInAlgebra { defect: algebra_defect });
    }
    let exps: Vec<CMatrix> = t_grid.iter().map(|&t| expm(&u.scale_real(t))).collect();
    let max_group_defect = exps.iter().map(|g| spec.group_defect(g)).fold(0.0, f64::max);
    let mut semigroup_defect: f64 = 0.0;
    for (i, &s) in t_grid.iter().enumerate() {
        for (j, &t) in t_grid.iter().enumerate().skip(i) {
            let joint = expm(&u.scale_real(s + t));
            semigroup_defect = semigroup_defect.max(joint.max_abs_diff(&exps[i].dot(&exps[j])));
        }
    }
    Ok(OneParamReport { algebra_defect, max_group_defect, semigroup_defect })
}

/// Central difference `(gamma(h) - gamma(-h)) / 2h` of a path through the
/// identity.
pub fn tangent_extract<F: Fn(f64) -> CMatrix>(gamma: F, h: f64) -> Result<CMatrix> {
    let g0 = gamma(0.0);
    let distance = g0.max_abs_diff(&CMatrix::identity(g0.rows()));
    if distance > 1e-8 {
        return Err(Error::NotNearIdentity { distance });
    }
    Ok(gamma(h).sub(&gamma(-h))?.scale_real(0.5 / h))
}

/// Richardson-extrapolated central difference, `(4 D(h/2) - D(h)) / 3`.
pub fn tangent_richardson<F: Fn(f64) -> CMatrix>(gamma: F, h: f64) -> Result<CMatrix> {
    let coarse = tangent_extract(&gamma, h)?;
    let fine = tangent_extract(&gamma, h / 2.0)?;
    fine.scale_real(4.0 / 3.0).sub(&coarse.scale_real(1.0 / 3.0))
}

/// The commutator path `e^{ru} e^{rv} e^{-ru} e^{-rv}` with `r = sqrt(2t)`
/// for `t >= 0`, continued by inversion to `t < 0`.
pub fn commutator_path(u: &CMatrix, v: &CMatrix, t: f64) -> CMatrix {
    let r = Float::sqrt(2.0 * t.abs());
    let g = expm(&u.scale_real(r))
        .dot(&expm(&v.scale_real(r)))
        .dot(&expm(&u.scale_real(-r)))
        .dot(&expm(&v.scale_real(-r)));
    if t >= 0.0 {
        g
    } else {
        g.inverse().expect("group element")
    }
}

/// Scalar `c` with `tangent ~ c [u, v]` for the commutator path, from a
/// least-squares fit at step `h` and at `h/4`, extrapolated in `sqrt(h)`.
pub fn commutator_constant(u: &CMatrix, v: &CMatrix, h: f64) -> Result<f64> {
    let comm = u.commutator(v);
    let norm2 = comm.frobenius_norm().powi(2);
    if norm2 == 0.0 {
        return Err(Error::InvalidArgument("u and v commute"));
    }
    let fit = |step: f64| -> Result<f64> {
        let d = tangent_extract(|t| commutator_path(u, v, t), step)?;
        let dot: C = d.as_slice().iter().zip(comm.as_slice()).map(|(a, b)| a * b.conj()).sum();
        Ok(dot.re / norm2)
    };
    let coarse = fit(h)?;
    let fine = fit(h / 4.0)?;
    Ok(2.0 * fine - coarse)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogMembership {
    pub in_group_predicted: bool,
    pub algebra_defect: f64,
    pub group_defect: f64,
}

/// For `|g - I| < 1`: whether `log g` lies in the algebra, which predicts
/// `g` in the group.
pub fn log_in_lg_membership(g: &CMatrix, spec: &GroupSpec) -> Result<LogMembership> {
    let log = logm_series(g)?;
    let algebra_defect = spec.algebra_defect(&log);
    Ok(LogMembership {
        in_group_predicted: algebra_defect <= 1e-9,
        algebra_defect,
        group_defect: spec.group_defect(g),
    })
}

/// How a local solution around `t_i` is rebuilt from the solution `R` of a
/// system started at the identity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ShiftForm {
    /// `T(s) = e^{s m0} R(s) g` with `R' = e^{-s m0} (M(t_i + s) - m0) e^{s m0} R`.
    #[default]
    Interaction,
    /// `T(s) = R(s) e^{s m0} g` with `R' = (M(t_i + s) - m0) R`. Exact only
    /// when `M` commutes with `m0`.
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RestartConfig {
    pub picard: PicardConfig,
    /// Initial piece length; pieces are halved when Picard fails.
    pub piece: f64,
    /// Accepted disagreement on overlaps.
    pub overlap_tol: f64,
    pub shift: ShiftForm,
}

impl Default for RestartConfig {
    fn default() -> Self {
        RestartConfig {
            picard: PicardConfig::default(),
            piece: 0.25,
            overlap_tol: 1e-9,
            shift: ShiftForm::Interaction,
        }
    }
}

/// A local solution: times and values, extending one grid step past the
/// start of the next piece.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalPiece {
    pub times: Vec<f64>,
    pub values: Vec<CMatrix>,
}

/// Pastes local solutions. Piece `i` must overlap piece `i+1` on at least
/// the latter's first two grid times; disagreement there beyond `tol`
/// (relative to the entries) is an error.
pub fn glue_pieces(pieces: &[LocalPiece], tol: f64, step: f64) -> Result<MatPath> {
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, piece) in pieces.iter().enumerate() {
        let next_start = pieces.get(i + 1).map(|p| p.times[0]);
        if let Some(next) = pieces.get(i + 1) {
            for (t, v) in next.times.iter().zip(&next.values).take(2) {
                let idx = piece
                    .times
                    .iter()
                    .position(|s| (s - t).abs() <= 1e-12 * t.abs().max(1.0))
                    .ok_or(Error::InvalidArgument("pieces do not overlap"))?;
                let mismatch = piece.values[idx].max_abs_diff(v) / v.max_abs().max(1.0);
                if mismatch > tol {
                    return Err(Error::OverlapMismatch { piece: i, next: i + 1, mismatch });
                }
            }
        }
        for (t, v) in piece.times.iter().zip(&piece.values) {
            if next_start.is_some_and(|s| *t >= s - 1e-12 * s.abs().max(1.0)) {
                break;
            }
            times.push(*t);
            values.push(v.clone());
        }
    }
    Ok(MatPath { times, values, solver: "picard-restarts".to_string(), step, order: 8 })
}

/// Solves piecewise: on each piece the system is shifted to start at the
/// identity with the frozen generator removed, solved by Picard, mapped
/// back, and the pieces are pasted after an overlap check.
pub fn solve_with_restarts(m: &MatFun, t0: f64, g0: &CMatrix, t1: f64, cfg: &RestartConfig) -> Result<MatPath> {
    m.check_interval(t0, t1)?;
    check_square(m, g0)?;
    let (_, h) = panels(t0, t1, cfg.picard.step)?;
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let step = h.abs();
    let mut pieces = Vec::new();
    let mut start = t0;
    let mut g = g0.clone();
    let mut piece_len = cfg.piece.max(step);
    while dir * (t1 - start) > 1e-12 * t1.abs().max(1.0) {
        let steps = Float::round((piece_len / step).max(1.0));
        let remaining = Float::round(dir * (t1 - start) / step).max(1.0);
        let n_steps = steps.min(remaining);
        let end = if n_steps == remaining { t1 } else { start + dir * n_steps * step };
        // One extra step for the overlap, clipped to the domain.
        let over = end + dir * step;
        let (lo, hi) = m.domain();
        let reach = if over >= lo && over <= hi && n_steps < remaining { over } else { end };
        match local_solution(m, start, &g, reach, step, cfg) {
            Ok(piece) => {
                let idx = piece
                    .times
                    .iter()
                    .position(|t| (t - end).abs() <= 1e-12 * end.abs().max(1.0))
                    .unwrap_or(piece.times.len() - 1);
                g = piece.values[idx].clone();
                start = end;
                pieces.push(piece);
            }
            Err(Error::NonConvergence { .. }) if piece_len > step => {
                piece_len /= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
    if pieces.is_empty() {
        return Ok(MatPath { times: vec![t0], values: vec![g0.clone()], solver: "picard-restarts".to_string(), step, order: 8 });
    }
    glue_pieces(&pieces, cfg.overlap_tol, step)
}

fn local_solution(m: &MatFun, ti: f64, g: &CMatrix, t_end: f64, step: f64, cfg: &RestartConfig) -> Result<LocalPiece> {
    let m0 = m.eval(ti);
    let inner = m.clone();
    let frozen = m0.clone();
    let shifted = match cfg.shift {
        ShiftForm::Interaction => MatFun::new(m.dim(), (f64::NEG_INFINITY, f64::INFINITY), move |s| {
            let diff = inner.eval(ti + s).sub(&frozen).expect("square");
            let e = expm(&frozen.scale_real(s));
            let e_inv = expm(&frozen.scale_real(-s));
            e_inv.dot(&diff).dot(&e)
        }),
        ShiftForm::Literal => MatFun::new(m.dim(), (f64::NEG_INFINITY, f64::INFINITY), move |s| {
            inner.eval(ti + s).sub(&frozen).expect("square")
        }),
    };
    let picard = PicardConfig { step, ..cfg.picard };
    let r = picard_solve(&shifted, 0.0, &CMatrix::identity(m.dim()), t_end - ti, &picard)?;
    let values = r
        .times
        .iter()
        .zip(&r.values)
        .map(|(&s, rs)| {
            let e = expm(&m0.scale_real(s));
            match cfg.shift {
                ShiftForm::Interaction => e.dot(rs).dot(g),
                ShiftForm::Literal => rs.dot(&e).dot(g),
            }
        })
        .collect();
    Ok(LocalPiece { times: r.times.iter().map(|s| ti + s).collect(), values })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(n: usize, d: &[f64]) -> CMatrix {
        CMatrix::from_real(n, n, d).unwrap()
    }

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), q(1, 1));
        assert_eq!(bernoulli(1), q(-1, 2));
        assert_eq!(bernoulli(2), q(1, 6));
        assert_eq!(bernoulli(3), q(0, 1));
        assert_eq!(bernoulli(4), q(-1, 30));
        assert_eq!(bernoulli(12), q(-691, 2730));
    }

    #[test]
    fn picard_trivial_and_constant() {
        let z = MatFun::constant(CMatrix::zeros(2, 2));
        let p = picard_solve(&z, 0.0, &CMatrix::identity(2), 1.0, &PicardConfig::default()).unwrap();
        assert!(p.values.iter().all(|v| v.max_abs_diff(&CMatrix::identity(2)) == 0.0));

        let a = real(2, &[0.1, 0.7, -0.4, 0.2]);
        let g0 = real(2, &[1.0, 0.5, 0.0, 2.0]);
        let m = MatFun::constant(a.clone());
        let p = picard_solve(&m, 0.3, &g0, 1.3, &PicardConfig::default()).unwrap();
        for (t, v) in p.times.iter().zip(&p.values) {
            let want = expm(&a.scale_real(t - 0.3)).dot(&g0);
            assert!(v.max_abs_diff(&want) < 1e-12);
        }
    }

    #[test]
    fn first_picard_iterate_is_linear() {
        let a = real(2, &[0.0, 1.0, -2.0, 0.5]);
        let m = MatFun::constant(a.clone());
        let its = picard_iterates(&m, 0.0, &CMatrix::identity(2), 1.0, 0.25, 1).unwrap();
        for (t, v) in its[1].times.iter().zip(&its[1].values) {
            let mut want = CMatrix::identity(2);
            want.axpy(C::new(*t, 0.0), &a);
            assert!(v.max_abs_diff(&want) < 1e-15);
        }
    }

    #[test]
    fn magnus_order_one_is_exact_for_constant_generators() {
        let a = real(2, &[0.3, -1.0, 1.2, 0.1]);
        let m = MatFun::constant(a.clone());
        let p = magnus_solve(&m, 0.0, &CMatrix::identity(2), 1.0, &MagnusConfig { step: 0.5, order: 1 }).unwrap();
        assert!(p.last().max_abs_diff(&expm(&a)) < 1e-13);
    }

    #[test]
    fn group_defects() {
        let sl = GroupSpec::special_linear();
        assert!((sl.group_defect(&CMatrix::identity(3).scale_real(2.0)) - 7.0).abs() < 1e-12);
        let path = MatPath { times: vec![0.0], values: vec![CMatrix::identity(3)], solver: String::new(), step: 0.0, order: 0 };
        assert_eq!(group_drift(&path, &GroupSpec::orthogonal()), 0.0);
    }

    #[test]
    fn restarts_with_constant_generator() {
        let a = real(2, &[0.0, 2.0, -2.0, 0.3]);
        let m = MatFun::constant(a.clone());
        let cfg = RestartConfig { piece: 0.2, ..Default::default() };
        let p = solve_with_restarts(&m, 0.0, &CMatrix::identity(2), 1.0, &cfg).unwrap();
        assert!((p.times.last().unwrap() - 1.0).abs() < 1e-12);
        assert!(p.last().max_abs_diff(&expm(&a)) < 1e-11);
    }

    #[test]
    fn literal_shift_fails_for_noncommuting_generators() {
        let a = real(2, &[0.0, 1.0, 0.0, 0.0]);
        let b = real(2, &[0.0, 0.0, 1.0, 0.0]);
        let m = MatFun::const_plus_sin(a, b);
        let g0 = CMatrix::identity(2);
        let reference = picard_solve(&m, 0.0, &g0, 1.0, &PicardConfig::default()).unwrap();
        let good = solve_with_restarts(&m, 0.0, &g0, 1.0, &RestartConfig::default()).unwrap();
        assert!(good.sup_distance(&reference).unwrap() < 1e-10);
        let literal = RestartConfig { shift: ShiftForm::Literal, overlap_tol: 1.0, ..Default::default() };
        let bad = solve_with_restarts(&m, 0.0, &g0, 1.0, &literal).unwrap();
        assert!(bad.sup_distance(&reference).unwrap() > 1e-4);
    }

    #[test]
    fn corrupted_piece_is_rejected() {
        let m = MatFun::constant(real(2, &[0.0, 1.0, -1.0, 0.0]));
        let cfg = RestartConfig::default();
        let g0 = CMatrix::identity(2);
        let p0 = local_solution(&m, 0.0, &g0, 0.5 + 1.0 / 64.0, 1.0 / 64.0, &cfg).unwrap();
        let idx = p0.times.len() - 2;
        let mut p1 = local_solution(&m, 0.5, &p0.values[idx], 1.0, 1.0 / 64.0, &cfg).unwrap();
        assert!(glue_pieces(&[p0.clone(), p1.clone()], 1e-9, 1.0 / 64.0).is_ok());
        p1.values[1][(0, 0)] += C::new(1e-3, 0.0);
        assert!(matches!(
            glue_pieces(&[p0, p1], 1e-9, 1.0 / 64.0),
            Err(Error::OverlapMismatch { piece: 0, next: 1, .. })
        ));
    }

    #[test]
    fn log_membership() {
        let u = real(3, &[0.0, 0.1, -0.2, -0.1, 0.0, 0.05, 0.2, -0.05, 0.0]);
        let r = log_in_lg_membership(&expm(&u), &GroupSpec::orthogonal()).unwrap();
        assert!(r.in_group_predicted && r.algebra_defect < 1e-12 && r.group_defect < 1e-12);
        let d = CMatrix::diag(&[C::new(1.1, 0.0), C::new(1.0 / 1.1, 0.0), C::new(1.0, 0.0)]);
        let r = log_in_lg_membership(&d, &GroupSpec::special_linear()).unwrap();
        assert!(r.algebra_defect < 1e-12 && r.group_defect < 1e-12);
    }
}
