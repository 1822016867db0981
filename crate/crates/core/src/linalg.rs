//! Dense complex matrices: products, norms, exponential and logarithm,
//! elimination and a one-sided Jacobi SVD.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
use num_traits::Float;

use crate::{Error, Result};

type C = Complex64;

const CZERO: C = C::new(0.0, 0.0);
const CONE: C = C::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![CZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = CONE;
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> C>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<C>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch);
        }
        Ok(Self::from_fn(r, c, |i, j| rows[i][j]))
    }

    /// Real matrix from row-major data.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch);
        }
        Ok(Self::from_fn(rows, cols, |i, j| C::new(data[i * cols + j], 0.0)))
    }

    pub fn diag(entries: &[C]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    fn check_same(&self, rhs: &Self) -> Result<()> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch);
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        Ok(self.zip(rhs, |a, b| a + b))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same(rhs)?;
        Ok(self.zip(rhs, |a, b| a - b))
    }

    fn zip<F: Fn(C, C) -> C>(&self, rhs: &Self, f: F) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// In-place `self += c * rhs`; shapes must agree.
    pub fn axpy(&mut self, c: C, rhs: &Self) {
        debug_assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += c * b;
        }
    }

    pub fn scale(&self, c: C) -> Self {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C::new(c, 0.0))
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch);
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == CZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        Ok(out)
    }

    /// Product of two matrices already known to be conformable.
    pub fn dot(&self, rhs: &Self) -> Self {
        self.mul(rhs).expect("conformable matrices")
    }

    pub fn mul_vec(&self, v: &[C]) -> Result<Vec<C>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch);
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect())
    }

    /// `[self, rhs] = self rhs - rhs self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.dot(rhs).zip(&rhs.dot(self), |a, b| a - b)
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        Float::sqrt(self.data.iter().map(|a| a.norm_sqr()).sum::<f64>())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest absolute entry of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }

    /// Spectral norm estimate by power iteration on `A^H A`.
    pub fn op_norm(&self) -> f64 {
        let n = self.cols;
        if n == 0 || self.rows == 0 {
            return 0.0;
        }
        let fro = self.frobenius_norm();
        if fro == 0.0 {
            return 0.0;
        }
        let gram = self.adjoint().dot(self);
        // Deterministic start vector with no special alignment.
        let mut v: Vec<C> = (0..n).map(|i| C::new(1.0 + 0.1 * i as f64, 0.05 * i as f64)).collect();
        let mut lambda = 0.0;
        for _ in 0..200 {
            let w = gram.mul_vec(&v).expect("square gram");
            let norm = Float::sqrt(w.iter().map(|c| c.norm_sqr()).sum::<f64>());
            if norm == 0.0 {
                break;
            }
            let next = norm / Float::sqrt(v.iter().map(|c| c.norm_sqr()).sum::<f64>());
            v = w.into_iter().map(|c| c / norm).collect();
            if (next - lambda).abs() <= 1e-14 * next {
                lambda = next;
                break;
            }
            lambda = next;
        }
        Float::sqrt(lambda).min(fro)
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> Result<C> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch);
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = CONE;
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
                .unwrap_or(k);
            if a[(p, k)] == CZERO {
                return Ok(CZERO);
            }
            if p != k {
                a.swap_rows(p, k);
                det = -det;
            }
            let pivot = a[(k, k)];
            det *= pivot;
            for i in k + 1..n {
                let f = a[(i, k)] / pivot;
                for j in k..n {
                    let v = a[(k, j)];
                    a[(i, j)] -= f * v;
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch);
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[(i, k)].norm().total_cmp(&a[(j, k)].norm()))
                .unwrap_or(k);
            if a[(p, k)].norm() <= 1e-14 * scale {
                return Err(Error::InvalidArgument("singular matrix"));
            }
            a.swap_rows(p, k);
            inv.swap_rows(p, k);
            let pivot = a[(k, k)];
            for j in 0..n {
                a[(k, j)] /= pivot;
                inv[(k, j)] /= pivot;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a[(i, k)];
                if f == CZERO {
                    continue;
                }
                for j in 0..n {
                    let (ak, ik) = (a[(k, j)], inv[(k, j)]);
                    a[(i, j)] -= f * ak;
                    inv[(i, j)] -= f * ik;
                }
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C;
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[i * self.cols + j]
    }
}

/// Matrix exponential by scaling and squaring a truncated Taylor series.
/// The argument is halved until its norm is at most 0.5.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.rows();
    let norm = a.frobenius_norm();
    let mut squarings = 0u32;
    let mut s = 1.0;
    while norm * s > 0.5 {
        s *= 0.5;
        squarings += 1;
    }
    let scaled = a.scale_real(s);
    // 0.5^18 / 18! is far below double precision.
    let mut term = CMatrix::identity(n);
    let mut sum = CMatrix::identity(n);
    for k in 1..=18 {
        term = term.dot(&scaled).scale_real(1.0 / k as f64);
        sum.axpy(CONE, &term);
        if term.max_abs() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.dot(&sum);
    }
    sum
}

/// Principal logarithm by the series `sum (-1)^{k+1} (g - I)^k / k`,
/// valid when `||g - I|| < 1`.
pub fn logm_series(g: &CMatrix) -> Result<CMatrix> {
    let n = g.rows();
    let x = g.sub(&CMatrix::identity(n))?;
    let norm = x.op_norm();
    if norm >= 1.0 {
        return Err(Error::LogOutOfRange { norm });
    }
    let mut sum = CMatrix::zeros(n, n);
    let mut power = CMatrix::identity(n);
    for k in 1..=4000 {
        power = power.dot(&x);
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum.axpy(C::new(sign / k as f64, 0.0), &power);
        if power.max_abs() / (k as f64) < 1e-17 {
            break;
        }
    }
    Ok(sum)
}

/// Reduced row echelon form in place; returns pivot columns. Entries below
/// `tol` times the largest entry are treated as zero.
pub fn rref(a: &mut CMatrix, tol: f64) -> Vec<usize> {
    let (rows, cols) = (a.rows(), a.cols());
    let thresh = tol * a.max_abs().max(f64::MIN_POSITIVE);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let p = (r..rows)
            .max_by(|&i, &j| a[(i, c)].norm().total_cmp(&a[(j, c)].norm()))
            .unwrap_or(r);
        if a[(p, c)].norm() <= thresh {
            for i in r..rows {
                a[(i, c)] = CZERO;
            }
            continue;
        }
        a.swap_rows(p, r);
        let pivot = a[(r, c)];
        for j in c..cols {
            a[(r, j)] /= pivot;
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a[(i, c)];
            if f == CZERO {
                continue;
            }
            for j in c..cols {
                let v = a[(r, j)];
                a[(i, j)] -= f * v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the right null space `{v : a v = 0}`.
pub fn null_space(a: &CMatrix, tol: f64) -> Vec<Vec<C>> {
    let mut m = a.clone();
    let pivots = rref(&mut m, tol);
    let cols = a.cols();
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![CZERO; cols];
        v[free] = CONE;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[(r, free)];
        }
        basis.push(v);
    }
    basis
}

pub fn rank(a: &CMatrix, tol: f64) -> usize {
    rref(&mut a.clone(), tol).len()
}

/// Singular values (descending) and right singular vectors as columns of `v`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

/// One-sided Jacobi SVD of a matrix with at least as many rows as columns.
pub fn svd(a: &CMatrix) -> Result<Svd> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::DimensionMismatch);
    }
    let mut u = a.clone();
    let mut v = CMatrix::identity(n);
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = CZERO;
                for i in 0..m {
                    alpha += u[(i, p)].norm_sqr();
                    beta += u[(i, q)].norm_sqr();
                    gamma += u[(i, p)].conj() * u[(i, q)];
                }
                let g = gamma.norm();
                if g <= 1e-15 * Float::sqrt(alpha * beta) || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + Float::sqrt(1.0 + zeta * zeta));
                let c = 1.0 / Float::sqrt(1.0 + t * t);
                let s = c * t;
                rotate(&mut u, p, q, phase, c, s);
                rotate(&mut v, p, q, phase, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> = (0..n)
        .map(|j| (Float::sqrt((0..m).map(|i| u[(i, j)].norm_sqr()).sum::<f64>()), j))
        .collect();
    order.sort_by(|a, b| b.0.total_cmp(&a.0));
    let singular_values = order.iter().map(|&(s, _)| s).collect();
    let v_sorted = CMatrix::from_fn(n, n, |i, k| v[(i, order[k].1)]);
    Ok(Svd { singular_values, v: v_sorted })
}

fn rotate(m: &mut CMatrix, p: usize, q: usize, phase: C, c: f64, s: f64) {
    for i in 0..m.rows() {
        let xp = m[(i, p)];
        let xq = m[(i, q)] * phase.conj();
        m[(i, p)] = xp * c - xq * s;
        m[(i, q)] = xp * s + xq * c;
    }
}
