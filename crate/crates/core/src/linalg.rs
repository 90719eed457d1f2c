//! Dense complex matrices and the truncated matrix of `W` on `F²`.
//!
//! In the orthonormal basis `e_m(z) = z^m/√(m!)`,
//!
//! ```text
//! ⟨W e_m, e_n⟩ = u₀ Σ_{j ≤ min(m,n)} √(n! m!) aʲ b^{m−j} c^{n−j} / (j! (m−j)! (n−j)!)
//! ```
//!
//! Terms are summed in the log domain with their phases tracked separately.
//! Norms use a Krylov-accelerated power iteration on the Gram matrix;
//! resolvent norms iterate with an LU factorization with partial pivoting.

use std::fmt::Write as _;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::special::{ln_factorial, pow_log};
use crate::symbol::OperatorParams;
use crate::{par, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Relative tolerance on the Ritz residual of the norm iterations.
pub const ITER_TOL: f64 = 1e-9;
pub const ITER_CAP: usize = 10_000;
/// Relative gain of the Ritz value treated as no progress.
const STALL_TOL: f64 = 1e-13;
/// Terms more than this many e-folds below the largest are dropped.
const LOG_DROP: f64 = 60.0;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Panics unless `rows` is square.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    /// Leading `k × k` block.
    pub fn leading_block(&self, k: usize) -> Self {
        assert!(k <= self.n);
        Self::from_fn(k, |i, j| self[(i, j)])
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_upper_triangular(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self[(i, j)].norm() <= tol))
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    /// `A* v`.
    pub fn adjoint_mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.n];
        for (i, &vi) in v.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * vi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// `self += s · other`.
    pub fn add_scaled(&mut self, s: Complex64, other: &CMatrix) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    fn zip_with(&self, other: &CMatrix, f: impl Fn(Complex64, Complex64) -> Complex64) -> CMatrix {
        assert_eq!(self.n, other.n);
        CMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    /// `Aⁿ` by repeated squaring.
    pub fn pow(&self, mut n: u32) -> CMatrix {
        let mut result = CMatrix::identity(self.n);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.matmul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }

    /// `[A⁰, A¹, …, A^max]` by successive multiplication.
    pub fn powers(&self, max: usize) -> Vec<CMatrix> {
        let mut out = Vec::with_capacity(max + 1);
        out.push(CMatrix::identity(self.n));
        for k in 0..max {
            let next = out[k].matmul(self);
            out.push(next);
        }
        out
    }

    /// One row per line, entries `re+imj` at 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|z| crate::fmt::complex(*z)).collect();
            let _ = writeln!(s, "{}", row.join(","));
        }
        s
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalized(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let nrm = vec_norm(&v);
    for z in &mut v {
        *z /= nrm;
    }
    v
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl Lu {
    /// Fails when a pivot is negligible relative to the largest entry.
    pub fn factor(a: &CMatrix) -> std::result::Result<Self, usize> {
        let n = a.n;
        let mut lu = a.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let floor = 1e-14 * a.max_abs().max(1.0);
        for k in 0..n {
            let (piv, piv_abs) = (k..n)
                .map(|i| (i, lu[i * n + k].norm()))
                .fold((k, -1.0), |best, x| if x.1 > best.1 { x } else { best });
            if piv_abs <= floor {
                return Err(k);
            }
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                if factor == ZERO {
                    continue;
                }
                let (top, bottom) = lu.split_at_mut(i * n);
                let row_k = &top[k * n + k + 1..k * n + n];
                let row_i = &mut bottom[k + 1..n];
                for (x, y) in row_i.iter_mut().zip(row_k) {
                    *x -= factor * y;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: Complex64 = row.iter().zip(&x[..i]).map(|(l, y)| l * y).sum();
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: Complex64 = row.iter().zip(&x[i + 1..]).map(|(u, y)| u * y).sum();
            x[i] = (x[i] - s) / self.lu[i * n + i];
        }
        x
    }

    /// Solves `A* x = b`, using `A* = U* L* P`.
    pub fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut w = b.to_vec();
        // U* w = b (lower triangular)
        for i in 0..n {
            let mut s = w[i];
            for (k, wk) in w[..i].iter().enumerate() {
                s -= self.lu[k * n + i].conj() * wk;
            }
            w[i] = s / self.lu[i * n + i].conj();
        }
        // L* v = w (unit upper triangular)
        for i in (0..n).rev() {
            let mut s = w[i];
            for (k, wk) in w.iter().enumerate().skip(i + 1) {
                s -= self.lu[k * n + i].conj() * wk;
            }
            w[i] = s;
        }
        let mut x = vec![ZERO; n];
        for (i, &p) in self.perm.iter().enumerate() {
            x[p] = w[i];
        }
        x
    }
}

fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with
/// diagonal `alpha` and off-diagonal `beta`.
fn sturm_count(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for (i, &a) in alpha.iter().enumerate() {
        let off = if i == 0 { 0.0 } else { beta[i - 1] * beta[i - 1] / d };
        d = a - x - off;
        if d == 0.0 {
            d = -f64::EPSILON * (a.abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue of the tridiagonal matrix and the modulus of the last
/// component of its unit eigenvector.
fn tridiagonal_top(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    let radius = |i: usize| {
        (if i > 0 { beta[i - 1].abs() } else { 0.0 }) + (if i + 1 < k { beta[i].abs() } else { 0.0 })
    };
    let mut lo = (0..k).map(|i| alpha[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..k).map(|i| alpha[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
            break;
        }
        if sturm_count(alpha, beta, mid) == k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = hi;
    // (T − θ)y = 0 solved top-down; θ lies above every leading block's
    // spectrum, so the recurrence does not cancel
    let mut y = vec![1.0f64; k];
    for i in 0..k - 1 {
        let prev = if i > 0 { beta[i - 1] * y[i - 1] } else { 0.0 };
        y[i + 1] = ((theta - alpha[i]) * y[i] - prev) / beta[i];
        if y[i + 1].abs() > 1e150 {
            for v in &mut y[..=i + 1] {
                *v *= 1e-150;
            }
        }
    }
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    (theta, y[k - 1].abs() / norm)
}

struct KrylovRun {
    theta: f64,
    residual: f64,
    /// The Krylov space became invariant before filling the whole space.
    breakdown: bool,
}

/// Largest eigenvalue of the Hermitian positive semidefinite operator
/// `apply` on `ℂⁿ`: the power iteration from `start`, accelerated by keeping
/// every iterate (Lanczos with full reorthogonalization). Stops once the
/// Ritz residual is below `ITER_TOL` relative to the estimate.
fn krylov_top(n: usize, start: Vec<Complex64>, apply: impl Fn(&[Complex64]) -> Vec<Complex64>) -> Result<KrylovRun> {
    let mut basis = vec![normalized(start)];
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let cap = n.min(ITER_CAP);
    let mut last = (0.0, f64::INFINITY);
    let mut stalled = 0;
    for k in 0..cap {
        let mut w = apply(&basis[k]);
        if w.iter().any(|z| !z.is_finite()) {
            return Err(Error::IterationCap {
                iterations: k,
                estimate: last.0,
                residual: last.1,
            });
        }
        alpha.push(dot(&basis[k], &w).re);
        for _ in 0..2 {
            for q in &basis {
                let h = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= h * qi;
                }
            }
        }
        let b = vec_norm(&w);
        let (theta, tail) = tridiagonal_top(&alpha, &beta);
        let residual = b * tail;
        let breakdown = b <= 1e-13 * theta.abs().max(alpha[0].abs()) || b == 0.0;
        // Ritz values increase monotonically; two tiny consecutive gains
        // mean the estimate has settled even inside a singular-value cluster
        let gain = theta - last.0;
        stalled = if gain <= STALL_TOL * theta { stalled + 1 } else { 0 };
        last = (theta, residual);
        if residual <= ITER_TOL * theta || stalled >= 2 || breakdown || k + 1 == n {
            return Ok(KrylovRun {
                theta,
                residual,
                breakdown: breakdown && k + 1 < n,
            });
        }
        beta.push(b);
        basis.push(w.into_iter().map(|z| z / b).collect());
    }
    Err(Error::IterationCap {
        iterations: cap,
        estimate: last.0.max(0.0).sqrt(),
        residual: last.1,
    })
}

fn alternating(n: usize) -> Vec<Complex64> {
    (0..n).map(|i| if i % 2 == 0 { ONE } else { -ONE }).collect()
}

/// Largest eigenvalue of `apply`, from the all-ones start and, when that run
/// ends early in an invariant subspace or away from an eigenvector
/// (residual above `1e−6`), from the alternating `±1` start too.
fn top_eigenvalue(n: usize, apply: impl Fn(&[Complex64]) -> Vec<Complex64>) -> Result<f64> {
    let first = krylov_top(n, vec![ONE; n], &apply)?;
    if !first.breakdown && first.residual <= 1e-6 * first.theta {
        return Ok(first.theta);
    }
    let second = krylov_top(n, alternating(n), &apply)?;
    Ok(first.theta.max(second.theta))
}

/// Largest singular value, `√λ_max(M*M)`.
pub fn op_norm(m: &CMatrix) -> Result<f64> {
    if m.n == 0 {
        return Ok(0.0);
    }
    let theta = top_eigenvalue(m.n, |v| m.adjoint_mul_vec(&m.mul_vec(v)))?;
    Ok(theta.max(0.0).sqrt())
}

fn resolvent_from_solves(
    n: usize,
    lambda: Complex64,
    solve: impl Fn(&[Complex64]) -> Vec<Complex64>,
    solve_adjoint: impl Fn(&[Complex64]) -> Vec<Complex64>,
) -> Result<f64> {
    let theta = top_eigenvalue(n, |v| solve_adjoint(&solve(v))).map_err(|e| match e {
        Error::IterationCap { iterations, .. } if iterations < n.min(ITER_CAP) => Error::SingularResolvent(lambda),
        e => e,
    })?;
    let s = theta.max(0.0).sqrt();
    if !s.is_finite() || s > 1e15 {
        return Err(Error::SingularResolvent(lambda));
    }
    Ok(s)
}

/// `‖(λI − M)⁻¹‖ = 1/σ_min(λI − M)`, iterating with an LU factorization of
/// `λI − M`.
pub fn resolvent_norm(m: &CMatrix, lambda: Complex64) -> Result<f64> {
    let mut shifted = m.scale(-ONE);
    for i in 0..m.n {
        shifted[(i, i)] += lambda;
    }
    let lu = Lu::factor(&shifted).map_err(|_| Error::SingularResolvent(lambda))?;
    resolvent_from_solves(m.n, lambda, |v| lu.solve(v), |v| lu.solve_adjoint(v))
}

/// Resolvent norms of one matrix at many points. The matrix is brought to
/// upper Hessenberg form `H = Q*MQ` once (Householder reflections); `λI − H`
/// then factors in `O(N²)` with partial pivoting between neighbouring rows,
/// and `‖(λI − H)⁻¹‖ = ‖(λI − M)⁻¹‖`.
#[derive(Debug, Clone)]
pub struct ResolventSolver {
    h: CMatrix,
}

impl ResolventSolver {
    pub fn new(m: &CMatrix) -> Self {
        Self { h: hessenberg(m) }
    }

    pub fn hessenberg_form(&self) -> &CMatrix {
        &self.h
    }

    pub fn norm(&self, lambda: Complex64) -> Result<f64> {
        let lu = HessenbergLu::factor(&self.h, lambda).ok_or(Error::SingularResolvent(lambda))?;
        resolvent_from_solves(self.h.n, lambda, |v| lu.solve(v), |v| lu.solve_adjoint(v))
    }
}

/// Unitary reduction to upper Hessenberg form.
pub fn hessenberg(m: &CMatrix) -> CMatrix {
    let n = m.n;
    let mut a = m.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let xnorm = vec_norm(&x);
        if xnorm == 0.0 || x[1..].iter().all(|z| *z == ZERO) {
            continue;
        }
        let phase = if x[0] == ZERO { ONE } else { x[0] / x[0].norm() };
        let mut v = x;
        v[0] += phase * xnorm;
        let v = normalized(v);
        // A ← (I − 2vv*) A on rows k+1..
        for j in k..n {
            let s: Complex64 = (k + 1..n).zip(&v).map(|(i, vi)| vi.conj() * a[(i, j)]).sum();
            for (i, vi) in (k + 1..n).zip(&v) {
                a[(i, j)] -= 2.0 * vi * s;
            }
        }
        // A ← A (I − 2vv*) on columns k+1..
        for i in 0..n {
            let s: Complex64 = (k + 1..n).zip(&v).map(|(j, vj)| a[(i, j)] * vj).sum();
            for (j, vj) in (k + 1..n).zip(&v) {
                a[(i, j)] -= 2.0 * s * vj.conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
    a
}

/// `E_{N−2}⋯E_0 (λI − H) = U` with `E_k = (I − l_k e_{k+1}e_kᵀ) P_k`, where
/// `P_k` optionally swaps rows `k` and `k+1`.
struct HessenbergLu {
    n: usize,
    u: Vec<Complex64>,
    mult: Vec<Complex64>,
    swapped: Vec<bool>,
}

impl HessenbergLu {
    fn factor(h: &CMatrix, lambda: Complex64) -> Option<Self> {
        let n = h.n;
        let mut u: Vec<Complex64> = h.data.iter().map(|z| -z).collect();
        for i in 0..n {
            u[i * n + i] += lambda;
        }
        let floor = 1e-14 * u.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let mut mult = vec![ZERO; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for k in 0..n.saturating_sub(1) {
            if u[(k + 1) * n + k].norm() > u[k * n + k].norm() {
                let (top, bottom) = u.split_at_mut((k + 1) * n);
                top[k * n + k..k * n + n].swap_with_slice(&mut bottom[k..n]);
                swapped[k] = true;
            }
            let pivot = u[k * n + k];
            if pivot.norm() <= floor {
                return None;
            }
            let l = u[(k + 1) * n + k] / pivot;
            mult[k] = l;
            u[(k + 1) * n + k] = ZERO;
            if l != ZERO {
                let (top, bottom) = u.split_at_mut((k + 1) * n);
                for (x, y) in bottom[k + 1..n].iter_mut().zip(&top[k * n + k + 1..k * n + n]) {
                    *x -= l * y;
                }
            }
        }
        if n > 0 && u[n * n - 1].norm() <= floor {
            return None;
        }
        Some(Self { n, u, mult, swapped })
    }

    fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x = b.to_vec();
        for k in 0..n.saturating_sub(1) {
            if self.swapped[k] {
                x.swap(k, k + 1);
            }
            let t = self.mult[k] * x[k];
            x[k + 1] -= t;
        }
        for i in (0..n).rev() {
            let row = &self.u[i * n + i + 1..(i + 1) * n];
            let s: Complex64 = row.iter().zip(&x[i + 1..]).map(|(u, y)| u * y).sum();
            x[i] = (x[i] - s) / self.u[i * n + i];
        }
        x
    }

    fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut y = b.to_vec();
        // U* y = b, column-oriented so rows of U are read contiguously
        for i in 0..n {
            y[i] /= self.u[i * n + i].conj();
            let yi = y[i];
            for (yj, uij) in y[i + 1..].iter_mut().zip(&self.u[i * n + i + 1..(i + 1) * n]) {
                *yj -= uij.conj() * yi;
            }
        }
        for k in (0..n.saturating_sub(1)).rev() {
            let t = self.mult[k].conj() * y[k + 1];
            y[k] -= t;
            if self.swapped[k] {
                y.swap(k, k + 1);
            }
        }
        y
    }
}

/// `(‖Mⁿ‖, ‖Mⁿ⁺¹ − Mⁿ‖)`.
pub fn mat_power_diff(m: &CMatrix, n: u32) -> Result<(f64, f64)> {
    let mn = m.pow(n);
    let next = mn.matmul(m);
    Ok((op_norm(&mn)?, op_norm(&next.sub(&mn))?))
}

/// Truncated matrix of `W` on polynomials of degree `< N` in `F²`.
#[derive(Debug, Clone)]
pub struct MatrixRep {
    pub n_dim: usize,
    pub entries: CMatrix,
    pub params: OperatorParams,
    /// Built from parameters whose operator is unbounded; `‖T_N‖` then
    /// diverges with `N`.
    pub non_convergent: bool,
}

impl MatrixRep {
    pub fn to_csv(&self) -> String {
        self.entries.to_csv()
    }
}

fn log_polar(z: Complex64) -> (f64, f64) {
    (z.norm().ln(), z.arg())
}

/// Single entry `⟨W e_m, e_n⟩`.
pub fn matrix_entry(p: &OperatorParams, n: usize, m: usize) -> Complex64 {
    let (la, pa) = log_polar(p.a());
    let (lb, pb) = log_polar(p.b());
    let (lc, pc) = log_polar(p.c());
    let half = 0.5 * (ln_factorial(n) + ln_factorial(m));
    let mut terms: Vec<(f64, f64)> = Vec::with_capacity(m.min(n) + 1);
    for j in 0..=m.min(n) {
        let lg = half - ln_factorial(j) - ln_factorial(m - j) - ln_factorial(n - j)
            + pow_log(j, la)
            + pow_log(m - j, lb)
            + pow_log(n - j, lc);
        if lg == f64::NEG_INFINITY || lg.is_nan() {
            continue;
        }
        let phase = j as f64 * pa + (m - j) as f64 * pb + (n - j) as f64 * pc;
        terms.push((lg, phase));
    }
    let Some(top) = terms.iter().map(|t| t.0).reduce(f64::max) else {
        return ZERO;
    };
    let sum: Complex64 = terms
        .iter()
        .filter(|t| t.0 >= top - LOG_DROP)
        .map(|&(lg, ph)| Complex64::from_polar((lg - top).exp(), ph))
        .sum();
    p.u0() * sum * top.exp()
}

/// The `N × N` matrix `entry[n][m] = ⟨W e_m, e_n⟩`. Requires `p = 2`; rows
/// are computed in parallel.
pub fn build_matrix(p: &OperatorParams, n_dim: usize) -> Result<MatrixRep> {
    if n_dim < 1 {
        return Err(Error::InvalidDimension(n_dim));
    }
    if p.p() != 2.0 {
        return Err(Error::InvalidParams(format!(
            "matrix representations need p = 2, got p = {}",
            p.p()
        )));
    }
    let rows: Vec<usize> = (0..n_dim).collect();
    let rows = par::map(&rows, |&n| (0..n_dim).map(|m| matrix_entry(p, n, m)).collect::<Vec<_>>());
    let entries = CMatrix::from_rows(rows);
    Ok(MatrixRep {
        n_dim,
        entries,
        params: *p,
        non_convergent: !crate::classify::classify(p).bounded,
    })
}
