//! Exact parameter algebra for `W f = u · (f ∘ ψ)` with `ψ(z) = a z + b` and
//! `u(z) = u₀ e^{c z}`.
//!
//! The family is closed under composition: `Wⁿ = W_(uₙ, ψⁿ)` where
//! `ψⁿ(z) = aⁿ z + bₙ` and `uₙ = ∏_{j<n} u ∘ ψʲ` is again of the form
//! `u0ₙ e^{cₙ z}`. Functions of the form `e^{αz}·poly(z)` ([`ExpPoly`]) are
//! mapped into themselves, which gives exact orbits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::special::{ln_binomial, ln_factorial, pow_log};
use crate::{approx_eq, Error, Result, EQ_TOL};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Parameters `(p, a, b, c, u₀)` of a weighted composition operator on `F_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    p: f64,
    a: Complex64,
    b: Complex64,
    c: Complex64,
    u0: Complex64,
}

impl OperatorParams {
    /// Validates `p ≥ 1`, `u₀ ≠ 0` and finiteness. `|a|` is unconstrained:
    /// boundedness is a verdict, not a precondition.
    pub fn new(p: f64, a: Complex64, b: Complex64, c: Complex64, u0: Complex64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidParams(format!("p must satisfy 1 <= p < inf, got {p}")));
        }
        for (name, v) in [("a", a), ("b", b), ("c", c), ("u0", u0)] {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} is not finite")));
            }
        }
        if u0 == ZERO {
            return Err(Error::InvalidParams("u0 = 0 gives the zero operator".into()));
        }
        Ok(Self { p, a, b, c, u0 })
    }

    /// Shorthand for `p = 2`, the Hilbert space case.
    pub fn hilbert(a: Complex64, b: Complex64, c: Complex64, u0: Complex64) -> Result<Self> {
        Self::new(2.0, a, b, c, u0)
    }

    pub(crate) fn raw(p: f64, a: Complex64, b: Complex64, c: Complex64, u0: Complex64) -> Self {
        Self { p, a, b, c, u0 }
    }

    pub fn identity(p: f64) -> Self {
        Self::raw(p, ONE, ZERO, ZERO, ONE)
    }

    pub fn p(&self) -> f64 {
        self.p
    }
    pub fn a(&self) -> Complex64 {
        self.a
    }
    pub fn b(&self) -> Complex64 {
        self.b
    }
    pub fn c(&self) -> Complex64 {
        self.c
    }
    pub fn u0(&self) -> Complex64 {
        self.u0
    }

    pub fn with_p(mut self, p: f64) -> Result<Self> {
        self.p = p;
        Self::new(p, self.a, self.b, self.c, self.u0)
    }

    pub fn psi(&self, z: Complex64) -> Complex64 {
        self.a * z + self.b
    }

    pub fn weight(&self, z: Complex64) -> Complex64 {
        self.u0 * (self.c * z).exp()
    }

    /// `a = 1` up to [`EQ_TOL`].
    pub fn a_is_one(&self) -> bool {
        approx_eq(self.a, ONE)
    }

    /// `|a| = 1` up to [`EQ_TOL`].
    pub fn a_on_circle(&self) -> bool {
        (self.a.norm() - 1.0).abs() <= EQ_TOL
    }

    /// `|a| < 1` and not on the circle.
    pub fn a_inside_disc(&self) -> bool {
        self.a.norm() < 1.0 && !self.a_on_circle()
    }

    pub fn b_is_zero(&self) -> bool {
        self.b.norm() <= EQ_TOL
    }

    /// `u ≡ 1`, i.e. `W` is the composition operator `C_ψ`.
    pub fn is_composition(&self) -> bool {
        self.c.norm() <= EQ_TOL && approx_eq(self.u0, ONE)
    }

    /// The weight forced by boundedness when `|a| = 1`: `c = −a·conj(b)`.
    pub fn has_forced_weight(&self) -> bool {
        approx_eq(self.c, -self.a * self.b.conj())
    }

    /// Closed-form `n`-th iterate. `n = 0` gives the identity.
    pub fn iterate_params(&self, n: u32) -> IterateParams {
        let a_n = self.a.powu(n);
        let (geom, geom_cumulative) = geometric_sums(self.a, n);
        let b_n = self.b * geom;
        let c_n = self.c * geom;
        // Σ_{j<n} b_j = b · Σ_{j<n} Σ_{i<j} a^i
        let u0_n = self.u0.powu(n) * (self.c * self.b * geom_cumulative).exp();
        IterateParams {
            n,
            p: self.p,
            a_n,
            b_n,
            c_n,
            u0_n,
        }
    }

    /// The operator that applies `self` first and then `next`.
    pub fn then(&self, next: &OperatorParams) -> OperatorParams {
        OperatorParams::raw(
            self.p,
            self.a * next.a,
            self.a * next.b + self.b,
            next.c + self.c * next.a,
            self.u0 * next.u0 * (self.c * next.b).exp(),
        )
    }

    /// `z₀ = b / (1 − a)`, the fixed point of `ψ`.
    pub fn fixed_point(&self) -> Result<Complex64> {
        if self.a_is_one() {
            return Err(Error::NoFixedPoint);
        }
        Ok(self.b / (ONE - self.a))
    }

    /// `u(z₀)`.
    pub fn weight_at_fixed_point(&self) -> Result<Complex64> {
        Ok(self.weight(self.fixed_point()?))
    }

    /// `M(u, ψ) = sup_z |u(z)| e^{(|ψ(z)|² − |z|²)/2}`, or `+∞`.
    pub fn bound_constant(&self) -> f64 {
        let base = self.u0.norm_sqr().ln() / 2.0 + self.b.norm_sqr() / 2.0;
        if self.a_inside_disc() {
            let w = self.c + self.a * self.b.conj();
            (base + w.norm_sqr() / (2.0 * (1.0 - self.a.norm_sqr()))).exp()
        } else if self.a_on_circle() && self.has_forced_weight() {
            base.exp()
        } else {
            f64::INFINITY
        }
    }

    /// `W f` for an exp-polynomial `f`, exactly.
    pub fn apply(&self, f: &ExpPoly) -> ExpPoly {
        let alpha = self.c + f.alpha * self.a;
        let scale = self.u0 * (f.alpha * self.b).exp();
        let deg = f.coeffs.len();
        let mut out = vec![ZERO; deg];
        for (k, &q) in f.coeffs.iter().enumerate() {
            if q == ZERO {
                continue;
            }
            // q · (a z + b)^k
            for (j, slot) in out.iter_mut().enumerate().take(k + 1) {
                let binom = ln_binomial(k, j).exp();
                *slot += q * binom * self.a.powu(j as u32) * self.b.powu((k - j) as u32);
            }
        }
        for v in &mut out {
            *v *= scale;
        }
        ExpPoly { alpha, coeffs: out }
    }
}

/// `(Σ_{j<n} a^j, Σ_{j<n} Σ_{i<j} a^i)`, with the `a = 1` branch handled
/// separately and direct summation when `a` is close to 1.
fn geometric_sums(a: Complex64, n: u32) -> (Complex64, Complex64) {
    let nf = n as f64;
    if approx_eq(a, ONE) {
        return (Complex64::from(nf), Complex64::from(nf * (nf - 1.0) / 2.0));
    }
    let one_minus = ONE - a;
    if one_minus.norm() < 1e-2 {
        let mut power = ONE;
        let mut partial = ZERO;
        let mut cumulative = ZERO;
        for _ in 0..n {
            cumulative += partial;
            partial += power;
            power *= a;
        }
        return (partial, cumulative);
    }
    let geom = (ONE - a.powu(n)) / one_minus;
    (geom, (Complex64::from(nf) - geom) / one_minus)
}

/// Closed-form coefficients of `Wⁿ = W_(uₙ, ψⁿ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterateParams {
    pub n: u32,
    pub p: f64,
    pub a_n: Complex64,
    pub b_n: Complex64,
    pub c_n: Complex64,
    pub u0_n: Complex64,
}

impl IterateParams {
    /// The iterate as an operator. `u0_n` may underflow for very large `n`;
    /// the result is not re-validated.
    pub fn as_params(&self) -> OperatorParams {
        OperatorParams::raw(self.p, self.a_n, self.b_n, self.c_n, self.u0_n)
    }
}

/// `f(z) = e^{αz} · Σ_k coeffs[k] z^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpPoly {
    pub alpha: Complex64,
    pub coeffs: Vec<Complex64>,
}

impl ExpPoly {
    pub fn new(alpha: Complex64, coeffs: Vec<Complex64>) -> Self {
        Self { alpha, coeffs }
    }

    pub fn constant(v: Complex64) -> Self {
        Self::new(ZERO, vec![v])
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Self::new(ZERO, coeffs)
    }

    /// `K_w(z) = e^{conj(w) z}`.
    pub fn kernel(w: Complex64) -> Self {
        Self::new(w.conj(), vec![ONE])
    }

    /// `k_w(z) = e^{conj(w) z − |w|²/2}`, unit norm in every `F_p`.
    pub fn normalized_kernel(w: Complex64) -> Self {
        Self::new(w.conj(), vec![Complex64::from((-w.norm_sqr() / 2.0).exp())])
    }

    /// `e_m(z) = z^m / √(m!)`.
    pub fn basis_vector(m: usize) -> Self {
        let mut coeffs = vec![ZERO; m + 1];
        coeffs[m] = Complex64::from((-0.5 * ln_factorial(m)).exp());
        Self::polynomial(coeffs)
    }

    /// Length of the coefficient list minus one.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let poly = self.coeffs.iter().rev().fold(ZERO, |acc, &q| acc * z + q);
        (self.alpha * z).exp() * poly
    }

    /// `f′`, again an exp-polynomial.
    pub fn derivative(&self) -> ExpPoly {
        let mut out: Vec<Complex64> = self.coeffs.iter().map(|q| q * self.alpha).collect();
        for (k, &q) in self.coeffs.iter().enumerate().skip(1) {
            out[k - 1] += q * k as f64;
        }
        ExpPoly::new(self.alpha, out)
    }

    pub fn scaled(&self, s: Complex64) -> ExpPoly {
        ExpPoly::new(self.alpha, self.coeffs.iter().map(|q| q * s).collect())
    }

    /// Zero-free on ℂ: the polynomial part is a nonzero constant.
    pub fn is_zero_free(&self) -> bool {
        self.coeffs.first().is_some_and(|q| *q != ZERO)
            && self.coeffs.iter().skip(1).all(|q| *q == ZERO)
    }

    fn coeff(&self, m: usize) -> Complex64 {
        // ⟨e^{αz} z^k, e_m⟩ = √(m!) α^{m−k} / (m−k)!
        let ln_alpha = self.alpha.norm().ln();
        let arg_alpha = self.alpha.arg();
        let mut acc = ZERO;
        for (k, &q) in self.coeffs.iter().enumerate().take(m + 1) {
            if q == ZERO {
                continue;
            }
            let d = m - k;
            let log_mag = 0.5 * ln_factorial(m) + pow_log(d, ln_alpha) - ln_factorial(d);
            if log_mag == f64::NEG_INFINITY {
                continue;
            }
            acc += q * Complex64::from_polar(log_mag.exp(), d as f64 * arg_alpha);
        }
        acc
    }

    /// Coefficients `⟨f, e_m⟩` for `m < n`.
    pub fn basis_coeffs(&self, n: usize) -> Vec<Complex64> {
        (0..n).map(|m| self.coeff(m)).collect()
    }

    /// Smallest `N` past the coefficient peak such that the next ten squared
    /// coefficients sum below `tol² · ‖P_N f‖²`.
    pub fn truncation(&self, tol: f64) -> usize {
        let peak = self.degree() as f64 + self.alpha.norm_sqr();
        let mut norm_sq = 0.0;
        let mut m = 0usize;
        loop {
            norm_sq += self.coeff(m).norm_sqr();
            m += 1;
            if (m as f64) < peak + 1.0 {
                continue;
            }
            let window: f64 = (m..m + 10).map(|k| self.coeff(k).norm_sqr()).sum();
            if window <= tol * tol * norm_sq || norm_sq == 0.0 && window == 0.0 {
                return m;
            }
        }
    }

    /// `‖f‖` in `F²` from the basis expansion truncated by [`Self::truncation`].
    pub fn norm(&self, tol: f64) -> f64 {
        let n = self.truncation(tol);
        self.basis_coeffs(n).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}
