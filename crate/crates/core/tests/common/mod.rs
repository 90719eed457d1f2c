//! Oracles shared by the integration tests.
#![allow(dead_code)]

use std::num::NonZeroUsize;

use fockdyn_core::symbol::OperatorParams;
use fockdyn_core::Complex64;
use gauss_quad::hermite::GaussHermite;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Direct evaluation of `(W e_m)(z) = u0 e^{cz} (az + b)^m / √(m!)`.
pub fn w_basis(p: &OperatorParams, m: usize, z: Complex64) -> Complex64 {
    p.u0() * (p.c() * z).exp() * (p.a() * z + p.b()).powu(m as u32) / factorial(m).sqrt()
}

/// `(1/π) ∫ (W e_m)(z) · conj(e_n(z)) e^{−|z|²} dA(z)` by a tensor
/// Gauss–Hermite rule.
pub fn quadrature_entry(rule: &[(f64, f64)], p: &OperatorParams, n: usize, m: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(x, wx) in rule {
        for &(y, wy) in rule {
            let z = c(x, y);
            let en = z.conj().powu(n as u32) / factorial(n).sqrt();
            acc += wx * wy * w_basis(p, m, z) * en;
        }
    }
    acc / std::f64::consts::PI
}

pub fn rule(nodes: usize) -> Vec<(f64, f64)> {
    GaussHermite::new(NonZeroUsize::new(nodes).unwrap())
        .as_node_weight_pairs()
        .to_vec()
}

pub fn oracle_family() -> Vec<OperatorParams> {
    let e = |x: f64| c(x.exp(), 0.0);
    vec![
        OperatorParams::hilbert(c(0.5, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap(),
        OperatorParams::hilbert(c(0.0, 0.0), c(0.5, 0.0), c(0.3, 0.0), c(1.0, 0.0)).unwrap(),
        OperatorParams::hilbert(c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), e(-0.5)).unwrap(),
        OperatorParams::hilbert(c(0.3, 0.4), c(0.2, -0.1), c(0.0, 0.5), c(0.8, 0.0)).unwrap(),
        OperatorParams::hilbert(c(0.5, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)).unwrap(),
        OperatorParams::hilbert(c(0.0, 0.5), c(1.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)).unwrap(),
    ]
}

/// Relative error with an absolute floor for entries that vanish.
pub fn entry_error(exact: Complex64, approx: Complex64) -> f64 {
    (exact - approx).norm() / exact.norm().max(1e-5)
}

/// Canonical parameter sets covering every branch of the Ritt classification,
/// with a short label.
pub fn canonical_sets() -> Vec<(&'static str, OperatorParams)> {
    let i = c(0.0, 1.0);
    let r = |x: f64| c(x, 0.0);
    let sets = [
        ("identity", r(1.0), r(0.0), r(0.0), r(1.0)),
        ("multiplication by 1/2", r(1.0), r(0.0), r(0.0), r(0.5)),
        ("translation, |u0| < exp(-|b|^2/2)", r(1.0), r(1.0), r(-1.0), r(0.5)),
        ("rotation by i with forced weight", i, r(1.0), -i, r(0.5)),
        ("compact dilation", r(0.5), r(0.0), r(0.0), r(1.0)),
        ("compact dilation, u0 = 0.9", r(0.5), r(0.0), r(0.0), r(0.9)),
        ("rank one, u0 = -1", r(0.0), r(0.0), r(0.0), r(-1.0)),
        ("rank one, u(z0) = 1", r(0.0), r(0.5), r(0.4), r((-0.2f64).exp())),
        ("open conjecture", r(0.5), r(0.0), r(1.0), r(1.0)),
        ("compact, |u(z0)| = 1, u(z0) != 1", r(0.5), r(1.0), r(0.0), i),
        ("rotation by i", i, r(0.0), r(0.0), r(1.0)),
        ("compact, not power bounded", r(0.5), r(0.0), r(0.0), r(2.0)),
    ];
    sets.into_iter()
        .map(|(name, a, b, cc, u0)| (name, OperatorParams::hilbert(a, b, cc, u0).unwrap()))
        .collect()
}
