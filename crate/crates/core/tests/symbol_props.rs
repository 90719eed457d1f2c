//! Parameter algebra against brute-force composition and direct evaluation.

mod common;

use common::{c, factorial};
use fockdyn_core::symbol::{ExpPoly, OperatorParams};
use fockdyn_core::Complex64;
use proptest::prelude::*;

fn complex(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, -std::f64::consts::PI..std::f64::consts::PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

/// Bounded-looking parameter sets: `|a| ≤ 0.95` or `|a| = 1`, moderate `b, c`.
fn params() -> impl Strategy<Value = OperatorParams> {
    let a = prop_oneof![
        complex(0.95),
        (-std::f64::consts::PI..std::f64::consts::PI).prop_map(|t| Complex64::from_polar(1.0, t)),
        Just(c(1.0, 0.0)),
    ];
    (a, complex(1.0), complex(1.0), 0.3f64..1.5, -3.0f64..3.0).prop_map(|(a, b, cc, r, t)| {
        OperatorParams::hilbert(a, b, cc, Complex64::from_polar(r, t)).unwrap()
    })
}

fn rel(x: Complex64, y: Complex64) -> f64 {
    let scale = x.norm().max(y.norm());
    if scale == 0.0 {
        0.0
    } else {
        (x - y).norm() / scale
    }
}

/// `u_n(z) = ∏_{j<n} u(ψʲ(z))` and `ψⁿ(z)` by direct iteration.
fn brute_iterate(p: &OperatorParams, n: u32, z: Complex64) -> (Complex64, Complex64) {
    let mut w = z;
    let mut weight = c(1.0, 0.0);
    for _ in 0..n {
        weight *= p.weight(w);
        w = p.psi(w);
    }
    (weight, w)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn semigroup_law(p in params(), m in 0u32..=32, n in 0u32..=32) {
        let direct = p.iterate_params(m + n);
        let composed = p.iterate_params(n).as_params().then(&p.iterate_params(m).as_params());
        prop_assert!(rel(direct.a_n, composed.a()) <= 1e-12);
        prop_assert!(rel(direct.b_n, composed.b()) <= 1e-12);
        prop_assert!(rel(direct.c_n, composed.c()) <= 1e-12);
        prop_assert!(rel(direct.u0_n, composed.u0()) <= 1e-12, "{} vs {}", direct.u0_n, composed.u0());
    }

    #[test]
    fn iterate_matches_brute_force_weights(p in params(), n in 1u32..=12, z in complex(2.0)) {
        let it = p.iterate_params(n).as_params();
        let (weight, w) = brute_iterate(&p, n, z);
        prop_assert!(rel(it.psi(z), w) <= 1e-10);
        prop_assert!(rel(it.weight(z), weight) <= 1e-9);
    }

    #[test]
    fn apply_iterate_consistency(
        p in params(),
        n in 1u32..=20,
        alpha in complex(1.0),
        coeffs in prop::collection::vec(complex(1.0), 1..4),
        points in prop::collection::vec(complex(2.0), 10),
    ) {
        let f = ExpPoly::new(alpha, coeffs);
        let mut g = f.clone();
        for _ in 0..n {
            g = p.apply(&g);
        }
        let h = p.iterate_params(n).as_params().apply(&f);
        let values: Vec<(Complex64, Complex64)> = points.iter().map(|&z| (g.eval(z), h.eval(z))).collect();
        let scale = values.iter().map(|(x, y)| x.norm().max(y.norm())).fold(0.0, f64::max);
        for (x, y) in values {
            prop_assert!((x - y).norm() <= 1e-9 * scale.max(f64::MIN_POSITIVE), "{x} vs {y}");
        }
    }

    #[test]
    fn apply_is_u_times_f_of_psi(p in params(), alpha in complex(1.0), coeffs in prop::collection::vec(complex(1.0), 1..5), z in complex(2.0)) {
        let f = ExpPoly::new(alpha, coeffs);
        let expected = p.weight(z) * f.eval(p.psi(z));
        prop_assert!(rel(p.apply(&f).eval(z), expected) <= 1e-10);
        prop_assert_eq!(p.apply(&f).coeffs.len(), f.coeffs.len());
    }

    #[test]
    fn normalized_kernels_have_unit_norm(w in complex(3.0)) {
        let norm = ExpPoly::normalized_kernel(w).norm(1e-12);
        prop_assert!((norm - 1.0).abs() <= 1e-10, "|k_w| = {norm}");
    }

    #[test]
    fn point_estimate(
        coeffs in prop::collection::vec(complex(2.0), 1..=9),
        points in prop::collection::vec(complex(3.0), 50),
    ) {
        // ‖Σ q_k z^k‖² = Σ |q_k|² k!
        let norm = coeffs.iter().enumerate().map(|(k, q)| q.norm_sqr() * factorial(k)).sum::<f64>().sqrt();
        let f = ExpPoly::polynomial(coeffs);
        for z in points {
            prop_assert!(f.eval(z).norm() <= (z.norm_sqr() / 2.0).exp() * norm * (1.0 + 1e-12));
        }
    }
}

/// `sup_z |u(z)| e^{(|ψ(z)|² − |z|²)/2}` over `|z| ≤ 10` on a 0.01 grid,
/// polished by two finer local grids around the best node.
fn grid_bound(p: &OperatorParams) -> f64 {
    let log_value = |z: Complex64| p.weight(z).norm().ln() + (p.psi(z).norm_sqr() - z.norm_sqr()) / 2.0;
    let mut best = (f64::NEG_INFINITY, c(0.0, 0.0));
    for i in -1000..=1000 {
        for j in -1000..=1000 {
            let z = c(i as f64 * 0.01, j as f64 * 0.01);
            if z.norm() > 10.0 {
                continue;
            }
            let v = log_value(z);
            if v > best.0 {
                best = (v, z);
            }
        }
    }
    for step in [1e-4, 1e-6] {
        let center = best.1;
        for i in -100..=100 {
            for j in -100..=100 {
                let z = center + c(i as f64 * step, j as f64 * step);
                let v = log_value(z);
                if v > best.0 {
                    best = (v, z);
                }
            }
        }
    }
    best.0.exp()
}

#[test]
fn bound_constant_matches_grid_oracle() {
    let sets = [
        (c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
        (c(0.5, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)),
        (c(0.3, 0.4), c(0.2, -0.1), c(0.0, 0.5), c(0.8, 0.0)),
        (c(0.0, 0.7), c(-0.5, 0.5), c(0.4, 0.2), c(0.0, 1.3)),
        (c(0.0, 0.0), c(0.5, 0.0), c(0.4, 0.0), c(1.0, 0.0)),
    ];
    for (a, b, cc, u0) in sets {
        let p = OperatorParams::hilbert(a, b, cc, u0).unwrap();
        let closed = p.bound_constant();
        let oracle = grid_bound(&p);
        assert!((closed - oracle).abs() <= 1e-6 * closed, "{p:?}: {closed} vs {oracle}");
    }
    // |a| = 1 with the forced weight: the supremum is attained everywhere
    let p = OperatorParams::hilbert(c(1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)).unwrap();
    assert!((p.bound_constant() - 0.5f64.exp()).abs() < 1e-15);
    assert!((grid_bound(&p) - 0.5f64.exp()).abs() < 1e-12);
}

#[test]
fn translation_iterate_example() {
    let p = OperatorParams::hilbert(c(1.0, 0.0), c(2.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)).unwrap();
    let it = p.iterate_params(3);
    assert_eq!(it.a_n, c(1.0, 0.0));
    assert!((it.b_n - c(6.0, 0.0)).norm() < 1e-14);
    assert!((it.c_n - c(-6.0, 0.0)).norm() < 1e-14);
    assert!(rel(it.u0_n, c((-12.0f64).exp(), 0.0)) < 1e-14);
    // three-fold application to f ≡ 1 at ten points
    let one = ExpPoly::constant(c(1.0, 0.0));
    let g = p.apply(&p.apply(&p.apply(&one)));
    for k in 0..10 {
        let z = Complex64::from_polar(0.2 * k as f64, 0.7 * k as f64);
        let (weight, _) = brute_iterate(&p, 3, z);
        assert!(rel(g.eval(z), weight) < 1e-12);
        assert!(rel(it.as_params().weight(z), weight) < 1e-12);
    }
}
