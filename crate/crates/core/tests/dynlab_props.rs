//! Invariants of the numerical experiments on small truncations.

mod common;

use common::c;
use fockdyn_core::dynlab::{
    kreiss_functional_scan, max_power_norm, nagy_zemanek_sequence, projective_distance, random_targets,
    ritt_functional_scan, unconditional_ritt_estimate, ScanGrid, VerdictHint,
};
use fockdyn_core::linalg::build_matrix;
use fockdyn_core::symbol::OperatorParams;
use fockdyn_core::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn complex(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..radius, -PI..PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn vector(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(complex(2.0), len)
}

/// Compact operators whose fixed-point weight has modulus below one.
fn contractive() -> impl Strategy<Value = OperatorParams> {
    (0.2f64..0.8, -PI..PI, complex(0.5), complex(0.3), 0.3f64..0.9).prop_map(|(r, t, b, cc, u)| {
        OperatorParams::hilbert(Complex64::from_polar(r, t), b, cc, c(u, 0.0)).unwrap()
    })
}

fn small_grid() -> ScanGrid {
    ScanGrid::new(vec![0.01, 0.1, 1.0], (0..8).map(|k| -PI + PI * (k + 1) as f64 / 4.0).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projective_distance_is_scale_invariant(x in vector(6), y in vector(6), s in complex(5.0), t in complex(5.0)) {
        prop_assume!(s.norm() > 1e-3 && t.norm() > 1e-3);
        prop_assume!(x.iter().any(|z| z.norm() > 1e-3) && y.iter().any(|z| z.norm() > 1e-3));
        let d = projective_distance(&x, &y);
        let xs: Vec<Complex64> = x.iter().map(|z| z * s).collect();
        let yt: Vec<Complex64> = y.iter().map(|z| z * t).collect();
        prop_assert!((projective_distance(&xs, &yt) - d).abs() <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert!(projective_distance(&x, &xs) <= 1e-7);
    }

    #[test]
    fn random_targets_are_reproducible(seed in any::<u64>()) {
        prop_assert_eq!(random_targets(3, 8, seed), random_targets(3, 8, seed));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn unconditional_estimate_is_monotone_and_below_sum(p in contractive(), seed in any::<u64>()) {
        let est = unconditional_ritt_estimate(&p, 16, 12, 4, seed).unwrap();
        prop_assert!(est.by_length.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(est.estimate <= est.sum_of_norms * (1.0 + 1e-9), "{} > {}", est.estimate, est.sum_of_norms);
        prop_assert_eq!(est.estimate, *est.by_length.last().unwrap());
        let shorter = unconditional_ritt_estimate(&p, 16, 6, 4, seed).unwrap();
        prop_assert!(shorter.estimate <= est.estimate * (1.0 + 1e-12));
    }

    #[test]
    fn nagy_zemanek_respects_lower_bound(p in contractive()) {
        let nz = nagy_zemanek_sequence(&p, 32, 20).unwrap();
        prop_assert!(nz.respects_lower_bound(1e-6), "{:?} vs {:?}", nz.values, nz.lower_bounds);
        prop_assert!(!nz.is_growing());
    }

    #[test]
    fn kreiss_functional_is_below_power_bound(p in contractive()) {
        // (|λ| − 1)‖R(λ)‖ ≤ sup_n ‖Tⁿ‖ holds for every matrix
        let scan = kreiss_functional_scan(&p, 16, &small_grid()).unwrap();
        let bound = scan.power_bound.unwrap();
        prop_assert!(scan.supremum <= bound * (1.0 + 1e-6), "{} > {bound}", scan.supremum);
    }

    #[test]
    fn ritt_scan_on_grid_is_finite(p in contractive()) {
        let scan = ritt_functional_scan(&p, 16, &small_grid()).unwrap();
        prop_assert!(scan.supremum.is_finite() && scan.skipped.is_empty());
        prop_assert!(scan.points.iter().all(|pt| pt.value <= scan.supremum));
    }
}

#[test]
fn geometric_decay_of_differences() {
    // u ≡ 1, |a| < 1: ‖Tⁿ⁺¹ − Tⁿ‖ decays like |a|ⁿ
    for a in [c(0.5, 0.0), c(0.0, 0.6), c(-0.4, 0.3)] {
        let p = OperatorParams::hilbert(a, c(0.2, 0.1), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let nz = nagy_zemanek_sequence(&p, 64, 20).unwrap();
        let d = &nz.diff_norms;
        let slope = (d[15].ln() - d[5].ln()) / 10.0;
        let expected = a.norm().ln();
        assert!((slope - expected).abs() <= 0.1 * expected.abs(), "a={a}: slope {slope} vs {expected}");
    }
}

#[test]
fn rank_one_with_eigenvalue_minus_one_blows_up() {
    // T = −⟨·, e₀⟩e₀; at λ = −1 − 10⁻³ the functional is |λ − 1|/|λ + 1|
    let p = OperatorParams::hilbert(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)).unwrap();
    let grid = ScanGrid::new(vec![2.0 + 1e-3], vec![PI]).unwrap();
    let scan = ritt_functional_scan(&p, 32, &grid).unwrap();
    assert!(scan.supremum >= 2.0 * (1.0 - 1e-3) * 1000.0 * 0.99, "{}", scan.supremum);
}

#[test]
fn compact_ritt_example_is_stable() {
    let p = OperatorParams::hilbert(c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.9, 0.0)).unwrap();
    let scan = ritt_functional_scan(&p, 128, &ScanGrid::default_ritt()).unwrap();
    assert_eq!(scan.half_dim, 64);
    assert!(scan.stable, "{} vs {}", scan.supremum, scan.supremum_half);
    assert_eq!(scan.verdict_hint, VerdictHint::Bounded);
}

#[test]
fn power_norms_of_contractions_stay_bounded() {
    let p = OperatorParams::hilbert(c(0.5, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
    let t = build_matrix(&p, 32).unwrap().entries;
    let bound = max_power_norm(&t, 64).unwrap();
    assert!(bound.is_finite() && bound < 10.0, "{bound}");
}
