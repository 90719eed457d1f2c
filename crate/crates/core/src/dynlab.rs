//! Numerical experiments that cross-check the closed-form verdicts.
//!
//! Everything runs on the truncated matrix `T_N` from
//! [`crate::linalg::build_matrix`]. Grid points, trials and samples are
//! independent and are evaluated through [`crate::par::map`]; reductions
//! happen afterwards in input order, so results do not depend on the
//! thread count.

use num_complex::Complex64;
use serde::Serialize;

use crate::classify::{classify, ritt_verdict, ClassificationReport, SpectrumDescriptor};
use crate::linalg::{build_matrix, op_norm, vec_norm, CMatrix, ResolventSolver};
use crate::rng::SeededRng;
use crate::symbol::{ExpPoly, OperatorParams};
use crate::{par, Error, Result, EQ_TOL};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const PI: f64 = std::f64::consts::PI;

/// Points with `|λ| ≤ 1 + MIN_MODULUS_GAP` are never evaluated.
pub const MIN_MODULUS_GAP: f64 = 1e-9;
/// Relative change of the supremum between `N/2` and `N` still counted as
/// stable.
pub const STABILITY_TOL: f64 = 0.10;
/// Distance `η` from the unit circle for the boundary approach probe; the
/// probe compares `η` with `η/2`.
pub const BOUNDARY_ETA: f64 = 1e-3;
/// Growth ratio (sup at `η/2` over sup at `η`) above which a scan counts as
/// diverging. Bounded functionals give ≈ 1, eigenvalues on the circle ≈ 2.
pub const DIVERGENCE_RATIO: f64 = 1.5;
/// Largest power used for the Kreiss comparison `max_{n ≤ 64} ‖T_Nⁿ‖`.
pub const KREISS_POWER_MAX: usize = 64;
pub const PROBE_DISTANCE_THRESHOLD: f64 = 0.01;
pub const BOUNDARY_SAMPLES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ScanGrid {
    pub rho_values: Vec<f64>,
    pub theta_values: Vec<f64>,
}

impl ScanGrid {
    pub fn new(rho_values: Vec<f64>, theta_values: Vec<f64>) -> Result<Self> {
        if rho_values.is_empty() || theta_values.is_empty() {
            return Err(Error::InvalidGrid("rho_values and theta_values must be nonempty".into()));
        }
        if let Some(r) = rho_values.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::InvalidGrid(format!("rho must be positive, got {r}")));
        }
        if let Some(t) = theta_values.iter().find(|t| !(**t > -PI && **t <= PI)) {
            return Err(Error::InvalidGrid(format!("theta must lie in (-pi, pi], got {t}")));
        }
        let grid = Self {
            rho_values,
            theta_values,
        };
        if grid.ritt_points().is_empty() {
            return Err(Error::InvalidGrid("no grid point satisfies |lambda| > 1".into()));
        }
        Ok(grid)
    }

    /// 25 log-spaced `ρ ∈ [1e−4, 2]`, 64 uniform `θ ∈ (−π, π]`.
    pub fn default_ritt() -> Self {
        let (lo, hi) = (1e-4f64.log10(), 2f64.log10());
        let rho = (0..25).map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / 24.0)).collect();
        Self {
            rho_values: rho,
            theta_values: uniform_angles(64),
        }
    }

    pub fn min_rho(&self) -> f64 {
        self.rho_values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `λ = 1 + ρe^{iθ}` with `|λ| > 1`.
    pub fn ritt_points(&self) -> Vec<Complex64> {
        self.points(|rho, theta| ONE + Complex64::from_polar(rho, theta))
    }

    /// `λ = (1 + ρ)e^{iθ}`.
    pub fn kreiss_points(&self) -> Vec<Complex64> {
        self.points(|rho, theta| Complex64::from_polar(1.0 + rho, theta))
    }

    fn points(&self, f: impl Fn(f64, f64) -> Complex64) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rho_values.len() * self.theta_values.len());
        for &rho in &self.rho_values {
            for &theta in &self.theta_values {
                let lam = f(rho, theta);
                if lam.norm() > 1.0 + MIN_MODULUS_GAP {
                    out.push(lam);
                }
            }
        }
        out
    }
}

/// `k` equispaced angles `−π + 2π(i+1)/k`, `i < k`, in `(−π, π]`.
pub fn uniform_angles(k: usize) -> Vec<f64> {
    (0..k).map(|i| -PI + 2.0 * PI * (i + 1) as f64 / k as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum ScanKind {
    Ritt,
    Kreiss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictHint {
    Bounded,
    Diverging,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub lambda: Complex64,
    pub value: f64,
}

/// Approach to the unit circle along rays `λ = ζ(1 + η)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryProbe {
    pub eta: f64,
    pub directions: usize,
    pub sup_at_eta: f64,
    pub sup_at_half_eta: f64,
    #[serde(serialize_with = "crate::fmt::f64_or_tag")]
    pub growth_ratio: f64,
    pub argmax: Complex64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub kind: ScanKind,
    pub n_dim: usize,
    pub points: Vec<ScanPoint>,
    /// Points where `λI − T_N` was numerically singular.
    pub skipped: Vec<Complex64>,
    pub supremum: f64,
    pub argmax: Complex64,
    pub half_dim: usize,
    pub supremum_half: f64,
    pub stable: bool,
    pub boundary: Option<BoundaryProbe>,
    /// `max_{n ≤ 64} ‖T_Nⁿ‖`, for Kreiss scans.
    pub power_bound: Option<f64>,
    pub verdict_hint: VerdictHint,
}

impl ScanResult {
    /// Columns `lambda_re,lambda_im,functional,n_dim`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("lambda_re,lambda_im,functional,n_dim\n");
        for p in &self.points {
            s.push_str(&format!(
                "{},{},{},{}\n",
                crate::fmt::g17(p.lambda.re),
                crate::fmt::g17(p.lambda.im),
                crate::fmt::g17(p.value),
                self.n_dim
            ));
        }
        s
    }
}

fn require_bounded(p: &OperatorParams) -> Result<ClassificationReport> {
    let report = classify(p);
    if report.bounded {
        Ok(report)
    } else {
        Err(Error::Unbounded(report.boundedness_reason))
    }
}

/// Evaluates `weight(λ)·‖R(λ, T)‖` at each point; singular points are
/// returned separately.
fn evaluate(
    solver: &ResolventSolver,
    lambdas: &[Complex64],
    weight: impl Fn(Complex64) -> f64 + Sync + Send,
) -> Result<(Vec<ScanPoint>, Vec<Complex64>)> {
    let raw = par::map(lambdas, |&lam| match solver.norm(lam) {
        Ok(r) => Ok(Some(ScanPoint {
            lambda: lam,
            value: weight(lam) * r,
        })),
        Err(Error::SingularResolvent(_)) => Ok(None),
        Err(e) => Err(e),
    });
    let mut points = Vec::with_capacity(lambdas.len());
    let mut skipped = Vec::new();
    for (lam, r) in lambdas.iter().zip(raw) {
        match r? {
            Some(pt) => points.push(pt),
            None => skipped.push(*lam),
        }
    }
    Ok((points, skipped))
}

fn sup(points: &[ScanPoint]) -> (f64, Complex64) {
    points
        .iter()
        .fold((0.0, Complex64::new(f64::NAN, f64::NAN)), |best, p| {
            if p.value > best.0 {
                (p.value, p.lambda)
            } else {
                best
            }
        })
}

fn half_dim(n_dim: usize) -> usize {
    (n_dim / 2).max(1)
}

fn ritt_weight(lam: Complex64) -> f64 {
    (lam - ONE).norm()
}

fn kreiss_weight(lam: Complex64) -> f64 {
    lam.norm() - 1.0
}

/// Base points for the boundary probe: unit vectors at the grid angles plus
/// the closed-form spectral points of modulus ≥ 1.
fn probe_directions(grid: &ScanGrid, spectrum: Option<&SpectrumDescriptor>) -> Vec<Complex64> {
    let mut dirs: Vec<Complex64> = grid.theta_values.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    if let Some(s) = spectrum {
        for z in s.sample_points(1.0 - 1e-9, 720) {
            if z.norm() >= 1.0 - 1e-9 {
                dirs.push(z);
            }
        }
    }
    dirs
}

fn boundary_probe(t: &ResolventSolver, dirs: &[Complex64], weight: fn(Complex64) -> f64) -> Result<(BoundaryProbe, usize)> {
    let at = |eta: f64| -> Vec<Complex64> { dirs.iter().map(|d| d * (1.0 + eta)).collect() };
    let (near, skipped_near) = evaluate(t, &at(BOUNDARY_ETA), weight)?;
    let (nearer, skipped_nearer) = evaluate(t, &at(BOUNDARY_ETA / 2.0), weight)?;
    let (s1, _) = sup(&near);
    let (s2, arg) = sup(&nearer);
    Ok((
        BoundaryProbe {
            eta: BOUNDARY_ETA,
            directions: dirs.len(),
            sup_at_eta: s1,
            sup_at_half_eta: s2,
            growth_ratio: s2 / s1,
            argmax: arg,
        },
        skipped_near.len() + skipped_nearer.len(),
    ))
}

fn relative_change(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// `|λ − 1| · ‖R(λ, T_N)‖` over `λ = 1 + ρe^{iθ}`, at `N` and `N/2`, plus a
/// boundary approach probe at `N`.
///
/// The hint is [`VerdictHint::Diverging`] when the truncation has spectrum
/// outside the closed disc (singular points), when the supremum moves by
/// more than [`STABILITY_TOL`] between `N/2` and `N`, or when halving the
/// distance to the circle multiplies the boundary supremum by at least
/// [`DIVERGENCE_RATIO`].
pub fn ritt_functional_scan(p: &OperatorParams, n_dim: usize, grid: &ScanGrid) -> Result<ScanResult> {
    let report = require_bounded(p)?;
    let t = ResolventSolver::new(&build_matrix(p, n_dim)?.entries);
    let half = half_dim(n_dim);
    let t_half = ResolventSolver::new(&build_matrix(p, half)?.entries);
    let lambdas = grid.ritt_points();
    let (points, skipped) = evaluate(&t, &lambdas, ritt_weight)?;
    let (half_points, _) = evaluate(&t_half, &lambdas, ritt_weight)?;
    let (supremum, argmax) = sup(&points);
    let (supremum_half, _) = sup(&half_points);
    let stable = relative_change(supremum, supremum_half) < STABILITY_TOL;
    let dirs = probe_directions(grid, report.spectrum.as_ref());
    let (boundary, probe_skipped) = boundary_probe(&t, &dirs, ritt_weight)?;
    let diverging =
        !skipped.is_empty() || probe_skipped > 0 || !stable || boundary.growth_ratio >= DIVERGENCE_RATIO;
    Ok(ScanResult {
        kind: ScanKind::Ritt,
        n_dim,
        points,
        skipped,
        supremum,
        argmax,
        half_dim: half,
        supremum_half,
        stable,
        boundary: Some(boundary),
        power_bound: None,
        verdict_hint: if diverging { VerdictHint::Diverging } else { VerdictHint::Bounded },
    })
}

/// `max_{0 ≤ n ≤ max_power} ‖Tⁿ‖`.
pub fn max_power_norm(t: &CMatrix, max_power: usize) -> Result<f64> {
    let powers = t.powers(max_power);
    let norms = par::map(&powers, op_norm);
    norms.into_iter().try_fold(0.0f64, |acc, n| Ok(acc.max(n?)))
}

/// `(|λ| − 1) · ‖R(λ, T_N)‖` over `λ = (1 + ρ)e^{iθ}`. Requires a power
/// bounded operator; [`ScanResult::power_bound`] carries
/// `max_{n ≤ 64} ‖T_Nⁿ‖`.
pub fn kreiss_functional_scan(p: &OperatorParams, n_dim: usize, grid: &ScanGrid) -> Result<ScanResult> {
    let report = require_bounded(p)?;
    if !report.power_bounded {
        return Err(Error::InvalidParams("Kreiss scan needs a power bounded operator".into()));
    }
    let matrix = build_matrix(p, n_dim)?.entries;
    let t = ResolventSolver::new(&matrix);
    let half = half_dim(n_dim);
    let t_half = ResolventSolver::new(&build_matrix(p, half)?.entries);
    let lambdas = grid.kreiss_points();
    let (points, skipped) = evaluate(&t, &lambdas, kreiss_weight)?;
    let (half_points, _) = evaluate(&t_half, &lambdas, kreiss_weight)?;
    let (supremum, argmax) = sup(&points);
    let (supremum_half, _) = sup(&half_points);
    let stable = relative_change(supremum, supremum_half) < STABILITY_TOL;
    let power_bound = max_power_norm(&matrix, KREISS_POWER_MAX)?;
    let diverging = !skipped.is_empty() || !stable;
    Ok(ScanResult {
        kind: ScanKind::Kreiss,
        n_dim,
        points,
        skipped,
        supremum,
        argmax,
        half_dim: half,
        supremum_half,
        stable,
        boundary: None,
        power_bound: Some(power_bound),
        verdict_hint: if diverging { VerdictHint::Diverging } else { VerdictHint::Bounded },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NzSequence {
    pub n_dim: usize,
    /// `(n, n · ‖T^{n+1} − Tⁿ‖)`, `n = 1..=n_max`.
    pub values: Vec<(u32, f64)>,
    /// `‖T^{n+1} − Tⁿ‖`.
    pub diff_norms: Vec<f64>,
    /// `n · |u(z₀)|ⁿ · |u(z₀) − 1|`, when `a ≠ 1`.
    pub lower_bounds: Option<Vec<f64>>,
    /// Max over the second half divided by max over the first half.
    #[serde(serialize_with = "crate::fmt::f64_or_tag")]
    pub growth: f64,
}

impl NzSequence {
    /// Whether every value respects the lower bound within relative `slack`.
    pub fn respects_lower_bound(&self, slack: f64) -> bool {
        match &self.lower_bounds {
            None => true,
            Some(lb) => self.values.iter().zip(lb).all(|((_, v), l)| *v >= l * (1.0 - slack)),
        }
    }

    pub fn is_growing(&self) -> bool {
        self.growth >= DIVERGENCE_RATIO
    }
}

/// `n · ‖T_N^{n+1} − T_Nⁿ‖` for `n = 1..=n_max`, paired with the lower bound
/// `n · |u(z₀)|ⁿ · |u(z₀) − 1|` when `a ≠ 1`.
pub fn nagy_zemanek_sequence(p: &OperatorParams, n_dim: usize, n_max: u32) -> Result<NzSequence> {
    require_bounded(p)?;
    let t = build_matrix(p, n_dim)?.entries;
    let powers = t.powers(n_max as usize + 1);
    let idx: Vec<usize> = (1..=n_max as usize).collect();
    let diff_norms = par::map(&idx, |&n| op_norm(&powers[n + 1].sub(&powers[n])))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let values: Vec<(u32, f64)> = idx.iter().zip(&diff_norms).map(|(&n, d)| (n as u32, n as f64 * d)).collect();
    let lower_bounds = p.weight_at_fixed_point().ok().map(|uz0| {
        idx.iter()
            .map(|&n| n as f64 * uz0.norm().powi(n as i32) * (uz0 - ONE).norm())
            .collect()
    });
    let growth = growth_ratio(&values.iter().map(|v| v.1).collect::<Vec<_>>());
    Ok(NzSequence {
        n_dim,
        values,
        diff_norms,
        lower_bounds,
        growth,
    })
}

fn growth_ratio(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 1.0;
    }
    let mid = v.len() / 2;
    let first = v[..mid].iter().copied().fold(0.0, f64::max);
    let second = v[mid..].iter().copied().fold(0.0, f64::max);
    if first == 0.0 {
        if second == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        second / first
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UncondEstimate {
    pub n_dim: usize,
    pub n_terms: usize,
    pub trials: usize,
    /// `max_trial max_{L ≤ n_terms} ‖Σ_{n ≤ L} aₙ (Tⁿ − Tⁿ⁻¹)‖`.
    pub estimate: f64,
    /// Running maximum over prefix length `L = 1..=n_terms`.
    pub by_length: Vec<f64>,
    /// `Σ_{n ≤ n_terms} ‖Tⁿ − Tⁿ⁻¹‖`, the triangle-inequality bound.
    pub sum_of_norms: f64,
}

fn sign_sequence(trial: usize, n_terms: usize, seed: u64) -> Vec<f64> {
    match trial {
        0 => vec![1.0; n_terms],
        1 => (1..=n_terms).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect(),
        _ => {
            let mut rng = SeededRng::stream(seed, trial as u64);
            (0..n_terms).map(|_| rng.sign()).collect()
        }
    }
}

/// Lower estimate of the unconditional Ritt constant from signed sums
/// `Σ aₙ(Tⁿ − Tⁿ⁻¹)` with `aₙ = ±1`. Trial 0 uses all `+1` (the telescoping
/// sum), trial 1 alternating signs `(−1)ⁿ`, the rest seeded random signs.
/// Every prefix of every trial is a valid finite sequence, so the estimate
/// is the maximum over prefixes too and is nondecreasing in `n_terms`.
pub fn unconditional_ritt_estimate(p: &OperatorParams, n_dim: usize, n_terms: usize, trials: usize, seed: u64) -> Result<UncondEstimate> {
    require_bounded(p)?;
    let t = build_matrix(p, n_dim)?.entries;
    let powers = t.powers(n_terms);
    let diffs: Vec<CMatrix> = (1..=n_terms).map(|n| powers[n].sub(&powers[n - 1])).collect();
    let diff_norms = par::map(&diffs, op_norm).into_iter().collect::<Result<Vec<f64>>>()?;
    let trial_ids: Vec<usize> = (0..trials.max(1)).collect();
    let per_trial = par::map(&trial_ids, |&trial| -> Result<Vec<f64>> {
        let signs = sign_sequence(trial, n_terms, seed);
        let mut acc = CMatrix::zeros(n_dim);
        let mut norms = Vec::with_capacity(n_terms);
        for (s, d) in signs.iter().zip(&diffs) {
            acc.add_scaled(Complex64::from(*s), d);
            norms.push(op_norm(&acc)?);
        }
        Ok(norms)
    });
    let mut by_length = vec![0.0f64; n_terms];
    for norms in per_trial {
        for (slot, v) in by_length.iter_mut().zip(norms?) {
            *slot = slot.max(v);
        }
    }
    for l in 1..n_terms {
        by_length[l] = by_length[l].max(by_length[l - 1]);
    }
    Ok(UncondEstimate {
        n_dim,
        n_terms,
        trials: trial_ids.len(),
        estimate: by_length.last().copied().unwrap_or(0.0),
        by_length,
        sum_of_norms: diff_norms.iter().sum(),
    })
}

/// `count` polynomials of degree `degree` with independent standard complex
/// normal coefficients in the orthonormal basis; target `i` draws from
/// stream `i` of `seed`.
pub fn random_targets(count: usize, degree: usize, seed: u64) -> Vec<ExpPoly> {
    (0..count)
        .map(|i| {
            let mut rng = SeededRng::stream(seed, i as u64);
            random_polynomial(&mut rng, degree).0
        })
        .collect()
}

/// Polynomial with standard complex normal coefficients in the basis `e_m`,
/// `m ≤ degree`, together with its exact norm.
fn random_polynomial(rng: &mut SeededRng, degree: usize) -> (ExpPoly, f64) {
    let basis: Vec<Complex64> = (0..=degree).map(|_| rng.complex_normal()).collect();
    let coeffs = basis
        .iter()
        .enumerate()
        .map(|(m, g)| g * (-0.5 * crate::special::ln_factorial(m)).exp())
        .collect();
    (ExpPoly::polynomial(coeffs), vec_norm(&basis))
}

/// `√(1 − |⟨x, y⟩|² / (‖x‖²‖y‖²))`, the sine of the angle between the lines
/// spanned by `x` and `y`.
pub fn projective_distance(x: &[Complex64], y: &[Complex64]) -> f64 {
    let inner: Complex64 = x.iter().zip(y).map(|(a, b)| a * b.conj()).sum();
    let nx = x.iter().map(|v| v.norm_sqr()).sum::<f64>();
    let ny = y.iter().map(|v| v.norm_sqr()).sum::<f64>();
    if nx == 0.0 || ny == 0.0 {
        return 1.0;
    }
    (1.0 - inner.norm_sqr() / (nx * ny)).clamp(0.0, 1.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    /// Minimum over targets of the per-target minimum over the orbit.
    pub min_projective_distance: f64,
    pub per_target: Vec<f64>,
    /// `max_n |rₙ|`; `None` when the ratio part was skipped.
    pub ratio_max: Option<f64>,
    pub ratio_bound_c: Option<f64>,
    /// `ratio_bound_c` widened by the boundary sampling error.
    pub ratio_bound_c_slack: Option<f64>,
    pub ratio_violations: usize,
    pub ratio_skipped_reason: Option<String>,
    pub n_max: u32,
    pub targets_tested: usize,
    pub threshold: f64,
    pub threshold_met: bool,
}

impl ProbeResult {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(crate::fmt::g17).unwrap_or_default();
        format!(
            "min_projective_distance,ratio_max,ratio_bound_C,n_max,targets_tested\n{},{},{},{},{}\n",
            crate::fmt::g17(self.min_projective_distance),
            opt(self.ratio_max),
            opt(self.ratio_bound_c),
            self.n_max,
            self.targets_tested
        )
    }
}

/// Max and min of `|g|` over the circle `|z − center| = 1`.
fn boundary_extrema(center: Complex64, g: impl Fn(Complex64) -> Complex64) -> (f64, f64) {
    (0..BOUNDARY_SAMPLES).fold((0.0f64, f64::INFINITY), |(hi, lo), k| {
        let t = 2.0 * PI * k as f64 / BOUNDARY_SAMPLES as f64;
        let v = g(center + Complex64::from_polar(1.0, t)).norm();
        (hi.max(v), lo.min(v))
    })
}

/// Evidence against supercyclicity.
///
/// Distance part: projective distance from each `Wⁿf`, `0 ≤ n ≤ n_max`, to
/// each target, using `N` basis coefficients. Ratio part (needs `a ≠ 1` and a
/// zero-free `f`): `rₙ = u(z) f(ψⁿz) / (u(ψⁿz) f(ψⁿ⁺¹z))` at `z = z₀ + 1`
/// against `C = max|u|·max|f| / (min|u|·min|f|)` over the disc of radius 1
/// about `z₀`, with extrema sampled on its boundary. A dense projective orbit
/// would force `{rₙ}` to be dense in ℂ; it stays below `C`.
pub fn supercyclic_probe(p: &OperatorParams, f: &ExpPoly, targets: &[ExpPoly], n_max: u32, n_dim: usize) -> Result<ProbeResult> {
    require_bounded(p)?;
    let target_coeffs: Vec<Vec<Complex64>> = targets.iter().map(|g| g.basis_coeffs(n_dim)).collect();
    let mut per_target = vec![1.0f64; targets.len()];
    let mut orbit = f.clone();
    for n in 0..=n_max {
        if n > 0 {
            orbit = p.apply(&orbit);
        }
        let coeffs = orbit.basis_coeffs(n_dim);
        // rescale: distances are projective and the orbit may grow or decay
        let scale = vec_norm(&coeffs);
        if scale > 0.0 && scale.is_finite() {
            orbit = orbit.scaled(Complex64::from(1.0 / scale));
        }
        for (d, g) in per_target.iter_mut().zip(&target_coeffs) {
            *d = d.min(projective_distance(&coeffs, g));
        }
    }
    let min_projective_distance = per_target.iter().copied().fold(1.0, f64::min);

    let mut ratio_max = None;
    let mut ratio_bound_c = None;
    let mut ratio_bound_c_slack = None;
    let mut ratio_violations = 0;
    let mut ratio_skipped_reason = None;
    if p.a_is_one() {
        ratio_skipped_reason = Some("a = 1: no finite fixed point".to_string());
    } else if !f.is_zero_free() {
        ratio_skipped_reason = Some("f has zeros".to_string());
    } else {
        let z0 = p.fixed_point()?;
        let (u_hi, u_lo) = boundary_extrema(z0, |z| p.weight(z));
        let (f_hi, f_lo) = boundary_extrema(z0, |z| f.eval(z));
        let bound = u_hi * f_hi / (u_lo * f_lo);
        // log|u| and log|f| are harmonic with gradients |c| and |α|; sampling
        // misses each extremum by at most gradient · π/S in log scale
        let slack = (2.0 * (p.c().norm() + f.alpha.norm()) * PI / BOUNDARY_SAMPLES as f64).exp();
        let z = z0 + ONE;
        let mut w = z;
        let mut hi = 0.0f64;
        for _ in 0..=n_max {
            let w_next = p.psi(w);
            let r = (p.weight(z) * f.eval(w) / (p.weight(w) * f.eval(w_next))).norm();
            hi = hi.max(r);
            if r > bound * slack {
                ratio_violations += 1;
            }
            w = w_next;
        }
        ratio_max = Some(hi);
        ratio_bound_c = Some(bound);
        ratio_bound_c_slack = Some(bound * slack);
    }
    Ok(ProbeResult {
        min_projective_distance,
        per_target,
        ratio_max,
        ratio_bound_c,
        ratio_bound_c_slack,
        ratio_violations,
        ratio_skipped_reason,
        n_max,
        targets_tested: targets.len(),
        threshold: PROBE_DISTANCE_THRESHOLD,
        threshold_met: min_projective_distance >= PROBE_DISTANCE_THRESHOLD,
    })
}

/// Whether `p` is `W_(k_{−b}, z + b)`: `a = 1`, `c = −conj(b)`,
/// `u₀ = e^{−|b|²/2}`.
pub fn is_normalized_translation(p: &OperatorParams) -> bool {
    p.a_is_one()
        && (p.c() + p.b().conj()).norm() <= EQ_TOL
        && (p.u0() - Complex64::from((-p.b().norm_sqr() / 2.0).exp())).norm() <= EQ_TOL
}

/// `‖(T_N* T_N − I)_{K×K}‖` for the normalized translation family.
pub fn isometry_check(p: &OperatorParams, n_dim: usize, k: usize) -> Result<f64> {
    if !is_normalized_translation(p) {
        return Err(Error::WrongFamily(
            "need a = 1, c = -conj(b), u0 = exp(-|b|^2/2)".into(),
        ));
    }
    if k >= n_dim {
        return Err(Error::InvalidDimension(k));
    }
    let t = build_matrix(p, n_dim)?.entries;
    let gram = t.adjoint().matmul(&t);
    let block = gram.leading_block(k).sub(&CMatrix::identity(k));
    op_norm(&block)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityViolation {
    pub sample: usize,
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StolzCheck {
    pub m_hat: f64,
    pub disc_radius: f64,
    pub points_checked: usize,
    pub violations: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub samples: usize,
    pub violations: Vec<InequalityViolation>,
    pub stolz: Option<StolzCheck>,
}

impl InequalityReport {
    /// No violation of the point estimate or the derivative bound. The Stolz
    /// check is reported separately: `M̂` is only a lower bound for the Ritt
    /// constant, so a miss there is a flag rather than a contradiction.
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

impl StolzCheck {
    pub fn contained(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Membership in the closed convex hull of `{1}` and the disc `|z| ≤ r`
/// (`0 ≤ r < 1`): the disc itself, or the part of the cone with apex 1 and
/// half-angle `arcsin r` that lies right of the tangent chord `Re z = r²`.
pub fn in_stolz_domain(s: Complex64, r: f64, tol: f64) -> bool {
    if s.norm() <= r + tol {
        return true;
    }
    let d = ONE - s;
    if d.norm() <= tol {
        return true;
    }
    if s.re > 1.0 + tol || s.re < r * r - tol {
        return false;
    }
    let half_angle = r.clamp(0.0, 1.0).asin();
    d.im.abs().atan2(d.re) <= half_angle + tol
}

/// Point estimate `|f(z)| ≤ e^{|z|²/2}‖f‖`, derivative bound
/// `|f′(w)| ≤ (√(2π) + 1)(1 + |w|)e^{|w|²/2}‖f‖` on seeded random polynomials
/// of degree ≤ 8 at random `z, w` with modulus ≤ 3 and, when a Ritt scan
/// supremum `M̂` is supplied and the Ritt verdict is Yes, containment of the
/// closed-form spectrum in the Stolz domain with `sin θ = √(1 − 1/M̂²)`.
pub fn inequality_suite(p: &OperatorParams, sample_count: usize, seed: u64, m_hat: Option<f64>) -> InequalityReport {
    let ids: Vec<usize> = (0..sample_count).collect();
    let per_sample = par::map(&ids, |&i| {
        let mut rng = SeededRng::stream(seed, i as u64);
        let degree = (rng.uniform() * 9.0) as usize;
        // coefficients in the orthonormal basis, so ‖f‖ is exact
        let (f, norm) = random_polynomial(&mut rng, degree);
        let z = rng.in_disc(3.0);
        let w = rng.in_disc(3.0);
        let mut out = Vec::new();
        let lhs = f.eval(z).norm();
        let rhs = (z.norm_sqr() / 2.0).exp() * norm;
        if lhs > rhs * (1.0 + 1e-12) {
            out.push(InequalityViolation {
                sample: i,
                check: "point_estimate".into(),
                lhs,
                rhs,
            });
        }
        let lhs = f.derivative().eval(w).norm();
        let rhs = ((2.0 * PI).sqrt() + 1.0) * (1.0 + w.norm()) * (w.norm_sqr() / 2.0).exp() * norm;
        if lhs > rhs * (1.0 + 1e-12) {
            out.push(InequalityViolation {
                sample: i,
                check: "derivative_bound".into(),
                lhs,
                rhs,
            });
        }
        out
    });
    let violations = per_sample.into_iter().flatten().collect();
    let stolz = m_hat.and_then(|m| {
        let report = classify(p);
        let spectrum = report.spectrum?;
        if !ritt_verdict(p).ok()?.is_yes() {
            return None;
        }
        let m = m.max(1.0);
        let r = (1.0 - 1.0 / (m * m)).max(0.0).sqrt();
        let pts = spectrum.sample_points(1e-12, 720);
        let violations = pts.iter().copied().filter(|s| !in_stolz_domain(*s, r, 1e-9)).collect();
        Some(StolzCheck {
            m_hat: m,
            disc_radius: r,
            points_checked: pts.len(),
            violations,
        })
    });
    InequalityReport {
        samples: sample_count,
        violations,
        stolz,
    }
}
