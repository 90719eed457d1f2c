//! Closed-form classification of `W_(u,ψ)`.
//!
//! Every verdict carries the rule it came from. The rules, for
//! `ψ(z) = az + b`, `u(z) = u₀e^{cz}`, `z₀ = b/(1 − a)`:
//!
//! - bounded iff `|a| < 1`, or `|a| = 1` and `c = −a·conj(b)`;
//! - compact iff `|a| < 1`;
//! - power bounded iff bounded and `ρ ≤ 1`, where `ρ = |u(z₀)|` (`a ≠ 1`) or
//!   `ρ = |u₀|e^{|b|²/2}` (`a = 1`); the two agree when `|a| = 1`;
//! - never supercyclic;
//! - Ritt: see [`ritt_verdict`].

use num_complex::Complex64;
use serde::Serialize;

use crate::symbol::OperatorParams;
use crate::{approx_eq, Error, Result, EQ_TOL};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest root-of-unity order tried by [`spectrum_closed_form`].
pub const MAX_ROOT_ORDER: u32 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictValue {
    Yes,
    No,
    OpenConjecture,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub value: VerdictValue,
    pub reason: String,
}

impl Verdict {
    fn yes(reason: impl Into<String>) -> Self {
        Self {
            value: VerdictValue::Yes,
            reason: reason.into(),
        }
    }
    fn no(reason: impl Into<String>) -> Self {
        Self {
            value: VerdictValue::No,
            reason: reason.into(),
        }
    }
    fn open(reason: impl Into<String>) -> Self {
        Self {
            value: VerdictValue::OpenConjecture,
            reason: reason.into(),
        }
    }

    pub fn is_yes(&self) -> bool {
        self.value == VerdictValue::Yes
    }
    pub fn is_no(&self) -> bool {
        self.value == VerdictValue::No
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SpectrumKind {
    GeometricWithZero,
    FinitePoints,
    FullCircle,
    Singleton,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumDescriptor {
    pub kind: SpectrumKind,
    /// `u(z₀)`, or `u₀` when `a = 1`.
    pub base: Complex64,
    /// `a`.
    pub ratio: Complex64,
    /// Circle radius for [`SpectrumKind::FullCircle`], else `|base|`.
    pub radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Complex64>>,
}

impl SpectrumDescriptor {
    /// `{0} ∪ {base·ratioᵐ : m ≥ 0}`, lazily. Only meaningful for
    /// [`SpectrumKind::GeometricWithZero`].
    pub fn geometric_points(&self) -> impl Iterator<Item = Complex64> + '_ {
        std::iter::once(Complex64::new(0.0, 0.0))
            .chain((0u32..).map(move |m| self.base * self.ratio.powu(m)))
    }

    /// Finite sample of the spectrum: all points for the finite kinds, the
    /// geometric sequence down to modulus `floor` (at most 10 000 terms), or
    /// `circle_samples` equispaced points of a circle.
    pub fn sample_points(&self, floor: f64, circle_samples: usize) -> Vec<Complex64> {
        match self.kind {
            SpectrumKind::Singleton => vec![self.base],
            SpectrumKind::FinitePoints => self.points.clone().unwrap_or_default(),
            SpectrumKind::FullCircle => (0..circle_samples)
                .map(|k| {
                    let t = 2.0 * std::f64::consts::PI * k as f64 / circle_samples as f64;
                    Complex64::from_polar(self.radius, t)
                })
                .collect(),
            SpectrumKind::GeometricWithZero => {
                let mut pts = vec![Complex64::new(0.0, 0.0)];
                for (m, z) in self.geometric_points().skip(1).enumerate() {
                    if m >= 10_000 || z.norm() < floor {
                        break;
                    }
                    pts.push(z);
                }
                pts
            }
        }
    }

    /// Largest modulus in the spectrum.
    pub fn spectral_radius(&self) -> f64 {
        match self.kind {
            SpectrumKind::FullCircle => self.radius,
            _ => self.base.norm(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub bounded: bool,
    pub compact: bool,
    pub power_bounded: bool,
    pub supercyclic: bool,
    pub ritt: Verdict,
    pub unconditional_ritt: Verdict,
    /// `None` when unbounded.
    pub spectrum: Option<SpectrumDescriptor>,
    #[serde(serialize_with = "crate::fmt::f64_or_tag")]
    pub m_constant: f64,
    #[serde(serialize_with = "crate::fmt::f64_or_tag")]
    pub norm_upper: f64,
    /// `ρ` from the module docs, when bounded.
    pub spectral_radius: Option<f64>,
    /// `1 − ρ`; near-zero values flag cases decided by a floating comparison.
    pub margin: Option<f64>,
    pub boundedness_reason: String,
}

/// `ρ`: `|u(z₀)|` for `a ≠ 1`, `|u₀|e^{|b|²/2}` for `a = 1`.
fn growth_modulus(p: &OperatorParams) -> f64 {
    if p.a_is_one() {
        p.u0().norm() * (p.b().norm_sqr() / 2.0).exp()
    } else {
        p.weight_at_fixed_point().expect("a != 1").norm()
    }
}

fn boundedness(p: &OperatorParams) -> (bool, String) {
    if p.a_inside_disc() {
        (true, "|a| < 1".into())
    } else if p.a_on_circle() {
        if p.has_forced_weight() {
            (true, "|a| = 1 and u = u(0)·K_{-conj(a)b}, i.e. c = -a·conj(b)".into())
        } else {
            (
                false,
                "|a| = 1 forces the weight u(0)·K_{-conj(a)b} (c = -a·conj(b)); this weight differs, so M(u,ψ) = ∞"
                    .into(),
            )
        }
    } else {
        (false, "|a| > 1: M(u,ψ) = ∞".into())
    }
}

pub fn classify(p: &OperatorParams) -> ClassificationReport {
    let (bounded, boundedness_reason) = boundedness(p);
    let m_constant = p.bound_constant();
    let norm_upper = if bounded {
        p.a().norm().powf(-2.0 / p.p()) * m_constant
    } else {
        f64::INFINITY
    };
    if !bounded {
        let why = format!("operator is unbounded: {boundedness_reason}");
        return ClassificationReport {
            bounded,
            compact: false,
            power_bounded: false,
            supercyclic: false,
            ritt: Verdict::no(why.clone()),
            unconditional_ritt: Verdict::no(why),
            spectrum: None,
            m_constant,
            norm_upper,
            spectral_radius: None,
            margin: None,
            boundedness_reason,
        };
    }
    let rho = growth_modulus(p);
    ClassificationReport {
        bounded,
        compact: p.a_inside_disc(),
        power_bounded: rho <= 1.0,
        supercyclic: false,
        ritt: ritt_verdict(p).expect("bounded"),
        unconditional_ritt: unconditional_ritt_verdict(p).expect("bounded"),
        spectrum: Some(spectrum_closed_form(p).expect("bounded")),
        m_constant,
        norm_upper,
        spectral_radius: Some(rho),
        margin: Some(1.0 - rho),
        boundedness_reason,
    }
}

fn require_bounded(p: &OperatorParams) -> Result<()> {
    match boundedness(p) {
        (true, _) => Ok(()),
        (false, why) => Err(Error::Unbounded(why)),
    }
}

/// Smallest `q ≤ MAX_ROOT_ORDER` with `|a^q − 1| < 1e−12`.
pub fn root_of_unity_order(a: Complex64) -> Option<u32> {
    let mut power = ONE;
    for q in 1..=MAX_ROOT_ORDER {
        power *= a;
        if (power - ONE).norm() < EQ_TOL {
            return Some(q);
        }
    }
    None
}

pub fn spectrum_closed_form(p: &OperatorParams) -> Result<SpectrumDescriptor> {
    require_bounded(p)?;
    let a = p.a();
    if p.a_is_one() {
        let base = p.u0();
        return Ok(if p.b_is_zero() {
            SpectrumDescriptor {
                kind: SpectrumKind::Singleton,
                base,
                ratio: a,
                radius: base.norm(),
                points: Some(vec![base]),
            }
        } else {
            SpectrumDescriptor {
                kind: SpectrumKind::FullCircle,
                base,
                ratio: a,
                radius: growth_modulus(p),
                points: None,
            }
        });
    }
    let base = p.weight_at_fixed_point()?;
    if p.a_inside_disc() {
        return Ok(SpectrumDescriptor {
            kind: SpectrumKind::GeometricWithZero,
            base,
            ratio: a,
            radius: base.norm(),
            points: None,
        });
    }
    Ok(match root_of_unity_order(a) {
        Some(q) => SpectrumDescriptor {
            kind: SpectrumKind::FinitePoints,
            base,
            ratio: a,
            radius: base.norm(),
            points: Some((0..q).map(|m| base * a.powu(m)).collect()),
        },
        None => SpectrumDescriptor {
            kind: SpectrumKind::FullCircle,
            base,
            ratio: a,
            radius: base.norm(),
            points: None,
        },
    })
}

/// Ritt resolvent condition `‖R(λ,W)‖ ≤ M/|λ − 1|` for `|λ| > 1`.
///
/// `|a| = 1`: Yes iff `a = 1, b = 0` with `|u₀| < 1` or `u₀ = 1`, or
/// `b ≠ 0` / `a ≠ 1` with `|u₀| < e^{−|b|²/2}`.
///
/// `|a| < 1`, with `ρ = |u(z₀)|`: `u(z₀) = 1` is Yes for composition
/// operators and for `a = 0`, and open otherwise; `ρ < 1` is Yes; `ρ > 1` is
/// No (not power bounded); `ρ = 1, u(z₀) ≠ 1` is No because the spectrum
/// then meets the unit circle away from 1, which a Ritt operator's spectrum
/// (contained in a Stolz domain) cannot.
pub fn ritt_verdict(p: &OperatorParams) -> Result<Verdict> {
    require_bounded(p)?;
    let u0 = p.u0();
    if p.a_on_circle() {
        let threshold = (-p.b().norm_sqr() / 2.0).exp();
        return Ok(if p.a_is_one() && p.b_is_zero() {
            if u0.norm() < 1.0 {
                Verdict::yes("a = 1, b = 0, |u(0)| < 1: W = u(0)·I with ‖Wⁿ⁺¹ − Wⁿ‖ = |u(0)|ⁿ|1 − u(0)|")
            } else if approx_eq(u0, ONE) {
                Verdict::yes("a = 1, b = 0, u(0) = 1: W is the identity")
            } else {
                Verdict::no("a = 1, b = 0: spectrum {u(0)} lies outside {|z| < 1} ∪ {1}")
            }
        } else if u0.norm() < threshold {
            let branch = if p.a_is_one() { "a = 1, b ≠ 0" } else { "|a| = 1, a ≠ 1" };
            Verdict::yes(format!(
                "{branch}, |u(0)| < e^(-|b|²/2): ‖Wⁿ‖ = (|u(0)|e^(|b|²/2))ⁿ decays geometrically"
            ))
        } else {
            let branch = if p.a_is_one() { "a = 1, b ≠ 0" } else { "|a| = 1, a ≠ 1" };
            Verdict::no(format!(
                "{branch}, |u(0)| ≥ e^(-|b|²/2): spectrum meets the unit circle away from 1 or W is not power bounded"
            ))
        });
    }
    let uz0 = p.weight_at_fixed_point()?;
    let rho = uz0.norm();
    if approx_eq(uz0, ONE) {
        return Ok(if p.is_composition() {
            Verdict::yes("compact composition operator C_ψ: Ritt iff compact or identity")
        } else if p.a().norm() <= EQ_TOL {
            Verdict::yes("a = 0 and u(b) = 1: ‖Wⁿ⁺¹ − Wⁿ‖ ≤ |u(b)|ⁿ|u(b) − 1| = 0")
        } else {
            Verdict::open("|a| < 1, u(z₀) = 1, u non-constant: necessity holds, sufficiency is conjectured")
        });
    }
    Ok(if rho < 1.0 {
        Verdict::yes("|a| < 1 and |u(z₀)| < 1: power bounded with geometrically decaying consecutive differences")
    } else if rho > 1.0 {
        Verdict::no("|a| < 1 and |u(z₀)| > 1: not power bounded")
    } else {
        Verdict::no(
            "|a| < 1, |u(z₀)| = 1, u(z₀) ≠ 1: the eigenvalue u(z₀) lies on the unit circle away from 1, outside every Stolz domain",
        )
    })
}

/// Unconditional Ritt condition: `‖Σ aₙ(Wⁿ − Wⁿ⁻¹)‖ ≤ K sup|aₙ|`.
///
/// Equivalent to the Ritt condition for composition operators. Since it
/// implies the Ritt condition, Ritt = No forces No. When `ρ < 1` (or the
/// consecutive differences vanish) the differences are absolutely summable,
/// which gives Yes. The remaining open Ritt case stays open.
pub fn unconditional_ritt_verdict(p: &OperatorParams) -> Result<Verdict> {
    let ritt = ritt_verdict(p)?;
    if p.is_composition() {
        return Ok(Verdict {
            value: ritt.value,
            reason: format!("composition operator: unconditional Ritt ⇔ Ritt ({})", ritt.reason),
        });
    }
    Ok(match ritt.value {
        VerdictValue::No => Verdict::no(format!("unconditional Ritt implies Ritt, which fails ({})", ritt.reason)),
        VerdictValue::OpenConjecture => Verdict::open(
            "unconditional Ritt is only settled for C_ψ; the Ritt condition itself is open here",
        ),
        VerdictValue::Yes => {
            let rho = growth_modulus(p);
            if rho < 1.0 {
                Verdict::yes(
                    "ρ < 1: Σ‖Wⁿ − Wⁿ⁻¹‖ ≤ C Σ ρⁿ⁻¹ < ∞ (summability, extending the geometric-decay argument beyond C_ψ)",
                )
            } else {
                // a = 0 with u(b) = 1: W² = W, so only the first difference survives
                Verdict::yes("Wⁿ⁺¹ = Wⁿ for n ≥ 1: the signed sum collapses to a₁(W − I)")
            }
        }
    })
}
