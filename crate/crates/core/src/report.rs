//! Run configuration and the machine-readable reports behind the CLI.
//!
//! Each command takes a [`RunConfig`] and returns a [`CommandOutput`]: an exit
//! code, a body (JSON or CSV) and diagnostics for stderr. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success, numerics consistent with the closed form |
//! | 1 | inconsistency (or a numerical failure) |
//! | 2 | configuration could not be read or parsed |
//! | 3 | invalid parameters (`u₀ = 0`, `p < 1`, non-finite) |
//! | 4 | unbounded operator |
//!
//! JSON floats are written at 17 significant digits; non-finite values as the
//! strings `"inf"`, `"-inf"`, `"nan"`.

use std::io;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::ser::Serialize;
use serde::{Deserialize, Serialize as SerializeDerive};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::classify::{classify, ritt_verdict, unconditional_ritt_verdict, ClassificationReport, Verdict, VerdictValue};
use crate::dynlab::{
    inequality_suite, isometry_check, is_normalized_translation, kreiss_functional_scan, nagy_zemanek_sequence,
    random_targets, ritt_functional_scan, supercyclic_probe, unconditional_ritt_estimate, BoundaryProbe,
    InequalityViolation, ProbeResult, ScanGrid, ScanKind, StolzCheck, VerdictHint,
};
use crate::linalg::build_matrix;
use crate::symbol::{ExpPoly, OperatorParams};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID_PARAMS: i32 = 3;
pub const EXIT_UNBOUNDED: i32 = 4;

pub const DEFAULT_N_DIM: usize = 128;
pub const DEFAULT_N_MAX: u32 = 50;
pub const DEFAULT_SEED: u64 = 20240001;

/// Sign-sum length and number of trials for the unconditional Ritt estimate.
pub const UNCOND_TERMS: usize = 20;
pub const UNCOND_TRIALS: usize = 8;
/// Slack on the Kreiss comparison.
pub const KREISS_TOL: f64 = 1e-6;
/// Relative slack on the Nagy–Zemanek lower bound.
pub const NZ_SLACK: f64 = 1e-6;
pub const ISOMETRY_BLOCK: usize = 16;
pub const ISOMETRY_TOL: f64 = 1e-4;
pub const INEQUALITY_SAMPLES: usize = 200;
pub const PROBE_TARGETS: usize = 3;
pub const PROBE_TARGET_DEGREE: usize = 8;

/// Maps a library error to its exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::InvalidGrid(_) | Error::InvalidDimension(_) | Error::Io(_) => EXIT_PARSE,
        Error::InvalidParams(_) => EXIT_INVALID_PARAMS,
        Error::Unbounded(_) => EXIT_UNBOUNDED,
        Error::NoFixedPoint | Error::IterationCap { .. } | Error::SingularResolvent(_) | Error::WrongFamily(_) => {
            EXIT_INCONSISTENT
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, SerializeDerive, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

fn default_p() -> f64 {
    2.0
}
fn default_n_dim() -> usize {
    DEFAULT_N_DIM
}
fn default_n_max() -> u32 {
    DEFAULT_N_MAX
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_probe_targets() -> usize {
    PROBE_TARGETS
}

/// `(p, a, b, c, u₀)` with complex numbers as `[re, im]`; `p` defaults to 2,
/// `b` and `c` to 0.
#[derive(Debug, Clone, Copy, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    #[serde(default = "default_p")]
    pub p: f64,
    pub a: Complex64,
    #[serde(default)]
    pub b: Complex64,
    #[serde(default)]
    pub c: Complex64,
    pub u0: Complex64,
}

impl From<&OperatorParams> for ParamsConfig {
    fn from(p: &OperatorParams) -> Self {
        Self {
            p: p.p(),
            a: p.a(),
            b: p.b(),
            c: p.c(),
            u0: p.u0(),
        }
    }
}

/// Inputs of the supercyclicity probe. Without `f` the kernel `K_1` is used;
/// without `targets`, `random_targets` seeded polynomials of degree 8.
#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<ExpPoly>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<ExpPoly>>,
    #[serde(default = "default_probe_targets")]
    pub random_targets: usize,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            f: None,
            targets: None,
            random_targets: PROBE_TARGETS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, SerializeDerive, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsConfig,
    #[serde(default = "default_n_dim")]
    pub n_dim: usize,
    #[serde(default = "default_n_max")]
    pub n_max: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<ScanGrid>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    /// Which functional `scan` evaluates; Ritt by default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeConfig>,
}

impl RunConfig {
    /// Defaults everywhere except the parameters.
    pub fn new(params: &OperatorParams) -> Self {
        Self {
            params: params.into(),
            n_dim: DEFAULT_N_DIM,
            n_max: DEFAULT_N_MAX,
            grid: None,
            seed: DEFAULT_SEED,
            output: None,
            format: None,
            scan: None,
            probe: None,
        }
    }

    /// Parses JSON. Failures carry the line, column and offending field.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.n_dim < 1 {
            return Err(Error::Config("field `n_dim`: must be at least 1".into()));
        }
        if let Some(g) = &cfg.grid {
            ScanGrid::new(g.rho_values.clone(), g.theta_values.clone())?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }

    /// Validated operator parameters.
    pub fn operator(&self) -> Result<OperatorParams> {
        let c = &self.params;
        OperatorParams::new(c.p, c.a, c.b, c.c, c.u0)
    }

    pub fn grid(&self) -> ScanGrid {
        self.grid.clone().unwrap_or_else(ScanGrid::default_ritt)
    }

    fn probe_inputs(&self) -> (ExpPoly, Vec<ExpPoly>) {
        let probe = self.probe.clone().unwrap_or_default();
        let f = probe.f.unwrap_or_else(|| ExpPoly::kernel(Complex64::new(1.0, 0.0)));
        let targets = probe
            .targets
            .unwrap_or_else(|| random_targets(probe.random_targets, PROBE_TARGET_DEGREE, self.seed));
        (f, targets)
    }
}

/// Pretty printing with every float at 17 significant digits.
struct G17Formatter<'a>(PrettyFormatter<'a>);

impl Formatter for G17Formatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(crate::fmt::g17(v).as_bytes())
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, G17Formatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub code: i32,
    pub body: String,
    pub diagnostics: Vec<String>,
}

impl CommandOutput {
    fn ok(body: String) -> Self {
        Self {
            code: EXIT_OK,
            body,
            diagnostics: Vec::new(),
        }
    }

    fn from_error(e: &Error) -> Self {
        Self {
            code: exit_code(e),
            body: String::new(),
            diagnostics: vec![e.to_string()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Classify,
    Verify,
    Matrix,
    Scan,
    Probe,
}

pub fn run(command: Command, cfg: &RunConfig) -> CommandOutput {
    let result = match command {
        Command::Classify => cmd_classify(cfg),
        Command::Verify => cmd_verify(cfg),
        Command::Matrix => cmd_matrix(cfg),
        Command::Scan => cmd_scan(cfg),
        Command::Probe => cmd_probe(cfg),
    };
    result.unwrap_or_else(|e| CommandOutput::from_error(&e))
}

#[derive(SerializeDerive)]
struct ClassifyOutput<'a> {
    params: ParamsConfig,
    #[serde(flatten)]
    report: &'a ClassificationReport,
}

/// The closed-form classification as JSON. Unbounded parameters are a
/// verdict here, not an error.
pub fn cmd_classify(cfg: &RunConfig) -> Result<CommandOutput> {
    let p = cfg.operator()?;
    let report = classify(&p);
    Ok(CommandOutput::ok(to_json(&ClassifyOutput {
        params: (&p).into(),
        report: &report,
    })))
}

fn require_bounded(p: &OperatorParams) -> Result<ClassificationReport> {
    let report = classify(p);
    if report.bounded {
        Ok(report)
    } else {
        Err(Error::Unbounded(report.boundedness_reason))
    }
}

#[derive(Debug, Clone, SerializeDerive)]
pub struct RittSection {
    pub pass: bool,
    pub verdict: VerdictValue,
    pub verdict_hint: VerdictHint,
    pub stable: bool,
    pub n_dim: usize,
    pub half_dim: usize,
    pub supremum: f64,
    pub supremum_half: f64,
    pub argmax: Complex64,
    pub points_evaluated: usize,
    pub skipped_points: Vec<Complex64>,
    pub boundary: Option<BoundaryProbe>,
    pub note: &'static str,
}

#[derive(Debug, Clone, SerializeDerive)]
pub struct KreissSection {
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped_reason: Option<String>,
    #[serde(serialize_with = "crate::fmt::opt_f64_or_tag")]
    pub supremum: Option<f64>,
    #[serde(serialize_with = "crate::fmt::opt_f64_or_tag")]
    pub supremum_half: Option<f64>,
    #[serde(serialize_with = "crate::fmt::opt_f64_or_tag")]
    pub power_bound: Option<f64>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, SerializeDerive)]
pub struct NzSection {
    pub pass: bool,
    pub verdict: VerdictValue,
    pub n_max: u32,
    #[serde(serialize_with = "crate::fmt::f64_or_tag")]
    pub growth: f64,
    pub growing: bool,
    pub lower_bound_respected: bool,
    pub values: Vec<(u32, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bounds: Option<Vec<f64>>,
}

#[derive(Debug, Clone, SerializeDerive)]
pub struct UncondSection {
    pub pass: bool,
    pub verdict: Verdict,
    pub n_terms: usize,
    pub trials: usize,
    pub estimate: f64,
    pub sum_of_norms: f64,
    pub by_length: Vec<f64>,
    pub nondecreasing: bool,
}

#[derive(Debug, Clone, SerializeDerive)]
pub struct ProbeSection {
    pub pass: bool,
    #[serde(flatten)]
    pub result: ProbeResult,
    pub note: &'static str,
}

#[derive(Debug, Clone, SerializeDerive)]
pub struct IsometrySection {
    pub pass: bool,
    pub block: usize,
    pub n_dim: usize,
    pub norm: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, SerializeDerive)]
pub struct InequalitySection {
    pub pass: bool,
    pub samples: usize,
    pub violations: Vec<InequalityViolation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stolz: Option<StolzCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stolz_contained: Option<bool>,
    pub note: &'static str,
}

#[derive(Debug, Clone, SerializeDerive)]
pub struct VerifyReport {
    pub params: ParamsConfig,
    pub n_dim: usize,
    pub n_max: u32,
    pub seed: u64,
    pub classification: ClassificationReport,
    pub ritt_scan: RittSection,
    pub kreiss_scan: KreissSection,
    pub nz_sequence: NzSection,
    pub uncond_estimate: UncondSection,
    pub probe: ProbeSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub isometry: Option<IsometrySection>,
    pub inequalities: InequalitySection,
    pub pass: bool,
}

/// Runs every experiment and checks it against the closed-form verdicts.
pub fn verify_report(cfg: &RunConfig) -> Result<VerifyReport> {
    let p = cfg.operator()?;
    let classification = require_bounded(&p)?;
    let grid = cfg.grid();
    let n = cfg.n_dim;
    let ritt = ritt_verdict(&p)?;

    let scan = ritt_functional_scan(&p, n, &grid)?;
    let expected_hint = match ritt.value {
        VerdictValue::Yes => Some(VerdictHint::Bounded),
        VerdictValue::No => Some(VerdictHint::Diverging),
        VerdictValue::OpenConjecture => None,
    };
    let ritt_scan = RittSection {
        pass: expected_hint.is_none_or(|h| h == scan.verdict_hint),
        verdict: ritt.value,
        verdict_hint: scan.verdict_hint,
        stable: scan.stable,
        n_dim: scan.n_dim,
        half_dim: scan.half_dim,
        supremum: scan.supremum,
        supremum_half: scan.supremum_half,
        argmax: scan.argmax,
        points_evaluated: scan.points.len(),
        skipped_points: scan.skipped.clone(),
        boundary: scan.boundary.clone(),
        note: "grid suprema at N and N/2 plus a boundary approach probe; evidence, not a bound on the Ritt constant",
    };

    let kreiss_scan = if classification.power_bounded {
        let k = kreiss_functional_scan(&p, n, &grid)?;
        let bound = k.power_bound.expect("Kreiss scans carry the power bound");
        KreissSection {
            pass: k.skipped.is_empty() && k.supremum <= bound + KREISS_TOL,
            skipped_reason: None,
            supremum: Some(k.supremum),
            supremum_half: Some(k.supremum_half),
            power_bound: Some(bound),
            tolerance: KREISS_TOL,
        }
    } else {
        KreissSection {
            pass: true,
            skipped_reason: Some("not power bounded".into()),
            supremum: None,
            supremum_half: None,
            power_bound: None,
            tolerance: KREISS_TOL,
        }
    };

    let nz = nagy_zemanek_sequence(&p, n, cfg.n_max)?;
    let lower_bound_respected = nz.respects_lower_bound(NZ_SLACK);
    let growing = nz.is_growing();
    let nz_pass = lower_bound_respected
        && match ritt.value {
            VerdictValue::Yes => !growing,
            VerdictValue::No => growing,
            VerdictValue::OpenConjecture => true,
        };
    let nz_sequence = NzSection {
        pass: nz_pass,
        verdict: ritt.value,
        n_max: cfg.n_max,
        growth: nz.growth,
        growing,
        lower_bound_respected,
        values: nz.values,
        lower_bounds: nz.lower_bounds,
    };

    let uncond = unconditional_ritt_estimate(&p, n, UNCOND_TERMS, UNCOND_TRIALS, cfg.seed)?;
    let nondecreasing = uncond.by_length.windows(2).all(|w| w[0] <= w[1]);
    let uncond_estimate = UncondSection {
        pass: nondecreasing && uncond.estimate <= uncond.sum_of_norms * (1.0 + 1e-9) + 1e-12,
        verdict: unconditional_ritt_verdict(&p)?,
        n_terms: uncond.n_terms,
        trials: uncond.trials,
        estimate: uncond.estimate,
        sum_of_norms: uncond.sum_of_norms,
        by_length: uncond.by_length,
        nondecreasing,
    };

    let (f, targets) = cfg.probe_inputs();
    let probe = supercyclic_probe(&p, &f, &targets, cfg.n_max, n)?;
    let probe = ProbeSection {
        pass: probe.threshold_met && probe.ratio_violations == 0,
        result: probe,
        note: "empirical evidence against supercyclicity, not a proof",
    };

    let isometry = if is_normalized_translation(&p) && n > 1 {
        let block = ISOMETRY_BLOCK.min(n - 1);
        let norm = isometry_check(&p, n, block)?;
        Some(IsometrySection {
            pass: norm <= ISOMETRY_TOL,
            block,
            n_dim: n,
            norm,
            tolerance: ISOMETRY_TOL,
        })
    } else {
        None
    };

    let m_hat = ritt.is_yes().then_some(scan.supremum);
    let ineq = inequality_suite(&p, INEQUALITY_SAMPLES, cfg.seed, m_hat);
    let inequalities = InequalitySection {
        pass: ineq.passed(),
        samples: ineq.samples,
        stolz_contained: ineq.stolz.as_ref().map(StolzCheck::contained),
        violations: ineq.violations,
        stolz: ineq.stolz,
        note: "the Stolz check uses the grid supremum as the Ritt constant, a lower bound, so it is conservative",
    };

    let pass = ritt_scan.pass
        && kreiss_scan.pass
        && nz_sequence.pass
        && uncond_estimate.pass
        && probe.pass
        && isometry.as_ref().is_none_or(|s| s.pass)
        && inequalities.pass;
    Ok(VerifyReport {
        params: (&p).into(),
        n_dim: n,
        n_max: cfg.n_max,
        seed: cfg.seed,
        classification,
        ritt_scan,
        kreiss_scan,
        nz_sequence,
        uncond_estimate,
        probe,
        isometry,
        inequalities,
        pass,
    })
}

/// [`verify_report`] as JSON; exit 0 iff every section passes.
pub fn cmd_verify(cfg: &RunConfig) -> Result<CommandOutput> {
    let report = verify_report(cfg)?;
    let mut out = CommandOutput::ok(to_json(&report));
    if !report.pass {
        out.code = EXIT_INCONSISTENT;
        out.diagnostics.push("numerics contradict the closed-form verdicts; see sections with pass=false".into());
    }
    Ok(out)
}

#[derive(SerializeDerive)]
struct MatrixOutput {
    n_dim: usize,
    non_convergent: bool,
    entries: Vec<Vec<Complex64>>,
}

/// The truncated matrix, CSV by default. Unbounded parameters still produce
/// a matrix, with a warning: its norm diverges with `N`.
pub fn cmd_matrix(cfg: &RunConfig) -> Result<CommandOutput> {
    let p = cfg.operator()?;
    let rep = build_matrix(&p, cfg.n_dim)?;
    let body = match cfg.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => rep.to_csv(),
        OutputFormat::Json => to_json(&MatrixOutput {
            n_dim: rep.n_dim,
            non_convergent: rep.non_convergent,
            entries: (0..rep.n_dim).map(|i| rep.entries.row(i).to_vec()).collect(),
        }),
    };
    let mut out = CommandOutput::ok(body);
    if rep.non_convergent {
        out.diagnostics.push(format!(
            "warning: operator is unbounded ({}); the truncation does not converge",
            classify(&p).boundedness_reason
        ));
    }
    Ok(out)
}

/// The Ritt (default) or Kreiss functional over the grid, CSV by default.
pub fn cmd_scan(cfg: &RunConfig) -> Result<CommandOutput> {
    let p = cfg.operator()?;
    require_bounded(&p)?;
    let grid = cfg.grid();
    let scan = match cfg.scan.unwrap_or(ScanKind::Ritt) {
        ScanKind::Ritt => ritt_functional_scan(&p, cfg.n_dim, &grid)?,
        ScanKind::Kreiss => kreiss_functional_scan(&p, cfg.n_dim, &grid)?,
    };
    let body = match cfg.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => scan.to_csv(),
        OutputFormat::Json => to_json(&scan),
    };
    let mut out = CommandOutput::ok(body);
    if !scan.skipped.is_empty() {
        out.diagnostics
            .push(format!("{} grid points hit the spectrum of the truncation and were skipped", scan.skipped.len()));
    }
    Ok(out)
}

/// The supercyclicity probe, CSV by default.
pub fn cmd_probe(cfg: &RunConfig) -> Result<CommandOutput> {
    let p = cfg.operator()?;
    require_bounded(&p)?;
    let (f, targets) = cfg.probe_inputs();
    let probe = supercyclic_probe(&p, &f, &targets, cfg.n_max, cfg.n_dim)?;
    let body = match cfg.format.unwrap_or(OutputFormat::Csv) {
        OutputFormat::Csv => probe.to_csv(),
        OutputFormat::Json => to_json(&probe),
    };
    let mut out = CommandOutput::ok(body);
    if let Some(reason) = &probe.ratio_skipped_reason {
        out.diagnostics.push(format!("ratio part skipped: {reason}"));
    }
    Ok(out)
}
