//! Command-line surface: one subcommand per library capability, a
//! layered run configuration (defaults, then `EXTREMAL_TOL`, then a
//! config file, then flags), and deterministic report assembly. The
//! resolved configuration is hashed into every report so a run can be
//! reproduced from its output alone.
//!
//! Exit codes: 0 for a completed run, 2 when a certification sweep is
//! refuted, 1 for any input error.

use crate::ball::classify_point;
use crate::decomp::{pfq_membership, FeasibilityMethod};
use crate::doc;
use crate::error::{Error, Result};
use crate::extremality::{
    classify_linear_extremal, grid_extreme_oracle, pin_violation_witness, urysohn_pair,
    verify_pinning, PinDirection, UrysohnProfile,
};
use crate::mapping::{Mapping, MethodTag};
use crate::porosity::{build_porosity_witness, certify_ball_empty, PorosityParams};
use crate::report::{emit_report, Field, ReportDocument, ReportEntry, ReportFormat};
use crate::sample::{canonical_points, ProbeBudget};
use crate::space::Vector;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Environment variable overriding the default tolerance.
pub const TOL_ENV_VAR: &str = "EXTREMAL_TOL";

const DEFAULT_TOL: f64 = 1e-9;
const DEFAULT_Q: f64 = 0.25;
const DEFAULT_EPSILON: f64 = 0.5;
const DEFAULT_LAMBDA_STEP: f64 = 1e-3;
const DEFAULT_PROBES: usize = 64;

#[derive(Parser, Debug)]
#[command(name = "extremal", version, about = "Extremal structure of nonexpansive mappings on the unit ball", max_term_width = 80)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Classify a linear mapping as extremal or properly decomposable.
    Classify(CommonArgs),
    /// Emit a convex decomposition certificate for a linear mapping.
    Decompose(CommonArgs),
    /// Check that a mapping fixes boundary-attaining coordinates.
    PinCheck(CommonArgs),
    /// Build a two-sided perturbation pair around a point.
    Urysohn(CommonArgs),
    /// Turn a pinning defect of an operator into an expansion witness.
    PinViolate(CommonArgs),
    /// Brute-force extremality oracle for grid mappings.
    Oracle(CommonArgs),
    /// Classify ball points: interior, exposed, almost exposed.
    Points(CommonArgs),
    /// Feasible decomposition weights of one mapping through another.
    PfProbe(CommonArgs),
    /// Build a porosity witness and certify its ball empty.
    Porosity(CommonArgs),
}

impl CliCommand {
    fn name(&self) -> &'static str {
        match self {
            CliCommand::Classify(_) => "classify",
            CliCommand::Decompose(_) => "decompose",
            CliCommand::PinCheck(_) => "pin-check",
            CliCommand::Urysohn(_) => "urysohn",
            CliCommand::PinViolate(_) => "pin-violate",
            CliCommand::Oracle(_) => "oracle",
            CliCommand::Points(_) => "points",
            CliCommand::PfProbe(_) => "pf-probe",
            CliCommand::Porosity(_) => "porosity",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            CliCommand::Classify(a)
            | CliCommand::Decompose(a)
            | CliCommand::PinCheck(a)
            | CliCommand::Urysohn(a)
            | CliCommand::PinViolate(a)
            | CliCommand::Oracle(a)
            | CliCommand::Points(a)
            | CliCommand::PfProbe(a)
            | CliCommand::Porosity(a) => a,
        }
    }
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// Input document (JSON).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Config file supplying defaults for the other flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// RNG seed; required by randomized commands.
    #[arg(long)]
    seed: Option<u64>,
    /// Absolute tolerance (default 1e-9, or EXTREMAL_TOL).
    #[arg(long)]
    tol: Option<f64>,
    /// Weight-window floor for decomposition sweeps (default 0.25).
    #[arg(long)]
    q: Option<f64>,
    /// Near-isometric pair distance cap (default 0.5).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Weight grid step (default 1e-3).
    #[arg(long = "lambda-step")]
    lambda_step: Option<f64>,
    /// Probe count for sampled checks (default 64).
    #[arg(long)]
    probes: Option<usize>,
    /// Output format: json or csv-summary (default json).
    #[arg(long)]
    format: Option<String>,
}

/// The command to run with every knob resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: String,
    pub input: Option<PathBuf>,
    pub tol: f64,
    pub seed: Option<u64>,
    pub q: f64,
    pub epsilon: f64,
    pub lambda_step: f64,
    pub probes: usize,
    pub format: ReportFormat,
}

fn parse_format(name: &str) -> Result<ReportFormat> {
    match name {
        "json" => Ok(ReportFormat::Json),
        "csv-summary" => Ok(ReportFormat::CsvSummary),
        other => Err(Error::param(
            "format",
            format!("unknown format \"{other}\" (expected json or csv-summary)"),
        )),
    }
}

#[derive(Debug, Default)]
struct ConfigFile {
    input: Option<PathBuf>,
    seed: Option<u64>,
    tol: Option<f64>,
    q: Option<f64>,
    epsilon: Option<f64>,
    lambda_step: Option<f64>,
    probes: Option<usize>,
    format: Option<String>,
}

fn parse_config_file(path: &Path) -> Result<ConfigFile> {
    let text = read_text(path)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let m = value.as_object().ok_or_else(|| Error::Parse {
        path: path.display().to_string(),
        message: "expected object".to_string(),
    })?;
    let err = |key: &str, message: &str| Error::Parse {
        path: format!("{}: {key}", path.display()),
        message: message.to_string(),
    };
    let mut out = ConfigFile::default();
    for (key, v) in m {
        match key.as_str() {
            "schema_version" => {
                if v.as_str() != Some(doc::SCHEMA_VERSION) {
                    return Err(err(key, "unsupported version"));
                }
            }
            "input" => {
                out.input = Some(PathBuf::from(
                    v.as_str().ok_or_else(|| err(key, "expected string"))?,
                ));
            }
            "seed" => out.seed = Some(v.as_u64().ok_or_else(|| err(key, "expected unsigned integer"))?),
            "tol" => out.tol = Some(finite(v).ok_or_else(|| err(key, "expected finite number"))?),
            "q" => out.q = Some(finite(v).ok_or_else(|| err(key, "expected finite number"))?),
            "epsilon" => {
                out.epsilon = Some(finite(v).ok_or_else(|| err(key, "expected finite number"))?)
            }
            "lambda_step" => {
                out.lambda_step = Some(finite(v).ok_or_else(|| err(key, "expected finite number"))?)
            }
            "probes" => {
                out.probes =
                    Some(v.as_u64().ok_or_else(|| err(key, "expected unsigned integer"))? as usize)
            }
            "format" => {
                out.format = Some(
                    v.as_str()
                        .ok_or_else(|| err(key, "expected string"))?
                        .to_string(),
                )
            }
            other => return Err(err(other, "unknown field")),
        }
    }
    Ok(out)
}

fn finite(v: &Value) -> Option<f64> {
    v.as_f64().filter(|x| x.is_finite())
}

fn env_tol() -> Result<Option<f64>> {
    match std::env::var(TOL_ENV_VAR) {
        Err(_) => Ok(None),
        Ok(raw) => {
            let tol: f64 = raw
                .parse()
                .map_err(|_| Error::param("tol", format!("{TOL_ENV_VAR}=\"{raw}\" is not a number")))?;
            if !(tol > 0.0) || !tol.is_finite() {
                return Err(Error::param("tol", format!("{TOL_ENV_VAR} must be positive")));
            }
            Ok(Some(tol))
        }
    }
}

fn resolve_config(command: &CliCommand) -> Result<RunConfig> {
    let args = command.args();
    let file = match &args.config {
        Some(path) => parse_config_file(path)?,
        None => ConfigFile::default(),
    };
    let tol = args
        .tol
        .or(file.tol)
        .map(Ok)
        .unwrap_or_else(|| env_tol().map(|t| t.unwrap_or(DEFAULT_TOL)))?;
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::param("tol", format!("{tol} is not positive")));
    }
    let q = args.q.or(file.q).unwrap_or(DEFAULT_Q);
    let epsilon = args.epsilon.or(file.epsilon).unwrap_or(DEFAULT_EPSILON);
    let lambda_step = args
        .lambda_step
        .or(file.lambda_step)
        .unwrap_or(DEFAULT_LAMBDA_STEP);
    let probes = args.probes.or(file.probes).unwrap_or(DEFAULT_PROBES);
    if probes == 0 {
        return Err(Error::param("probes", "need at least one probe"));
    }
    let format = match args.format.as_deref().or(file.format.as_deref()) {
        Some(name) => parse_format(name)?,
        None => ReportFormat::Json,
    };
    let seed = args.seed.or(file.seed);
    let config = RunConfig {
        command: command.name().to_string(),
        input: args.input.clone().or(file.input),
        tol,
        seed,
        q,
        epsilon,
        lambda_step,
        probes,
        format,
    };
    if seed.is_none() && matches!(config.command.as_str(), "porosity" | "pf-probe") {
        return Err(Error::param(
            "seed",
            format!("--seed is required for the randomized command {}", config.command),
        ));
    }
    Ok(config)
}

/// Canonical serialization of a resolved config; its SHA-256 is the
/// provenance hash embedded in reports.
pub fn canonical_config(config: &RunConfig) -> String {
    let mut out = String::from("{\"command\":");
    doc::push_string_literal(&mut out, &config.command);
    out.push_str(",\"input\":");
    match &config.input {
        Some(path) => doc::push_string_literal(&mut out, &path.display().to_string()),
        None => out.push_str("null"),
    }
    out.push_str(&format!(",\"tol\":{}", doc::format_number(config.tol)));
    if let Some(seed) = config.seed {
        out.push_str(&format!(",\"seed\":{seed}"));
    }
    out.push_str(&format!(
        ",\"q\":{},\"epsilon\":{},\"lambda_step\":{},\"probes\":{},\"format\":\"{}\"}}",
        doc::format_number(config.q),
        doc::format_number(config.epsilon),
        doc::format_number(config.lambda_step),
        config.probes,
        match config.format {
            ReportFormat::Json => "json",
            ReportFormat::CsvSummary => "csv-summary",
        }
    ));
    out
}

pub fn config_hash(config: &RunConfig) -> String {
    let digest = Sha256::digest(canonical_config(config).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn input_value(config: &RunConfig) -> Result<Value> {
    let path = config.input.as_ref().ok_or_else(|| {
        Error::param("input", format!("--input is required for {}", config.command))
    })?;
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        message: message.into(),
    }
}

fn doc_field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.as_object()
        .ok_or_else(|| parse_err("$", "expected object"))?
        .get(key)
        .ok_or_else(|| parse_err("$", format!("missing field \"{key}\"")))
}

fn doc_vector(v: &Value, path: &str) -> Result<Vector> {
    let arr = v
        .as_array()
        .ok_or_else(|| parse_err(path, "expected array of numbers"))?;
    let mut coords = Vec::with_capacity(arr.len());
    for (i, x) in arr.iter().enumerate() {
        coords.push(finite(x).ok_or_else(|| parse_err(&format!("{path}[{i}]"), "expected finite number"))?);
    }
    Vector::new(coords).map_err(|e| parse_err(path, e.to_string()))
}

fn doc_index(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| parse_err(path, "expected unsigned integer"))
}

/// Reject unknown keys and mismatched `schema_version` on a top-level
/// input document. `allowed` must list `schema_version` explicitly.
fn doc_shape(v: &Value, allowed: &[&str]) -> Result<()> {
    let m = v.as_object().ok_or_else(|| parse_err("$", "expected object"))?;
    for key in m.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(parse_err(key, "unknown field"));
        }
    }
    if let Some(version) = m.get("schema_version") {
        let got = version
            .as_str()
            .ok_or_else(|| parse_err("schema_version", "expected string"))?;
        if got != doc::SCHEMA_VERSION {
            return Err(parse_err(
                "schema_version",
                format!("unsupported version \"{got}\""),
            ));
        }
    }
    Ok(())
}

fn budget_of(config: &RunConfig) -> ProbeBudget {
    ProbeBudget {
        points: config.probes,
        pairs: config.probes,
        seed: config.seed.unwrap_or(0),
    }
}

/// A finished run: the report plus whether a certification was
/// refuted (exit code 2).
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: ReportDocument,
    pub refuted: bool,
}

fn require_linear(m: &Mapping) -> Result<crate::linalg::Matrix> {
    let (matrix, offset) = m
        .linearize()
        .ok_or_else(|| Error::param("input", "expected a linear mapping document"))?;
    if offset.coords.iter().any(|c| *c != 0.0) {
        return Err(Error::param("input", "expected a linear mapping, found an offset"));
    }
    Ok(matrix)
}

fn certificate_fields(cert: &crate::decomp::DecompositionCertificate) -> Field {
    Field::Object(vec![
        ("lambda".to_string(), Field::Float(cert.lambda)),
        (
            "weights".to_string(),
            Field::Vector(vec![1.0 - cert.lambda, cert.lambda]),
        ),
        ("g".to_string(), Field::mapping(&cert.g)),
        ("h".to_string(), Field::mapping(&cert.h)),
        (
            "residual".to_string(),
            Field::claim(cert.residual, cert.residual_method),
        ),
    ])
}

fn classify_entry(config: &RunConfig, decompose: bool) -> Result<Vec<ReportEntry>> {
    let mapping = doc::parse_mapping_value(&input_value(config)?, "")?;
    let matrix = require_linear(&mapping)?;
    let verdict = classify_linear_extremal(*mapping.space(), &matrix, config.tol, &budget_of(config))?;
    let rows = Field::List(
        verdict
            .rows
            .iter()
            .map(|row| {
                Field::Object(vec![
                    ("functional".to_string(), Field::Vector(row.functional.coords.clone())),
                    ("l1_norm".to_string(), Field::exact(row.l1_norm)),
                ])
            })
            .collect(),
    );
    let mut entry = if verdict.extremal {
        let form = verdict.form.as_ref().expect("extremal verdicts carry the form");
        ReportEntry::new("EXTREMAL")
            .with("extremal", Field::Bool(true))
            .with(
                "signed_permutation",
                Field::Object(vec![
                    (
                        "pi".to_string(),
                        Field::Vector(form.pi.iter().map(|k| *k as f64).collect()),
                    ),
                    ("epsilon".to_string(), Field::Vector(form.epsilon.clone())),
                ]),
            )
    } else {
        let cert = verdict
            .certificate
            .as_ref()
            .expect("non-extremal verdicts carry a certificate");
        ReportEntry::new(if decompose { "DECOMPOSED" } else { "NOT_EXTREMAL" })
            .with("extremal", Field::Bool(false))
            .with("certificate", certificate_fields(cert))
    };
    entry.push("rows", rows);
    Ok(vec![entry])
}

fn pin_check_entry(config: &RunConfig) -> Result<Vec<ReportEntry>> {
    let mapping = doc::parse_mapping_value(&input_value(config)?, "")?;
    let space = *mapping.space();
    let mut samples = Vec::new();
    for point in canonical_points(&space) {
        for k in 0..space.dim {
            if (point.coords[k].abs() - 1.0).abs() <= 1e-12 {
                samples.push((point.clone(), k));
            }
        }
    }
    let violations = verify_pinning(&mapping, &samples, config.tol)?;
    let mut entry = if violations.is_empty() {
        ReportEntry::new("PINNED")
    } else {
        ReportEntry::new("NOT_PINNED")
    };
    entry.push("checked", Field::UInt(samples.len() as u64));
    if !violations.is_empty() {
        entry.push(
            "violations",
            Field::List(
                violations
                    .iter()
                    .map(|v| {
                        Field::Object(vec![
                            ("sample".to_string(), Field::UInt(v.sample_index as u64)),
                            ("coordinate".to_string(), Field::UInt(v.coordinate as u64)),
                            ("expected".to_string(), Field::Float(v.expected)),
                            ("actual".to_string(), Field::exact(v.actual)),
                        ])
                    })
                    .collect(),
            ),
        );
    }
    Ok(vec![entry])
}

fn profile_of(name: &str) -> Result<UrysohnProfile> {
    match name {
        "indicator" => Ok(UrysohnProfile::Indicator),
        "tent" => Ok(UrysohnProfile::Tent),
        other => Err(parse_err("profile", format!("unknown profile \"{other}\""))),
    }
}

fn sup_distance(a: &Vector, b: &Vector) -> f64 {
    a.coords
        .iter()
        .zip(&b.coords)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn urysohn_entry(config: &RunConfig) -> Result<Vec<ReportEntry>> {
    let value = input_value(config)?;
    doc_shape(&value, &["schema_version", "point", "x0", "gamma", "profile"])?;
    let point = doc_vector(doc_field(&value, "point")?, "point")?;
    let x0 = doc_index(doc_field(&value, "x0")?, "x0")?;
    let gamma = finite(doc_field(&value, "gamma")?)
        .ok_or_else(|| parse_err("gamma", "expected finite number"))?;
    let profile_name = doc_field(&value, "profile")?
        .as_str()
        .ok_or_else(|| parse_err("profile", "expected string"))?;
    let pair = urysohn_pair(&point, x0, gamma, profile_of(profile_name)?)?;
    let fx0 = point.coords[x0];
    let entry = ReportEntry::new("URYSOHN_PAIR")
        .with("x0", Field::UInt(x0 as u64))
        .with("gamma", Field::Float(gamma))
        .with("profile", Field::text(profile_name))
        .with(
            "neighborhood",
            Field::Vector(pair.neighborhood.iter().map(|i| *i as f64).collect()),
        )
        .with("bump", Field::vector(&pair.bump))
        .with("g_plus", Field::vector(&pair.g_plus))
        .with("g_minus", Field::vector(&pair.g_minus))
        .with("deviation_plus", Field::exact(sup_distance(&point, &pair.g_plus)))
        .with("bound_plus", Field::Float(1.0 - fx0 + gamma))
        .with("deviation_minus", Field::exact(sup_distance(&point, &pair.g_minus)))
        .with("bound_minus", Field::Float(1.0 + fx0 + gamma));
    Ok(vec![entry])
}

fn pin_violate_entry(config: &RunConfig) -> Result<Vec<ReportEntry>> {
    let value = input_value(config)?;
    doc_shape(&value, &["schema_version", "operator", "point", "x0"])?;
    let op = doc::parse_mapping_value(doc_field(&value, "operator")?, "operator")?;
    let point = doc_vector(doc_field(&value, "point")?, "point")?;
    let x0 = doc_index(doc_field(&value, "x0")?, "x0")?;
    match pin_violation_witness(&op, &point, x0, config.tol) {
        Ok(witness) => {
            let direction = match witness.direction {
                PinDirection::Plus => "PLUS",
                PinDirection::Minus => "MINUS",
            };
            Ok(vec![ReportEntry::new("EXPANSION_WITNESS")
                .with("x0", Field::UInt(x0 as u64))
                .with("direction", Field::text(direction))
                .with("gamma", Field::Float(witness.gamma))
                .with("perturbed", Field::vector(&witness.perturbed))
                .with("lhs", Field::exact(witness.lhs))
                .with("rhs", Field::exact(witness.rhs))
                .with("margin", Field::exact(witness.margin))])
        }
        Err(Error::HypothesisNotMet { message }) => {
            Ok(vec![ReportEntry::new("HYPOTHESIS_NOT_MET")
                .with("message", Field::text(message))])
        }
        Err(Error::NotBoundaryPinned {
            coord,
            expected,
            actual,
        }) => Ok(vec![ReportEntry::new("NOT_BOUNDARY_PINNED")
            .with("coordinate", Field::UInt(coord as u64))
            .with("expected", Field::Float(expected))
            .with("actual", Field::exact(actual))]),
        Err(e) => Err(e),
    }
}

fn oracle_entry(config: &RunConfig) -> Result<Vec<ReportEntry>> {
    let mapping = doc::parse_mapping_value(&input_value(config)?, "")?;
    let outcome = grid_extreme_oracle(&mapping, config.tol, &budget_of(config))?;
    let samples = outcome.deltas.len();
    let mut entry = ReportEntry::new(if outcome.extreme { "EXTREME" } else { "NOT_EXTREME" })
        .with("extreme", Field::Bool(outcome.extreme))
        .with(
            "max_delta",
            Field::claim(outcome.max_delta, MethodTag::Sampled(samples)),
        )
        .with("deltas", Field::Matrix(outcome.deltas.clone()));
    if let Some((sample, coordinate)) = outcome.witness {
        entry.push(
            "witness",
            Field::Object(vec![
                ("sample".to_string(), Field::UInt(sample as u64)),
                ("coordinate".to_string(), Field::UInt(coordinate as u64)),
            ]),
        );
    }
    Ok(vec![entry])
}

fn points_entries(config: &RunConfig) -> Result<Vec<ReportEntry>> {
    let value = input_value(config)?;
    let has_points = value.as_object().is_some_and(|m| m.contains_key("points"));
    let (space, points) = if has_points {
        doc_shape(&value, &["schema_version", "space", "points"])?;
        let space = doc::parse_space(doc_field(&value, "space")?, "space")?;
        let raw = doc_field(&value, "points")?
            .as_array()
            .ok_or_else(|| parse_err("points", "expected array of vectors"))?;
        let points = raw
            .iter()
            .enumerate()
            .map(|(i, p)| doc_vector(p, &format!("points[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        (space, points)
    } else {
        let mapping = doc::parse_mapping_value(&value, "")?;
        let space = *mapping.space();
        (space, canonical_points(&space))
    };
    points
        .iter()
        .map(|point| {
            let report = classify_point(&space, point, config.tol)?;
            Ok(ReportEntry::new(report.class.as_str())
                .with("point", Field::vector(point))
                .with("norm", Field::exact(report.norm))
                .with("extreme", Field::Bool(report.extreme))
                .with("exposed", Field::Bool(report.exposed))
                .with("almost_exposed", Field::Bool(report.almost_exposed)))
        })
        .collect()
}

fn mapping_pair(config: &RunConfig) -> Result<(Mapping, Mapping)> {
    let value = input_value(config)?;
    let compound = value.as_object().is_some_and(|m| m.contains_key("f"));
    if compound {
        doc_shape(&value, &["schema_version", "f", "g"])?;
        let f = doc::parse_mapping_value(doc_field(&value, "f")?, "f")?;
        let g = doc::parse_mapping_value(doc_field(&value, "g")?, "g")?;
        Ok((f, g))
    } else {
        let f = doc::parse_mapping_value(&value, "")?;
        Ok((f.clone(), f))
    }
}

fn feasibility_tag(method: &FeasibilityMethod) -> MethodTag {
    match method {
        FeasibilityMethod::ExactLinear => MethodTag::Exact,
        FeasibilityMethod::GridScan { step } => MethodTag::Scanned(*step),
    }
}

fn pf_probe_entry(config: &RunConfig) -> Result<Vec<ReportEntry>> {
    let (f, g) = mapping_pair(config)?;
    let offset_free = |m: &Mapping| {
        m.linearize()
            .is_some_and(|(_, b)| b.coords.iter().all(|c| *c == 0.0))
    };
    let exact =
        f.space().norm == crate::space::NormTag::Linf && offset_free(&f) && offset_free(&g);
    let method = if exact {
        FeasibilityMethod::ExactLinear
    } else {
        FeasibilityMethod::GridScan {
            step: config.lambda_step,
        }
    };
    let set = pfq_membership(&f, &g, config.q, method, &budget_of(config))?;
    let tag = feasibility_tag(&set.method);
    let mut entry = ReportEntry::new(if set.is_empty() { "EMPTY" } else { "FEASIBLE" })
        .with("q", Field::Float(set.q))
        .with("interval_count", Field::UInt(set.intervals.len() as u64));
    if !set.intervals.is_empty() {
        entry.push(
            "intervals",
            Field::List(
                set.intervals
                    .iter()
                    .map(|(lo, hi)| {
                        Field::Object(vec![
                            ("lo".to_string(), Field::claim(*lo, tag)),
                            ("hi".to_string(), Field::claim(*hi, tag)),
                        ])
                    })
                    .collect(),
            ),
        );
    }
    Ok(vec![entry])
}

fn porosity_entries(config: &RunConfig) -> Result<(Vec<ReportEntry>, bool)> {
    let (f, g) = mapping_pair(config)?;
    let params = PorosityParams::from_q_epsilon(config.q, config.epsilon)?;
    let budget = budget_of(config);
    let params_field = Field::Object(vec![
        ("q".to_string(), Field::Float(params.q)),
        ("epsilon".to_string(), Field::Float(params.epsilon)),
        ("delta".to_string(), Field::Float(params.delta)),
        ("alpha".to_string(), Field::Float(params.alpha)),
    ]);
    let witness = match build_porosity_witness(&g, &params, &budget) {
        Ok(w) => w,
        Err(Error::NoPairFound { best_ratio }) => {
            return Ok((
                vec![ReportEntry::new("NO_PAIR_FOUND")
                    .with("params", params_field)
                    .with("best_ratio", Field::Float(best_ratio))],
                false,
            ));
        }
        Err(Error::DegenerateWitness { retries }) => {
            return Ok((
                vec![ReportEntry::new("DEGENERATE_WITNESS")
                    .with("params", params_field)
                    .with("retries", Field::UInt(retries as u64))],
                false,
            ));
        }
        Err(e) => return Err(e),
    };
    let seed = config.seed.expect("porosity requires a seed");
    let base = ReportEntry::new("")
        .with("params", params_field)
        .with("x0", Field::vector(&witness.pair.x0))
        .with("y", Field::vector(&witness.pair.y))
        .with("eta", Field::exact(witness.pair.eta))
        .with("ratio", Field::exact(witness.pair.ratio))
        .with(
            "center_distance",
            Field::claim(witness.center_distance, witness.distance_method),
        )
        .with("radius", Field::Float(witness.radius))
        .with("collapsed", Field::mapping(&witness.collapsed));
    match certify_ball_empty(&witness, &f, config.probes, config.lambda_step, seed, &budget) {
        Ok(cert) => {
            let mut entry = base;
            entry.verdict = "EMPTY_BALL".to_string();
            entry.push("probe_count", Field::UInt(cert.probe_count as u64));
            entry.push("lambda_step", Field::Float(cert.lambda_step));
            entry.push(
                "min_margin",
                Field::claim(cert.min_margin, MethodTag::Scanned(cert.lambda_step)),
            );
            entry.push(
                "refutations",
                Field::List(
                    cert.refutations
                        .iter()
                        .map(|r| {
                            Field::Object(vec![
                                ("probe".to_string(), Field::UInt(r.probe_index as u64)),
                                ("kind".to_string(), Field::text(r.kind.label())),
                                ("dist_bound".to_string(), Field::exact(r.dist_bound)),
                                ("worst_lambda".to_string(), Field::Float(r.worst_lambda)),
                                (
                                    "min_margin".to_string(),
                                    Field::claim(r.min_margin, MethodTag::Scanned(cert.lambda_step)),
                                ),
                            ])
                        })
                        .collect(),
                ),
            );
            Ok((vec![entry], false))
        }
        Err(Error::CertificationRefuted { probe, lambda, margin }) => {
            let mut entry = base;
            entry.verdict = "REFUTED".to_string();
            entry.push("probe", Field::UInt(probe as u64));
            entry.push("lambda", Field::Float(lambda));
            entry.push(
                "margin",
                Field::claim(margin, MethodTag::Scanned(config.lambda_step)),
            );
            Ok((vec![entry], true))
        }
        Err(e) => Err(e),
    }
}

/// Route a resolved config to its command and assemble the report.
pub fn dispatch(config: &RunConfig) -> Result<RunOutcome> {
    let mut refuted = false;
    let entries = match config.command.as_str() {
        "classify" => classify_entry(config, false)?,
        "decompose" => classify_entry(config, true)?,
        "pin-check" => pin_check_entry(config)?,
        "urysohn" => urysohn_entry(config)?,
        "pin-violate" => pin_violate_entry(config)?,
        "oracle" => oracle_entry(config)?,
        "points" => points_entries(config)?,
        "pf-probe" => pf_probe_entry(config)?,
        "porosity" => {
            let (entries, was_refuted) = porosity_entries(config)?;
            refuted = was_refuted;
            entries
        }
        other => return Err(Error::param("command", format!("unknown command \"{other}\""))),
    };
    let mut report = ReportDocument::new(&config.command, config_hash(config), config.seed);
    report.entries = entries;
    Ok(RunOutcome { report, refuted })
}

/// Full CLI entry point: parse, dispatch, print, and return the exit
/// code (0 done, 2 certification refuted, 1 input error).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let config = match resolve_config(&cli.command) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match dispatch(&config) {
        Ok(outcome) => {
            print!("{}", emit_report(&outcome.report, config.format));
            if outcome.refuted {
                2
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
