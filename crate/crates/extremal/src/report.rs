//! Run reports: an ordered tree of verdicts and tagged numeric claims
//! with provenance, emitted as canonical JSON or as a CSV summary.
//! Every measured quantity is a [`Field::Claim`] carrying the method
//! tag of the routine that produced it; bare floats are inputs echoed
//! for the record, not claims.

use crate::doc::{self, format_number, push_string_literal};
use crate::error::{Error, Result};
use crate::mapping::{Mapping, MethodTag};
use serde_json::{Map, Value};

/// One node of a report entry.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Bool(bool),
    UInt(u64),
    /// Plain datum (an echoed parameter), 17 significant digits.
    Float(f64),
    /// Measured quantity with the method that measured it.
    Claim { value: f64, method: MethodTag },
    Text(String),
    Vector(Vec<f64>),
    Matrix(Vec<Vec<f64>>),
    List(Vec<Field>),
    Object(Vec<(String, Field)>),
    Mapping(Box<Mapping>),
}

impl Field {
    pub fn claim(value: f64, method: MethodTag) -> Field {
        Field::Claim { value, method }
    }

    pub fn exact(value: f64) -> Field {
        Field::Claim {
            value,
            method: MethodTag::Exact,
        }
    }

    pub fn text(s: impl Into<String>) -> Field {
        Field::Text(s.into())
    }

    pub fn vector(v: &crate::space::Vector) -> Field {
        Field::Vector(v.coords.clone())
    }

    pub fn matrix(m: &crate::linalg::Matrix) -> Field {
        Field::Matrix(m.to_rows())
    }

    pub fn mapping(m: &Mapping) -> Field {
        Field::Mapping(Box::new(m.clone()))
    }
}

/// One verdict with its supporting fields, in emission order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub verdict: String,
    pub fields: Vec<(String, Field)>,
}

impl ReportEntry {
    pub fn new(verdict: impl Into<String>) -> ReportEntry {
        ReportEntry {
            verdict: verdict.into(),
            fields: Vec::new(),
        }
    }

    pub fn push(&mut self, key: impl Into<String>, field: Field) {
        self.fields.push((key.into(), field));
    }

    pub fn with(mut self, key: impl Into<String>, field: Field) -> ReportEntry {
        self.push(key, field);
        self
    }
}

/// A full run report with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub command: String,
    pub version: String,
    pub config_hash: String,
    pub seed: Option<u64>,
    pub entries: Vec<ReportEntry>,
}

impl ReportDocument {
    pub fn new(command: impl Into<String>, config_hash: impl Into<String>, seed: Option<u64>) -> ReportDocument {
        ReportDocument {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash.into(),
            seed,
            entries: Vec::new(),
        }
    }
}

/// Output syntax for [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    CsvSummary,
}

fn push_field(out: &mut String, field: &Field) {
    match field {
        Field::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Field::UInt(n) => out.push_str(&n.to_string()),
        Field::Float(x) => out.push_str(&format_number(*x)),
        Field::Claim { value, method } => {
            out.push_str("{\"value\":");
            out.push_str(&format_number(*value));
            out.push_str(",\"method\":");
            push_string_literal(out, &method.label());
            out.push('}');
        }
        Field::Text(s) => push_string_literal(out, s),
        Field::Vector(v) => {
            out.push('[');
            for (i, x) in v.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&format_number(*x));
            }
            out.push(']');
        }
        Field::Matrix(rows) => {
            out.push('[');
            for (i, row) in rows.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('[');
                for (j, x) in row.iter().enumerate() {
                    if j > 0 {
                        out.push(',');
                    }
                    out.push_str(&format_number(*x));
                }
                out.push(']');
            }
            out.push(']');
        }
        Field::List(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                push_field(out, item);
            }
            out.push(']');
        }
        Field::Object(pairs) => {
            out.push('{');
            for (i, (key, value)) in pairs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                push_string_literal(out, key);
                out.push(':');
                push_field(out, value);
            }
            out.push('}');
        }
        Field::Mapping(m) => {
            out.push_str("{\"space\":");
            doc::push_space(out, m.space());
            out.push_str(",\"expr\":");
            doc::push_expr(out, m.expr());
            out.push('}');
        }
    }
}

fn emit_json(report: &ReportDocument) -> String {
    let mut out = String::new();
    out.push_str("{\"schema_version\":\"");
    out.push_str(doc::SCHEMA_VERSION);
    out.push_str("\",\"command\":");
    push_string_literal(&mut out, &report.command);
    out.push_str(",\"version\":");
    push_string_literal(&mut out, &report.version);
    out.push_str(",\"config_hash\":");
    push_string_literal(&mut out, &report.config_hash);
    if let Some(seed) = report.seed {
        out.push_str(",\"seed\":");
        out.push_str(&seed.to_string());
    }
    out.push_str(",\"entries\":[");
    for (i, entry) in report.entries.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str("{\"verdict\":");
        push_string_literal(&mut out, &entry.verdict);
        out.push_str(",\"fields\":");
        push_field(&mut out, &Field::Object(entry.fields.clone()));
        out.push('}');
    }
    out.push_str("]}");
    out.push('\n');
    out
}

fn collect_claims(prefix: &str, field: &Field, claims: &mut Vec<(String, f64, MethodTag)>) {
    match field {
        Field::Claim { value, method } => claims.push((prefix.to_string(), *value, *method)),
        Field::Object(pairs) => {
            for (key, value) in pairs {
                collect_claims(&format!("{prefix}.{key}"), value, claims);
            }
        }
        Field::List(items) => {
            for (i, item) in items.iter().enumerate() {
                collect_claims(&format!("{prefix}[{i}]"), item, claims);
            }
        }
        _ => {}
    }
}

fn csv_quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per verdict: entry index, verdict, and every numeric claim
/// flattened to `path=value@METHOD` with its tag preserved.
fn emit_csv(report: &ReportDocument) -> String {
    let mut out = String::from("entry,verdict,claims\n");
    for (i, entry) in report.entries.iter().enumerate() {
        let mut claims = Vec::new();
        for (key, field) in &entry.fields {
            collect_claims(key, field, &mut claims);
        }
        let joined = claims
            .iter()
            .map(|(path, value, method)| {
                format!("{path}={}@{}", format_number(*value), method.label())
            })
            .collect::<Vec<_>>()
            .join("; ");
        out.push_str(&format!(
            "{i},{},{}\n",
            csv_quote(&entry.verdict),
            csv_quote(&joined)
        ));
    }
    out
}

/// Render a report. JSON is canonical and parseable by
/// [`parse_report`]; the CSV summary is write-only.
pub fn emit_report(report: &ReportDocument, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => emit_json(report),
        ReportFormat::CsvSummary => emit_csv(report),
    }
}

fn parse_err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        message: message.into(),
    }
}

fn parse_method_tag(s: &str, path: &str) -> Result<MethodTag> {
    if s == "EXACT" {
        return Ok(MethodTag::Exact);
    }
    if let Some(rest) = s.strip_prefix("SAMPLED(").and_then(|r| r.strip_suffix(')')) {
        let n = rest
            .parse::<usize>()
            .map_err(|_| parse_err(path, format!("bad sample count \"{rest}\"")))?;
        return Ok(MethodTag::Sampled(n));
    }
    if let Some(rest) = s.strip_prefix("SCANNED(").and_then(|r| r.strip_suffix(')')) {
        let step = rest
            .parse::<f64>()
            .map_err(|_| parse_err(path, format!("bad scan step \"{rest}\"")))?;
        return Ok(MethodTag::Scanned(step));
    }
    Err(parse_err(path, format!("unknown method tag \"{s}\"")))
}

fn number_list(v: &Value) -> Option<Vec<f64>> {
    let arr = v.as_array()?;
    if arr.is_empty() {
        return None;
    }
    let mut out = Vec::with_capacity(arr.len());
    for x in arr {
        out.push(x.as_f64()?);
    }
    Some(out)
}

fn parse_field(v: &Value, path: &str) -> Result<Field> {
    match v {
        Value::Bool(b) => Ok(Field::Bool(*b)),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                Ok(Field::UInt(u))
            } else if let Some(x) = n.as_f64() {
                if !x.is_finite() {
                    return Err(parse_err(path, "expected finite number"));
                }
                Ok(Field::Float(x))
            } else {
                Err(parse_err(path, "unsupported number"))
            }
        }
        Value::String(s) => Ok(Field::Text(s.clone())),
        Value::Array(items) => {
            // nonempty numeric arrays are vectors, arrays of them are
            // matrices, anything else is a general list
            if let Some(coords) = number_list(v) {
                return Ok(Field::Vector(coords));
            }
            if !items.is_empty() {
                let rows: Option<Vec<Vec<f64>>> = items.iter().map(number_list).collect();
                if let Some(rows) = rows {
                    return Ok(Field::Matrix(rows));
                }
            }
            items
                .iter()
                .enumerate()
                .map(|(i, item)| parse_field(item, &format!("{path}[{i}]")))
                .collect::<Result<Vec<_>>>()
                .map(Field::List)
        }
        Value::Object(m) => {
            if m.len() == 2 && m.contains_key("value") && m.contains_key("method") {
                let value = m["value"]
                    .as_f64()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| parse_err(&format!("{path}.value"), "expected finite number"))?;
                let tag_path = format!("{path}.method");
                let method = m["method"]
                    .as_str()
                    .ok_or_else(|| parse_err(&tag_path, "expected string"))?;
                return Ok(Field::Claim {
                    value,
                    method: parse_method_tag(method, &tag_path)?,
                });
            }
            if m.len() == 2 && m.contains_key("space") && m.contains_key("expr") {
                return Ok(Field::Mapping(Box::new(doc::parse_mapping_value(v, path)?)));
            }
            let mut pairs = Vec::with_capacity(m.len());
            for (key, value) in m {
                pairs.push((key.clone(), parse_field(value, &format!("{path}.{key}"))?));
            }
            Ok(Field::Object(pairs))
        }
        Value::Null => Err(parse_err(path, "null is not a report field")),
    }
}

/// Parse a JSON report produced by [`emit_report`].
pub fn parse_report(text: &str) -> Result<ReportDocument> {
    let value: Value = serde_json::from_str(text).map_err(|e| parse_err("$", e.to_string()))?;
    let m: &Map<String, Value> = value
        .as_object()
        .ok_or_else(|| parse_err("$", "expected object"))?;
    for key in m.keys() {
        if !["schema_version", "command", "version", "config_hash", "seed", "entries"]
            .contains(&key.as_str())
        {
            return Err(parse_err(key, "unknown field"));
        }
    }
    let version_of = |key: &str| -> Result<String> {
        m.get(key)
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| parse_err(key, "expected string"))
    };
    let schema = version_of("schema_version")?;
    if schema != doc::SCHEMA_VERSION {
        return Err(parse_err(
            "schema_version",
            format!("unsupported version \"{schema}\""),
        ));
    }
    let seed = match m.get("seed") {
        None => None,
        Some(v) => Some(
            v.as_u64()
                .ok_or_else(|| parse_err("seed", "expected unsigned integer"))?,
        ),
    };
    let entries_value = m
        .get("entries")
        .ok_or_else(|| parse_err("$", "missing field \"entries\""))?;
    let raw_entries = entries_value
        .as_array()
        .ok_or_else(|| parse_err("entries", "expected array"))?;
    let mut entries = Vec::with_capacity(raw_entries.len());
    for (i, raw) in raw_entries.iter().enumerate() {
        let path = format!("entries[{i}]");
        let em = raw
            .as_object()
            .ok_or_else(|| parse_err(&path, "expected object"))?;
        let verdict = em
            .get("verdict")
            .and_then(Value::as_str)
            .ok_or_else(|| parse_err(&format!("{path}.verdict"), "expected string"))?;
        let fields_value = em
            .get("fields")
            .ok_or_else(|| parse_err(&path, "missing field \"fields\""))?;
        let fm = fields_value
            .as_object()
            .ok_or_else(|| parse_err(&format!("{path}.fields"), "expected object"))?;
        let mut fields = Vec::with_capacity(fm.len());
        for (key, value) in fm {
            fields.push((
                key.clone(),
                parse_field(value, &format!("{path}.fields.{key}"))?,
            ));
        }
        entries.push(ReportEntry {
            verdict: verdict.to_string(),
            fields,
        });
    }
    Ok(ReportDocument {
        command: version_of("command")?,
        version: version_of("version")?,
        config_hash: version_of("config_hash")?,
        seed,
        entries,
    })
}
