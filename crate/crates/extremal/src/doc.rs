//! JSON documents for mappings. Emission is canonical: fixed key
//! order, no whitespace, every float printed with 17 significant
//! digits so parsing recovers it bit for bit. Parsing validates the
//! schema and every mapping invariant, addressing errors by path.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::mapping::{Expr, Mapping};
use crate::space::{NormTag, SpaceContext, Vector};
use serde_json::{Map, Value};

/// Version stamped into every emitted document.
pub const SCHEMA_VERSION: &str = "1";

/// Scientific notation with a 16-digit fraction: 17 significant
/// digits, enough to reproduce any finite double exactly.
pub fn format_number(x: f64) -> String {
    assert!(x.is_finite(), "document numbers must be finite");
    format!("{x:.16e}")
}

pub(crate) fn push_string_literal(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

fn push_vector(out: &mut String, v: &Vector) {
    out.push('[');
    for (i, x) in v.coords.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format_number(*x));
    }
    out.push(']');
}

fn push_matrix(out: &mut String, m: &Matrix) {
    out.push('[');
    for i in 0..m.rows() {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for (j, x) in m.row(i).iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format_number(*x));
        }
        out.push(']');
    }
    out.push(']');
}

fn push_vector_list(out: &mut String, vs: &[Vector]) {
    out.push('[');
    for (i, v) in vs.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        push_vector(out, v);
    }
    out.push(']');
}

pub(crate) fn push_space(out: &mut String, space: &SpaceContext) {
    out.push_str(&format!(
        "{{\"dim\":{},\"norm\":\"{}\"}}",
        space.dim,
        space.norm.as_str()
    ));
}

pub(crate) fn push_expr(out: &mut String, expr: &Expr) {
    match expr {
        Expr::Linear { matrix } => {
            out.push_str("{\"tag\":\"linear\",\"matrix\":");
            push_matrix(out, matrix);
            out.push('}');
        }
        Expr::Affine { matrix, offset } => {
            out.push_str("{\"tag\":\"affine\",\"matrix\":");
            push_matrix(out, matrix);
            out.push_str(",\"offset\":");
            push_vector(out, offset);
            out.push('}');
        }
        Expr::Grid { samples, values } => {
            out.push_str("{\"tag\":\"grid\",\"samples\":");
            push_vector_list(out, samples);
            out.push_str(",\"values\":");
            push_vector_list(out, values);
            out.push('}');
        }
        Expr::Combo { lambda, left, right } => {
            out.push_str("{\"tag\":\"combo\",\"lambda\":");
            out.push_str(&format_number(*lambda));
            out.push_str(",\"left\":");
            push_expr(out, left);
            out.push_str(",\"right\":");
            push_expr(out, right);
            out.push('}');
        }
        Expr::Retract { inner, eta, center } => {
            out.push_str("{\"tag\":\"retract\",\"inner\":");
            push_expr(out, inner);
            out.push_str(",\"eta\":");
            out.push_str(&format_number(*eta));
            out.push_str(",\"center\":");
            push_vector(out, center);
            out.push('}');
        }
        Expr::Translate { inner, offset } => {
            out.push_str("{\"tag\":\"translate\",\"inner\":");
            push_expr(out, inner);
            out.push_str(",\"offset\":");
            push_vector(out, offset);
            out.push('}');
        }
    }
}

/// Canonical single-line document for a mapping.
pub fn emit_mapping(m: &Mapping) -> String {
    let mut out = String::new();
    out.push_str("{\"schema_version\":\"");
    out.push_str(SCHEMA_VERSION);
    out.push_str("\",\"space\":");
    push_space(&mut out, m.space());
    out.push_str(",\"expr\":");
    push_expr(&mut out, m.expr());
    out.push('}');
    out
}

fn parse_err(path: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        message: message.into(),
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| parse_err(path, "expected object"))
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    m.get(key)
        .ok_or_else(|| parse_err(path, format!("missing field \"{key}\"")))
}

fn check_keys(m: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    for key in m.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(parse_err(&join(path, key), "unknown field"));
        }
    }
    Ok(())
}

fn as_f64(v: &Value, path: &str) -> Result<f64> {
    match v.as_f64() {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(parse_err(path, "expected finite number")),
    }
}

fn as_vector(v: &Value, path: &str) -> Result<Vector> {
    let arr = v
        .as_array()
        .ok_or_else(|| parse_err(path, "expected array of numbers"))?;
    let mut coords = Vec::with_capacity(arr.len());
    for (i, x) in arr.iter().enumerate() {
        coords.push(as_f64(x, &format!("{path}[{i}]"))?);
    }
    Vector::new(coords).map_err(|e| parse_err(path, e.to_string()))
}

fn as_matrix(v: &Value, path: &str) -> Result<Matrix> {
    let arr = v
        .as_array()
        .ok_or_else(|| parse_err(path, "expected array of rows"))?;
    let mut rows = Vec::with_capacity(arr.len());
    for (i, row) in arr.iter().enumerate() {
        rows.push(as_vector(row, &format!("{path}[{i}]"))?.coords);
    }
    Matrix::from_rows(rows).map_err(|e| parse_err(path, e.to_string()))
}

fn as_vector_list(v: &Value, path: &str) -> Result<Vec<Vector>> {
    let arr = v
        .as_array()
        .ok_or_else(|| parse_err(path, "expected array of vectors"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| as_vector(x, &format!("{path}[{i}]")))
        .collect()
}

pub(crate) fn parse_space(v: &Value, path: &str) -> Result<SpaceContext> {
    let m = as_object(v, path)?;
    check_keys(m, &["dim", "norm"], path)?;
    let dim_path = join(path, "dim");
    let dim = field(m, "dim", path)?
        .as_u64()
        .ok_or_else(|| parse_err(&dim_path, "expected positive integer"))?;
    let norm_path = join(path, "norm");
    let norm_name = field(m, "norm", path)?
        .as_str()
        .ok_or_else(|| parse_err(&norm_path, "expected string"))?;
    let norm = NormTag::parse(norm_name)
        .ok_or_else(|| parse_err(&norm_path, format!("unknown norm \"{norm_name}\"")))?;
    SpaceContext::new(dim as usize, norm).map_err(|e| parse_err(path, e.to_string()))
}

fn parse_expr(v: &Value, path: &str, space: SpaceContext) -> Result<Mapping> {
    let m = as_object(v, path)?;
    let tag_path = join(path, "tag");
    let tag = field(m, "tag", path)?
        .as_str()
        .ok_or_else(|| parse_err(&tag_path, "expected string"))?;
    match tag {
        "linear" => {
            check_keys(m, &["tag", "matrix"], path)?;
            let matrix = as_matrix(field(m, "matrix", path)?, &join(path, "matrix"))?;
            Mapping::linear(space, matrix).map_err(|e| parse_err(path, e.to_string()))
        }
        "affine" => {
            check_keys(m, &["tag", "matrix", "offset"], path)?;
            let matrix = as_matrix(field(m, "matrix", path)?, &join(path, "matrix"))?;
            let offset = as_vector(field(m, "offset", path)?, &join(path, "offset"))?;
            Mapping::affine(space, matrix, offset).map_err(|e| parse_err(path, e.to_string()))
        }
        "grid" => {
            check_keys(m, &["tag", "samples", "values"], path)?;
            let samples = as_vector_list(field(m, "samples", path)?, &join(path, "samples"))?;
            let values = as_vector_list(field(m, "values", path)?, &join(path, "values"))?;
            Mapping::grid(space, samples, values).map_err(|e| parse_err(path, e.to_string()))
        }
        "combo" => {
            check_keys(m, &["tag", "lambda", "left", "right"], path)?;
            let lambda_path = join(path, "lambda");
            let lambda = as_f64(field(m, "lambda", path)?, &lambda_path)?;
            if !(0.0..=1.0).contains(&lambda) {
                return Err(parse_err(&lambda_path, "lambda out of [0,1]"));
            }
            let left = parse_expr(field(m, "left", path)?, &join(path, "left"), space)?;
            let right = parse_expr(field(m, "right", path)?, &join(path, "right"), space)?;
            Mapping::convex_combo(lambda, left, right).map_err(|e| parse_err(path, e.to_string()))
        }
        "retract" => {
            check_keys(m, &["tag", "inner", "eta", "center"], path)?;
            let eta_path = join(path, "eta");
            let eta = as_f64(field(m, "eta", path)?, &eta_path)?;
            if eta <= 0.0 {
                return Err(parse_err(&eta_path, "eta must be positive"));
            }
            let inner = parse_expr(field(m, "inner", path)?, &join(path, "inner"), space)?;
            let center = as_vector(field(m, "center", path)?, &join(path, "center"))?;
            Mapping::retract_compose(inner, eta, center).map_err(|e| parse_err(path, e.to_string()))
        }
        "translate" => {
            check_keys(m, &["tag", "inner", "offset"], path)?;
            let inner = parse_expr(field(m, "inner", path)?, &join(path, "inner"), space)?;
            let offset = as_vector(field(m, "offset", path)?, &join(path, "offset"))?;
            Mapping::translate(inner, offset).map_err(|e| parse_err(path, e.to_string()))
        }
        other => Err(parse_err(&tag_path, format!("unknown tag \"{other}\""))),
    }
}

/// Parse a `{space, expr}` object at `prefix` inside a larger
/// document. `schema_version` may be omitted but must match when
/// present.
pub(crate) fn parse_mapping_value(v: &Value, prefix: &str) -> Result<Mapping> {
    let root = if prefix.is_empty() { "$" } else { prefix };
    let m = as_object(v, root)?;
    check_keys(m, &["schema_version", "space", "expr"], prefix)?;
    if let Some(v) = m.get("schema_version") {
        let path = join(prefix, "schema_version");
        let got = v.as_str().ok_or_else(|| parse_err(&path, "expected string"))?;
        if got != SCHEMA_VERSION {
            return Err(parse_err(&path, format!("unsupported version \"{got}\"")));
        }
    }
    let space = parse_space(field(m, "space", root)?, &join(prefix, "space"))?;
    parse_expr(field(m, "expr", root)?, &join(prefix, "expr"), space)
}

/// Parse a mapping document, enforcing the schema and every mapping
/// invariant. Errors carry the JSON path of the offending node.
pub fn parse_mapping(text: &str) -> Result<Mapping> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| parse_err("$", e.to_string()))?;
    parse_mapping_value(&value, "")
}
