//! CSV and JSON serialization of functions and reports.
//!
//! Function files start with `# alpha=<a> radius=<R> n=<N> scheme=<s>` (plus
//! `kind=spectral` for transforms) followed by `x,value` rows on the grid nodes.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};

use crate::certify::{Certification, SweepTolerances};
use crate::error::{Error, Result};
use crate::quadrature::{GridSpec, QuadratureGrid, SampledFunction, Scheme};
use crate::solver::{AprioriReport, SolverReport};
use crate::transform::SpectralFunction;

/// Seventeen significant digits: enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn header(grid: &QuadratureGrid, spectral: bool) -> String {
    let spec = grid.spec();
    let mut line = format!(
        "# alpha={} radius={} n={} scheme={} panels={} points={}",
        spec.alpha,
        spec.radius,
        grid.len(),
        spec.scheme,
        spec.panels,
        spec.points_per_panel
    );
    if spectral {
        line.push_str(" kind=spectral");
    }
    line
}

fn rows_csv(grid: &QuadratureGrid, values: &[f64], spectral: bool) -> String {
    let mut out = header(grid, spectral);
    out.push('\n');
    for (x, v) in grid.nodes().iter().zip(values) {
        let _ = writeln!(out, "{},{}", fmt_f64(*x), fmt_f64(*v));
    }
    out
}

pub fn sampled_to_csv(f: &SampledFunction) -> String {
    rows_csv(f.grid(), f.values(), false)
}

pub fn spectral_to_csv(f: &SpectralFunction) -> String {
    rows_csv(f.grid(), f.values(), true)
}

fn function_json(grid: &QuadratureGrid, values: &[f64], spectral: bool) -> Value {
    let axis = if spectral { "lambda" } else { "x" };
    let mut doc = json!({
        "metadata": { "grid": grid_json(grid), "kind": if spectral { "spectral" } else { "sampled" } },
        "values": values,
    });
    doc[axis] = json!(grid.nodes());
    doc
}

pub fn sampled_to_json(f: &SampledFunction) -> Value {
    function_json(f.grid(), f.values(), false)
}

pub fn spectral_to_json(f: &SpectralFunction) -> Value {
    function_json(f.grid(), f.values(), true)
}

pub fn grid_json(grid: &QuadratureGrid) -> Value {
    json!({
        "alpha": grid.alpha(),
        "radius": grid.radius(),
        "panels": grid.spec().panels,
        "points_per_panel": grid.spec().points_per_panel,
        "scheme": grid.scheme(),
        "n": grid.len(),
    })
}

/// Header fields of a function file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvHeader {
    pub alpha: f64,
    pub radius: f64,
    pub n: usize,
    pub scheme: Scheme,
    /// Panel layout, when present; enough to rebuild the grid.
    pub layout: Option<(usize, usize)>,
    pub spectral: bool,
}

impl CsvHeader {
    /// The grid this header describes, if it records its panel layout.
    pub fn grid_spec(&self) -> Option<GridSpec> {
        self.layout.map(|(panels, points_per_panel)| GridSpec {
            alpha: self.alpha,
            radius: self.radius,
            panels,
            points_per_panel,
            scheme: self.scheme,
        })
    }
}

fn parse_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), message: message.into() }
}

pub fn parse_header(line: &str, path: &Path) -> Result<CsvHeader> {
    let body =
        line.strip_prefix('#').ok_or_else(|| parse_error(path, "first line must be a `# key=value ...` header"))?;
    let mut fields = HashMap::new();
    for token in body.split_whitespace() {
        let (k, v) =
            token.split_once('=').ok_or_else(|| parse_error(path, format!("malformed header token `{token}`")))?;
        fields.insert(k, v);
    }
    fn field<T: std::str::FromStr>(fields: &HashMap<&str, &str>, key: &str, path: &Path) -> Result<T> {
        let raw = fields.get(key).ok_or_else(|| parse_error(path, format!("header is missing field `{key}`")))?;
        raw.parse().map_err(|_| parse_error(path, format!("header field `{key}` has bad value `{raw}`")))
    }
    let layout = match (fields.contains_key("panels"), fields.contains_key("points")) {
        (true, true) => Some((field(&fields, "panels", path)?, field(&fields, "points", path)?)),
        _ => None,
    };
    let spectral = match fields.get("kind") {
        None | Some(&"sampled") => false,
        Some(&"spectral") => true,
        Some(other) => return Err(parse_error(path, format!("unknown kind `{other}`"))),
    };
    Ok(CsvHeader {
        alpha: field(&fields, "alpha", path)?,
        radius: field(&fields, "radius", path)?,
        n: field(&fields, "n", path)?,
        scheme: field(&fields, "scheme", path)?,
        layout,
        spectral,
    })
}

/// Parses a function file without reference to a grid.
pub fn parse_function_csv(text: &str, path: &Path) -> Result<(CsvHeader, Vec<(f64, f64)>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let head = parse_header(lines.next().ok_or_else(|| parse_error(path, "empty file"))?, path)?;
    let rows = lines
        .enumerate()
        .map(|(i, line)| {
            let parsed = line.split_once(',').and_then(|(x, v)| Some((x.trim().parse().ok()?, v.trim().parse().ok()?)));
            parsed.ok_or_else(|| parse_error(path, format!("row {}: expected `x,value`, got `{line}`", i + 1)))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    if rows.len() != head.n {
        return Err(parse_error(path, format!("header says n={} but file has {} rows", head.n, rows.len())));
    }
    Ok((head, rows))
}

fn values_on_grid(text: &str, path: &Path, grid: &Arc<QuadratureGrid>, spectral: bool) -> Result<Vec<f64>> {
    let (head, rows) = parse_function_csv(text, path)?;
    if head.spectral != spectral {
        let want = if spectral { "spectral" } else { "sampled" };
        return Err(parse_error(path, format!("expected a {want} function file")));
    }
    if head.alpha != grid.alpha()
        || head.radius != grid.radius()
        || head.scheme != grid.scheme()
        || head.n != grid.len()
    {
        return Err(parse_error(
            path,
            format!(
                "header (alpha={} radius={} n={} scheme={}) does not match the grid (alpha={} radius={} n={} scheme={})",
                head.alpha,
                head.radius,
                head.n,
                head.scheme,
                grid.alpha(),
                grid.radius(),
                grid.len(),
                grid.scheme()
            ),
        ));
    }
    for (i, ((x, _), node)) in rows.iter().zip(grid.nodes()).enumerate() {
        if (x - node).abs() > 1e-14 * node.abs().max(1.0) {
            return Err(parse_error(path, format!("row {}: x={x} does not match grid node {node}", i + 1)));
        }
    }
    Ok(rows.into_iter().map(|(_, v)| v).collect())
}

pub fn sampled_from_csv(text: &str, path: &Path, grid: &Arc<QuadratureGrid>) -> Result<SampledFunction> {
    let values = values_on_grid(text, path, grid, false)?;
    SampledFunction::new(Arc::clone(grid), values).map_err(|e| parse_error(path, e.to_string()))
}

pub fn spectral_from_csv(text: &str, path: &Path, grid: &Arc<QuadratureGrid>) -> Result<SpectralFunction> {
    let values = values_on_grid(text, path, grid, true)?;
    SpectralFunction::new(Arc::clone(grid), values).map_err(|e| parse_error(path, e.to_string()))
}

pub fn read_sampled(path: &Path, grid: &Arc<QuadratureGrid>) -> Result<SampledFunction> {
    sampled_from_csv(&std::fs::read_to_string(path)?, path, grid)
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub const CERTIFICATION_COLUMNS: &str = "p,q,r,constant,lhs,rhs,ratio,prior_ratio,witness_ids,pass";

/// One row per trial and exponent choice, then a `summary` row carrying the maxima.
pub fn certification_to_csv(run: &Certification) -> String {
    let mut out = String::from(CERTIFICATION_COLUMNS);
    out.push('\n');
    for row in &run.rows {
        let [p, q, r] = row.exponents;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},\"{}\",{}",
            opt(p),
            opt(q),
            opt(r),
            fmt_f64(row.constant),
            fmt_f64(row.lhs),
            fmt_f64(row.rhs),
            fmt_f64(row.ratio),
            opt(row.prior_ratio),
            row.witness_ids.join(";"),
            row.pass
        );
    }
    let _ = writeln!(
        out,
        "summary,,,,,,{},{},\"{} {} trials={} rows={}\",{}",
        fmt_f64(run.max_ratio()),
        opt(run.max_prior_ratio()),
        run.suite,
        run.seed,
        run.trials,
        run.rows.len(),
        run.all_pass()
    );
    out
}

#[derive(Serialize)]
struct CertificationJson<'a> {
    metadata: Value,
    rows: &'a [crate::convolution::InequalityReport],
    summary: Value,
}

pub fn certification_to_json(run: &Certification, grid: &QuadratureGrid, tol: &SweepTolerances) -> Value {
    let doc = CertificationJson {
        metadata: json!({
            "suite": run.suite,
            "seed": run.seed,
            "trials": run.trials,
            "grid": grid_json(grid),
            "tolerances": tol,
        }),
        rows: &run.rows,
        summary: json!({
            "max_ratio": run.max_ratio(),
            "max_prior_ratio": run.max_prior_ratio(),
            "all_pass": run.all_pass(),
            "rows": run.rows.len(),
        }),
    };
    serde_json::to_value(doc).expect("report serializes")
}

fn solver_fields(report: &SolverReport, apriori: Option<&AprioriReport>) -> Vec<(&'static str, Value)> {
    vec![
        ("solvable", json!(report.solvable)),
        ("min_denominator", json!(report.min_denominator)),
        ("min_denominator_lambda", json!(report.min_denominator_lambda)),
        ("residual_l1", json!(report.residual_l1)),
        ("relative_residual", json!(report.relative_residual())),
        ("residual_ok", json!(report.solvable && report.residual_ok())),
        ("rhs_l1", json!(report.rhs_l1)),
        ("bound_lhs", json!(report.bound_lhs)),
        ("bound_rhs", json!(report.bound_rhs)),
        ("apriori", serde_json::to_value(apriori).expect("report serializes")),
        ("warnings", json!(report.warnings)),
    ]
}

pub fn solver_report_to_json(report: &SolverReport, apriori: Option<&AprioriReport>, grid: &QuadratureGrid) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("metadata".into(), json!({ "grid": grid_json(grid), "config": report.config }));
    for (k, v) in solver_fields(report, apriori) {
        map.insert(k.into(), v);
    }
    Value::Object(map)
}

/// `key,value` rows; nested values are written as compact JSON.
pub fn solver_report_to_csv(report: &SolverReport, apriori: Option<&AprioriReport>) -> String {
    let mut out = String::from("key,value\n");
    for (k, v) in solver_fields(report, apriori) {
        let cell = match v {
            Value::Number(n) => n.as_f64().map(fmt_f64).unwrap_or_else(|| n.to_string()),
            Value::Null => String::new(),
            Value::Bool(b) => b.to_string(),
            other => format!("\"{}\"", other.to_string().replace('"', "\"\"")),
        };
        let _ = writeln!(out, "{k},{cell}");
    }
    out
}

/// Nodes and weights of a grid, one `x,weight` row per node.
pub fn grid_to_csv(grid: &QuadratureGrid) -> String {
    rows_csv(grid, grid.mu_weights(), false).replacen('\n', "\n# columns: x,mu_weight\n", 1)
}

pub fn grid_to_json(grid: &QuadratureGrid) -> Value {
    json!({
        "metadata": grid_json(grid),
        "mass": grid.mass(),
        "x": grid.nodes(),
        "mu_weights": grid.mu_weights(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON value serializes");
    s.push('\n');
    s
}
