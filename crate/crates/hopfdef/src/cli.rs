//! Package files, the subcommands behind the `hopfdef` binary, and their
//! JSON reports.
//!
//! A package file is a list of `key = value` lines; matrices are JSON
//! arrays of rows whose entries are integers or `"n/d"` strings. The full
//! grammar is in `docs/package-format.md`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cohomology_cup::{cohomology, CupError};
use crate::complexes::{
    build_view, compare_raw, max_space_dim, plane, total_complex, verify_simplicial_identities, verify_squares,
    ComplexError, CornerMode, Plane,
};
use crate::deformation::{
    check_infinitesimal, extend_to, rigidity_probe, DeformationContext, DeformationError, Part,
};
use crate::exact_linalg::{ExactMatrix, ExactScalar, FieldSpec, LinalgError};
use crate::hopf_structures::{
    ActionData, AlgebraData, BialgebraData, CoactionData, CoalgebraData, Kind, StructureError, StructurePackage,
};
use crate::tensor_calculus::sp_from_coords;

pub const FORMAT_VERSION: u32 = 1;
pub const TOOL: &str = "hopfdef";
pub const DEFAULT_CEILING: usize = 20000;

#[derive(Debug, Error)]
pub enum CliError {
    /// `line` is 0 for problems with the file as a whole.
    #[error("{}", if *line == 0 { msg.clone() } else { format!("line {line}: {msg}") })]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Cup(#[from] CupError),
    #[error(transparent)]
    Deformation(#[from] DeformationError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("a cochain space of dimension {estimate} would be needed (ceiling {ceiling}); raise --ceiling or lower the degree")]
    Infeasible { estimate: usize, ceiling: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible { .. } => 4,
            CliError::Structure(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn perr(line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse { line, msg: msg.into() }
}

/// `key = value` statements with the line each starts on. A value
/// continues over following lines until its brackets balance.
fn statements(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    let mut open: Option<(usize, String, String, i32)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if let Some((start, key, mut value, depth)) = open.take() {
            let depth = depth + bracket_depth(body);
            value.push(' ');
            value.push_str(body);
            if depth > 0 {
                open = Some((start, key, value, depth));
            } else {
                out.push((start, key, value));
            }
            continue;
        }
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| perr(line, "expected `key = value`"))?;
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if key.is_empty() {
            return Err(perr(line, "missing key"));
        }
        let depth = bracket_depth(&value);
        if depth > 0 {
            open = Some((line, key, value, depth));
        } else {
            out.push((line, key, value));
        }
    }
    if let Some((start, key, _, _)) = open {
        return Err(perr(start, format!("unclosed matrix for `{key}`")));
    }
    Ok(out)
}

fn bracket_depth(s: &str) -> i32 {
    s.chars().map(|c| (c == '[') as i32 - (c == ']') as i32).sum()
}

const KEYS: [&str; 17] = [
    "format", "name", "kind", "field", "h.dim", "h.mul", "h.comul", "h.unit", "h.counit", "h.antipode", "a.dim",
    "a.mul", "a.unit", "a.comul", "a.counit", "action", "coaction",
];

struct Fields {
    map: BTreeMap<String, (usize, String)>,
}

impl Fields {
    fn parse(text: &str, allowed: &[&str]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (line, key, value) in statements(text)? {
            if !allowed.contains(&key.as_str()) {
                return Err(perr(line, format!("unknown key `{key}`")));
            }
            if map.insert(key.clone(), (line, value)).is_some() {
                return Err(perr(line, format!("`{key}` given twice")));
            }
        }
        Ok(Fields { map })
    }

    fn get(&self, key: &str) -> Option<&(usize, String)> {
        self.map.get(key)
    }

    fn need(&self, key: &str) -> Result<&(usize, String)> {
        self.get(key).ok_or_else(|| perr(0, format!("missing `{key}`")))
    }

    fn usize(&self, key: &str) -> Result<usize> {
        let (line, v) = self.need(key)?;
        v.parse().map_err(|_| perr(*line, format!("`{key}` must be a non-negative integer")))
    }

    fn matrix(&self, f: FieldSpec, key: &str, rows: usize, cols: usize) -> Result<ExactMatrix> {
        let (line, v) = self.need(key)?;
        parse_matrix(f, *line, key, v, rows, cols)
    }

    fn opt_matrix(&self, f: FieldSpec, key: &str, rows: usize, cols: usize) -> Result<Option<ExactMatrix>> {
        match self.get(key) {
            Some((line, v)) => parse_matrix(f, *line, key, v, rows, cols).map(Some),
            None => Ok(None),
        }
    }
}

fn parse_scalar(f: FieldSpec, line: usize, key: &str, v: &Value) -> Result<ExactScalar> {
    let text = match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(perr(line, format!("`{key}`: entries must be integers or \"n/d\" strings, got {v}"))),
    };
    f.parse(&text).map_err(|e| perr(line, format!("`{key}`: {e}")))
}

fn parse_matrix(f: FieldSpec, line: usize, key: &str, text: &str, rows: usize, cols: usize) -> Result<ExactMatrix> {
    let v: Vec<Vec<Value>> =
        serde_json::from_str(text).map_err(|e| perr(line, format!("`{key}` is not a matrix: {e}")))?;
    if v.len() != rows || v.iter().any(|r| r.len() != cols) {
        let got_cols = v.first().map_or(0, |r| r.len());
        return Err(perr(line, format!("`{key}` must be {rows} x {cols}, got {} x {got_cols}", v.len())));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for row in &v {
        for x in row {
            data.push(parse_scalar(f, line, key, x)?);
        }
    }
    Ok(ExactMatrix::from_entries(f, rows, cols, data)?)
}

/// Parses a package file. With `field` the constants are read over that
/// field instead of the file's own.
pub fn parse_package(text: &str, field: Option<FieldSpec>) -> Result<StructurePackage> {
    let fl = Fields::parse(text, &KEYS)?;
    let format = fl.usize("format")?;
    if format != FORMAT_VERSION as usize {
        return Err(perr(fl.need("format")?.0, format!("unsupported format {format}")));
    }
    let (kline, ktext) = fl.need("kind")?;
    let kind = Kind::parse(ktext).ok_or_else(|| perr(*kline, format!("unknown kind `{ktext}`")))?;
    let f = match field {
        Some(f) => f,
        None => {
            let c = fl.usize("field")?;
            let line = fl.need("field")?.0;
            FieldSpec::from_characteristic(c as u64).map_err(|e| perr(line, e.to_string()))?
        }
    };
    let name = fl.get("name").map_or("package".to_string(), |(_, v)| v.clone());
    let h = fl.usize("h.dim")?;
    let a = fl.usize("a.dim")?;
    let hb = BialgebraData::new(
        f,
        h,
        fl.matrix(f, "h.mul", h, h * h)?,
        fl.matrix(f, "h.comul", h * h, h)?,
        fl.matrix(f, "h.unit", h, 1)?,
        fl.matrix(f, "h.counit", 1, h)?,
        fl.opt_matrix(f, "h.antipode", h, h)?,
    )?;
    let algebra = if kind.uses_algebra() {
        Some(AlgebraData::new(f, a, fl.matrix(f, "a.mul", a, a * a)?, fl.opt_matrix(f, "a.unit", a, 1)?)?)
    } else {
        None
    };
    let coalgebra = if kind.uses_coalgebra() {
        Some(CoalgebraData::new(f, a, fl.matrix(f, "a.comul", a * a, a)?, fl.opt_matrix(f, "a.counit", 1, a)?)?)
    } else {
        None
    };
    let (action, coaction) = if kind.uses_action() {
        (Some(ActionData::new(h, a, fl.matrix(f, "action", a, h * a)?)?), None)
    } else {
        (None, Some(CoactionData::new(h, a, fl.matrix(f, "coaction", h * a, a)?)?))
    };
    Ok(StructurePackage { name, kind, h: hb, algebra, coalgebra, action, coaction })
}

fn write_matrix(out: &mut String, key: &str, m: &ExactMatrix) {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = m
                .row(i)
                .iter()
                .map(|x| {
                    let s = x.to_string();
                    if s.contains('/') {
                        format!("\"{s}\"")
                    } else {
                        s
                    }
                })
                .collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    if rows.len() <= 1 {
        let _ = writeln!(out, "{key} = [{}]", rows.join(", "));
    } else {
        let _ = writeln!(out, "{key} = [\n  {}\n]", rows.join(",\n  "));
    }
}

/// Canonical package file text.
pub fn write_package(pkg: &StructurePackage) -> String {
    let f = pkg.field();
    let mut out = String::new();
    let _ = writeln!(out, "format = {FORMAT_VERSION}");
    let _ = writeln!(out, "name = {}", pkg.name);
    let _ = writeln!(out, "kind = {}", pkg.kind);
    let _ = writeln!(out, "field = {}", f.characteristic());
    let _ = writeln!(out, "h.dim = {}", pkg.h.dim());
    write_matrix(&mut out, "h.mul", pkg.h.mul().matrix());
    write_matrix(&mut out, "h.comul", pkg.h.comul().matrix());
    write_matrix(&mut out, "h.unit", pkg.h.unit().matrix());
    write_matrix(&mut out, "h.counit", pkg.h.counit().matrix());
    if let Some(s) = pkg.h.antipode() {
        write_matrix(&mut out, "h.antipode", s.matrix());
    }
    let _ = writeln!(out, "a.dim = {}", pkg.a_dim());
    if let Some(alg) = &pkg.algebra {
        write_matrix(&mut out, "a.mul", alg.mul().matrix());
        if let Some(u) = alg.unit() {
            write_matrix(&mut out, "a.unit", u.matrix());
        }
    }
    if let Some(c) = &pkg.coalgebra {
        write_matrix(&mut out, "a.comul", c.comul().matrix());
        if let Some(e) = c.counit() {
            write_matrix(&mut out, "a.counit", e.matrix());
        }
    }
    if let Some(x) = &pkg.action {
        write_matrix(&mut out, "action", x.map().matrix());
    }
    if let Some(x) = &pkg.coaction {
        write_matrix(&mut out, "coaction", x.map().matrix());
    }
    out
}

/// SHA-256 of the canonical text, in hex.
pub fn package_hash(pkg: &StructurePackage) -> String {
    let digest = Sha256::digest(write_package(pkg).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// A finished command: the JSON report and the process exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
}

impl Outcome {
    /// Pretty JSON with sorted keys and a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("json");
        s.push('\n');
        s
    }
}

fn envelope(pkg: &StructurePackage, command: &str, params: Value, status: &str, result: Value) -> Value {
    json!({
        "tool": TOOL,
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "package": {
            "name": pkg.name,
            "kind": pkg.kind.to_string(),
            "field": pkg.field().to_string(),
            "hash": package_hash(pkg),
        },
        "params": params,
        "status": status,
        "result": result,
    })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("json")
}

/// Nonzero entries as `[index, "value"]` pairs.
pub fn sparse_json(v: &[ExactScalar]) -> Value {
    Value::Array(
        v.iter()
            .enumerate()
            .filter(|(_, x)| x.to_string() != "0")
            .map(|(i, x)| json!([i, x.to_string()]))
            .collect(),
    )
}

fn sv_json(v: &[(usize, ExactScalar)]) -> Value {
    Value::Array(v.iter().map(|(i, x)| json!([i, x.to_string()])).collect())
}

fn resolve_kind(pkg: &StructurePackage, kind: Option<Kind>) -> Result<Kind> {
    let kind = kind.unwrap_or(pkg.kind);
    if !pkg.kind.views().contains(&kind) {
        return Err(CliError::Usage(format!("a {} package cannot be read as {kind}", pkg.kind)));
    }
    Ok(kind)
}

fn guard(pkg: &StructurePackage, kind: Kind, cutoff: usize, ceiling: usize) -> Result<()> {
    let estimate = max_space_dim(kind, pkg.h.dim(), pkg.a_dim(), cutoff);
    if estimate > ceiling {
        return Err(CliError::Infeasible { estimate, ceiling });
    }
    Ok(())
}

/// Refuses packages that fail their axioms, with the validator's report.
fn require_valid(pkg: &StructurePackage, command: &str, params: Value) -> Result<Option<Outcome>> {
    let report = pkg.validate()?;
    if report.passed() {
        return Ok(None);
    }
    let result = json!({ "validation": to_value(&report) });
    Ok(Some(Outcome { report: envelope(pkg, command, params, "invalid-package", result), exit_code: 2 }))
}

/// Per-axiom validation.
pub fn cmd_validate(pkg: &StructurePackage) -> Result<Outcome> {
    let report = pkg.validate()?;
    let passed = report.passed();
    let status = if passed { "pass" } else { "fail" };
    let out = envelope(pkg, "validate", json!({}), status, json!({ "checks": to_value(&report.checks) }));
    Ok(Outcome { report: out, exit_code: if passed { 0 } else { 2 } })
}

/// Clause identities, squares, anticommutation and total `d^2`, plus the
/// boundary-plane comparisons on tricomplexes.
pub fn cmd_verify(pkg: &StructurePackage, kind: Option<Kind>, cutoff: usize, ceiling: usize) -> Result<Outcome> {
    let kind = resolve_kind(pkg, kind)?;
    let params = json!({ "kind": kind.to_string(), "cutoff": cutoff, "ceiling": ceiling });
    if let Some(o) = require_valid(pkg, "verify", params.clone())? {
        return Ok(o);
    }
    guard(pkg, kind, cutoff, ceiling)?;
    let asm = build_view(pkg, kind, cutoff)?;
    let mut report = verify_simplicial_identities(&asm);
    report.extend(verify_squares(&asm));
    let mut planes = Vec::new();
    if kind.is_tricomplex() {
        for which in [Plane::Q1, Plane::P1] {
            let bk = which.bicomplex_kind(kind).expect("tricomplex plane");
            let extracted = plane(&asm, which)?;
            let direct = build_view(pkg, bk, cutoff)?;
            let mismatches = compare_raw(&extracted, &direct);
            planes.push(json!({
                "plane": format!("{which:?}"),
                "equals": bk.to_string(),
                "passed": mismatches.is_empty(),
                "mismatches": to_value(&mismatches),
            }));
        }
    }
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for c in &report.checks {
        let key = match c.check {
            crate::complexes::CheckKind::Simplicial { .. } => "simplicial",
            crate::complexes::CheckKind::Mixed { .. } => "mixed",
            crate::complexes::CheckKind::Square { .. } => "square",
            crate::complexes::CheckKind::Anticommute { .. } => "anticommute",
            crate::complexes::CheckKind::TotalSquare { .. } => "total-square",
        };
        let e = counts.entry(key).or_default();
        e.0 += 1;
        e.1 += c.passed as usize;
    }
    let passed = report.passed() && planes.iter().all(|p| p["passed"] == json!(true));
    let summary: BTreeMap<&str, Value> =
        counts.into_iter().map(|(k, (n, ok))| (k, json!({ "checked": n, "passed": ok }))).collect();
    let result = json!({
        "summary": summary,
        "failures": to_value(&report.failures()),
        "planes": planes,
    });
    let status = if passed { "pass" } else { "fail" };
    Ok(Outcome { report: envelope(pkg, "verify", params, status, result), exit_code: if passed { 0 } else { 3 } })
}

/// Total cohomology through `n_max` with representatives, optionally of a
/// boundary plane of a tricomplex.
pub fn cmd_cohomology(
    pkg: &StructurePackage,
    kind: Option<Kind>,
    n_max: usize,
    which: Option<Plane>,
    ceiling: usize,
) -> Result<Outcome> {
    let kind = resolve_kind(pkg, kind)?;
    let params = json!({
        "kind": kind.to_string(),
        "n_max": n_max,
        "plane": which.map(|p| format!("{p:?}")),
        "ceiling": ceiling,
    });
    if let Some(o) = require_valid(pkg, "cohomology", params.clone())? {
        return Ok(o);
    }
    guard(pkg, kind, n_max, ceiling)?;
    let mut asm = build_view(pkg, kind, n_max)?;
    if let Some(w) = which {
        asm = plane(&asm, w)?;
    }
    let f = pkg.field();
    let mut degrees = Vec::new();
    for mode in [CornerMode::Corner, CornerMode::Full] {
        let cx = total_complex(&asm, mode).as_cochain_complex(f);
        for n in 0..=n_max {
            let h = cohomology(&cx, n)?;
            degrees.push(json!({
                "mode": to_value(&mode),
                "degree": n,
                "dim": h.dim,
                "cochain_dim": h.space_dim,
                "representatives": h.representatives.iter().map(|r| sv_json(r)).collect::<Vec<_>>(),
            }));
        }
    }
    let result = json!({ "cohomology": degrees });
    Ok(Outcome { report: envelope(pkg, "cohomology", params, "pass", result), exit_code: 0 })
}

fn part_key(p: Part) -> &'static str {
    match p {
        Part::Lambda => "lambda",
        Part::Rho => "rho",
        Part::Pi => "pi",
        Part::Delta => "Delta",
    }
}

/// Reads an infinitesimal file: one matrix per component (`lambda`, `rho`,
/// `pi`, `Delta`), omitted components are zero. Returns total degree-2
/// coordinates.
pub fn parse_infinitesimal(ctx: &DeformationContext, text: &str) -> Result<Vec<ExactScalar>> {
    let fl = Fields::parse(text, &["lambda", "rho", "pi", "Delta"])?;
    let f = ctx.field;
    for key in fl.map.keys() {
        if !ctx.parts.iter().any(|s| part_key(s.part) == key) {
            let (line, _) = fl.need(key)?;
            return Err(perr(*line, format!("`{key}` is not a component of a {} deformation", ctx.kind)));
        }
    }
    let mut maps = Vec::new();
    for slot in &ctx.parts {
        let m = match fl.opt_matrix(f, part_key(slot.part), slot.dst, slot.src)? {
            Some(m) => crate::exact_linalg::SparseMatrix::from_dense(&m),
            None => sp_from_coords(f, slot.src, slot.dst, &vec![f.zero(); slot.src * slot.dst]),
        };
        maps.push(m);
    }
    Ok(ctx.theta_vector(&maps))
}

fn series_json(ctx: &DeformationContext, terms: &[Vec<crate::exact_linalg::SparseMatrix>]) -> Value {
    Value::Array(
        terms
            .iter()
            .enumerate()
            .map(|(k, parts)| {
                let comps: BTreeMap<&str, Value> = ctx
                    .parts
                    .iter()
                    .zip(parts)
                    .map(|(s, m)| (part_key(s.part), sparse_json(&crate::tensor_calculus::sp_to_coords(m))))
                    .collect();
                json!({ "order": k, "components": comps })
            })
            .collect(),
    )
}

/// Extends an infinitesimal (zero when `infinitesimal` is `None`) order by
/// order, reporting every obstruction.
pub fn cmd_deform(
    pkg: &StructurePackage,
    kind: Option<Kind>,
    infinitesimal: Option<&str>,
    max_order: usize,
    ceiling: usize,
) -> Result<Outcome> {
    let kind = resolve_kind(pkg, kind)?;
    let params = json!({ "kind": kind.to_string(), "max_order": max_order, "ceiling": ceiling });
    if let Some(o) = require_valid(pkg, "deform", params.clone())? {
        return Ok(o);
    }
    guard(pkg, kind, 3, ceiling)?;
    let ctx = DeformationContext::new(pkg, kind)?;
    let theta = match infinitesimal {
        Some(text) => parse_infinitesimal(&ctx, text)?,
        None => vec![ctx.field.zero(); ctx.dim2()],
    };
    let check = check_infinitesimal(&ctx, &theta)?;
    if !check.is_cocycle {
        let result = json!({
            "infinitesimal": sparse_json(&theta),
            "check": to_value(&check),
            "reason": "the infinitesimal is not a total 2-cocycle",
        });
        return Ok(Outcome { report: envelope(pkg, "deform", params, "not-a-cocycle", result), exit_code: 2 });
    }
    let (series, trace) = extend_to(&ctx, &theta, max_order.max(1))?;
    let obstructed = trace.iter().any(|r| !r.solvable);
    let trace_json: Vec<Value> = trace
        .iter()
        .map(|r| {
            json!({
                "order": r.order,
                "residual": sparse_json(&r.residual),
                "residual_is_cocycle": r.residual_is_cocycle,
                "solvable": r.solvable,
                "solution": r.solution.as_ref().map(|s| sparse_json(s)),
                "h3_class": r.class.as_ref().map(|c| sparse_json(c)),
            })
        })
        .collect();
    let result = json!({
        "infinitesimal": sparse_json(&theta),
        "h2_class": ctx.h2()?.class_of(&crate::exact_linalg::sv_from_dense(ctx.field, &theta)).map(|c| sparse_json(&c)),
        "trace": trace_json,
        "series": series_json(&ctx, &series.terms),
        "reached_order": series.order(),
    });
    let status = if obstructed { "obstructed" } else { "extended" };
    Ok(Outcome { report: envelope(pkg, "deform", params, status, result), exit_code: 0 })
}

/// The `H^2 = 0` rigidity probe.
pub fn cmd_rigidity(
    pkg: &StructurePackage,
    kind: Option<Kind>,
    max_order: usize,
    trials: usize,
    seed: u64,
    ceiling: usize,
) -> Result<Outcome> {
    let kind = resolve_kind(pkg, kind)?;
    let params = json!({
        "kind": kind.to_string(),
        "max_order": max_order,
        "trials": trials,
        "seed": seed,
        "ceiling": ceiling,
    });
    if let Some(o) = require_valid(pkg, "rigidity", params.clone())? {
        return Ok(o);
    }
    guard(pkg, kind, 3, ceiling)?;
    let ctx = DeformationContext::new(pkg, kind)?;
    let report = rigidity_probe(&ctx, max_order, trials, seed)?;
    let status = if report.rigid {
        "rigid"
    } else if report.h2_dim > 0 {
        "h2-nonzero"
    } else {
        "not-trivialized"
    };
    let samples: Vec<Value> = report
        .samples
        .iter()
        .map(|s| {
            json!({
                "infinitesimal": sparse_json(&s.infinitesimal),
                "extended_to": s.extended_to,
                "obstructed_at": s.obstructed_at,
                "residuals_checked": s.residuals_checked,
                "trivialized": s.trivialized,
                "gauge": s.gauge.as_ref().map(|g| g.iter().map(|t| sparse_json(t)).collect::<Vec<_>>()),
            })
        })
        .collect();
    let result = json!({
        "h2_dim": report.h2_dim,
        "rigid": report.rigid,
        "exhibited": report.exhibited.as_ref().map(|v| sparse_json(v)),
        "samples": samples,
    });
    let exit_code = if status == "not-trivialized" { 3 } else { 0 };
    Ok(Outcome { report: envelope(pkg, "rigidity", params, status, result), exit_code })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf_structures::{example_catalog, CATALOG};

    #[test]
    fn catalog_round_trips_through_text() {
        for name in CATALOG {
            let pkg = example_catalog(name, FieldSpec::rationals()).unwrap();
            let text = write_package(&pkg);
            let back = parse_package(&text, None).unwrap();
            assert_eq!(back, pkg, "{name}");
            assert_eq!(package_hash(&back), package_hash(&pkg));
        }
    }

    #[test]
    fn parse_errors_carry_lines() {
        assert!(matches!(parse_package("", None), Err(CliError::Parse { .. })));
        let err = parse_package("format = 1\nkind = XY\n", None).unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 2, .. }));
        let err = parse_package("format = 1\nbogus = 3\n", None).unwrap_err();
        assert!(matches!(err, CliError::Parse { line: 2, .. }));
    }

    #[test]
    fn fractions_and_multiline_matrices() {
        let f = FieldSpec::rationals();
        let m = parse_matrix(f, 1, "m", "[[1, \"-1/2\"],\n [0, 3]]", 2, 2).unwrap();
        assert_eq!(m.get(0, 1).to_string(), "-1/2");
        let st = statements("a = [[1,\n 2]]\nb = 3 # note\n").unwrap();
        assert_eq!(st.len(), 2);
        assert_eq!(st[1].2, "3");
    }
}
