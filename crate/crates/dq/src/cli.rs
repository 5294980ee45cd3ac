//! The `dq` command line: parse the math grammar, dispatch to one library
//! operation, print deterministic JSON on stdout.
//!
//! Exit codes: 0 success, 1 parse/usage error, 2 mathematical domain error,
//! 3 a `*-check` subcommand ran and the verified property is false.
//! Diagnostics go to stderr; stdout carries exactly one JSON document with
//! sorted keys, so outputs are byte-stable and golden-testable.

use std::collections::BTreeMap;
use std::fmt::Display;

use serde_json::{json, Value};

use crate::error::{DqError, Result};
use crate::formality::{hkr_bracket_defect, hkr_chain_check, hkr_map, linfty_check, LInftyMapFamily};
use crate::gauge::{
    bch, formal_poisson_bracket, gauge_act, gauge_apply_bivector, mc_residual_poisson,
    GerstenhaberDgla, SchoutenDgla,
};
use crate::multidiff::MultiDiffOp;
use crate::parse::{self, ParseKind};
use crate::poly::Polynomial;
use crate::polyvector::{CovectorField, PolyVector};
use crate::scalar::GaussianRational;
use crate::series::{series_string, Coeff, HbarSeries};
use crate::star::{mc_residual_star, EquivalenceOp, FormalFunction, StarProduct};

/// Which library operations each subcommand exposes; every operation
/// appears exactly once, which a test enforces against the full list.
pub const DISPATCH: &[(&str, &[&str])] = &[
    ("parse", &["parse", "poly_ring_ops", "partial_derive", "evaluate", "is_normalized"]),
    ("poisson-check", &["is_poisson"]),
    ("schouten", &["schouten_bracket", "wedge"]),
    ("sharp", &["sharp", "hamiltonian_vf"]),
    ("pbracket", &["poisson_bracket", "formal_poisson_bracket"]),
    ("jacobiator", &["jacobiator"]),
    ("moyal", &["moyal_star"]),
    ("star-apply", &["star_apply", "series_add"]),
    ("assoc-check", &["associator_residual"]),
    ("skew-p1", &["first_order_skew"]),
    ("mc-check", &["mc_residual_star", "mc_residual_poisson"]),
    ("equiv-apply", &["equivalence_apply", "series_invert", "series_mul"]),
    ("gauge", &["gauge_act_dgla", "gauge_apply_bivector"]),
    ("bch", &["bch"]),
    ("hochschild-d", &["hochschild_d", "mult_op"]),
    ("gerst", &["gerst_product", "gerst_bracket", "apply"]),
    ("hkr", &["hkr_map", "hkr_chain_check"]),
    ("hkr-defect", &["hkr_bracket_defect"]),
    ("linfty-check", &["linfty_check"]),
];

const USAGE: &str = "usage: dq <subcommand> [--flag value]...
subcommands:
  parse          --kind polynomial|multivector|operator|series --expr E
                 [--dim N] [--order N] [--inner KIND] [--derive i] [--eval \"c1, c2\"]
  poisson-check  --bivector B [--dim N]
  schouten       --a X --b Y [--mode bracket|wedge] [--dim N]
  sharp          --bivector B (--covector \"p1, p2, ...\" | --df f) [--dim N]
  pbracket       --bivector B --f F --g G [--dim N]
                 | --pi SERIES --f-series S --g-series S --order N [--dim N]
  jacobiator     --bivector B --f F --g G --h H [--dim N]
  moyal          --alpha MATRIX --order N [--f F --g G] [--dim N]
  star-apply     <star> --f S --g S
  assoc-check    <star> --f F --g G --h H
  skew-p1        <star>
  mc-check       <star> | --pi SERIES --order N [--dim N]
  equiv-apply    <star> --t OPSERIES
  gauge          [--side schouten] --vf SERIES --pi SERIES --order N [--dim N]
                 | --side gerstenhaber --g OPSERIES --a OPSERIES --order N [--dim N]
  bch            --x SERIES --y SERIES --order N [--dim N]
  hochschild-d   --op OP [--dim N]
  gerst          --a OP --b OP [--mode bracket|product] [--args \"f, g\"] [--dim N]
  hkr            --multivector X [--dim N]
  hkr-defect     --a X --b Y [--dim N]
  linfty-check   --samples \"x , y | x2 , y2\" [--family hkr|zero] [--dim N]
where <star> is: --star moyal --alpha MATRIX --order N
             or: --star custom --p OPSERIES --order N [--dim N]
Any flag may instead be given as a key in a JSON object via --file PATH.";

/// Run with the process arguments and return the exit code.
pub fn run_from_env() -> i32 {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (code, stdout) = run_capture(&args);
    print!("{}", stdout);
    code
}

/// Run and capture stdout (diagnostics still go to stderr). Used by tests.
pub fn run_capture(args: &[String]) -> (i32, String) {
    match dispatch(args) {
        Ok((value, code)) => (code, format!("{}\n", value)),
        Err(e) => {
            eprintln!("dq: {}", e);
            let code = match e {
                DqError::Parse { .. } => 1,
                _ => 2,
            };
            (code, String::new())
        }
    }
}

fn usage_err(msg: impl Into<String>) -> DqError {
    DqError::Parse { pos: 0, msg: format!("{}\n{}", msg.into(), USAGE) }
}

type Flags = BTreeMap<String, String>;

fn parse_flags(args: &[String]) -> Result<(String, Flags)> {
    let sub = args
        .first()
        .ok_or_else(|| usage_err("missing subcommand"))?
        .clone();
    let mut flags = Flags::new();
    let mut i = 1;
    while i < args.len() {
        let key = args[i]
            .strip_prefix("--")
            .ok_or_else(|| usage_err(format!("expected --flag, got '{}'", args[i])))?;
        let value = args
            .get(i + 1)
            .ok_or_else(|| usage_err(format!("flag --{} needs a value", key)))?;
        flags.insert(key.to_string(), value.clone());
        i += 2;
    }
    if let Some(path) = flags.remove("file") {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| usage_err(format!("cannot read --file {}: {}", path, e)))?;
        let doc: Value = serde_json::from_str(&text)
            .map_err(|e| usage_err(format!("--file {} is not valid JSON: {}", path, e)))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| usage_err(format!("--file {} must hold a JSON object", path)))?;
        for (k, v) in obj {
            let s = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            // explicit flags win over file entries
            flags.entry(k.clone()).or_insert(s);
        }
    }
    Ok((sub, flags))
}

fn dispatch(args: &[String]) -> Result<(Value, i32)> {
    let (sub, flags) = parse_flags(args)?;
    match sub.as_str() {
        "parse" => cmd_parse(&flags),
        "poisson-check" => cmd_poisson_check(&flags),
        "schouten" => cmd_schouten(&flags),
        "sharp" => cmd_sharp(&flags),
        "pbracket" => cmd_pbracket(&flags),
        "jacobiator" => cmd_jacobiator(&flags),
        "moyal" => cmd_moyal(&flags),
        "star-apply" => cmd_star_apply(&flags),
        "assoc-check" => cmd_assoc_check(&flags),
        "skew-p1" => cmd_skew_p1(&flags),
        "mc-check" => cmd_mc_check(&flags),
        "equiv-apply" => cmd_equiv_apply(&flags),
        "gauge" => cmd_gauge(&flags),
        "bch" => cmd_bch(&flags),
        "hochschild-d" => cmd_hochschild_d(&flags),
        "gerst" => cmd_gerst(&flags),
        "hkr" => cmd_hkr(&flags),
        "hkr-defect" => cmd_hkr_defect(&flags),
        "linfty-check" => cmd_linfty_check(&flags),
        other => Err(usage_err(format!("unknown subcommand '{}'", other))),
    }
}

// ---- flag helpers ----

fn need<'a>(flags: &'a Flags, key: &str) -> Result<&'a str> {
    flags
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| usage_err(format!("missing required flag --{}", key)))
}

fn opt<'a>(flags: &'a Flags, key: &str) -> Option<&'a str> {
    flags.get(key).map(String::as_str)
}

fn parse_usize(flags: &Flags, key: &str) -> Result<Option<usize>> {
    match flags.get(key) {
        None => Ok(None),
        Some(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| usage_err(format!("--{} must be a non-negative integer", key))),
    }
}

fn need_order(flags: &Flags) -> Result<usize> {
    parse_usize(flags, "order")?
        .ok_or_else(|| usage_err("missing required flag --order"))
}

/// Accumulates the largest index mentioned by any input expression, then
/// resolves the working dimension against an optional explicit --dim.
struct DimResolver {
    max: usize,
}

impl DimResolver {
    fn new() -> Self {
        DimResolver { max: 0 }
    }

    fn expr(&mut self, src: &str, kind: ParseKind) -> Result<&mut Self> {
        self.max = self.max.max(parse::max_index(&parse::parse_expr(src, kind)?));
        Ok(self)
    }

    fn series(&mut self, src: &str, kind: ParseKind) -> Result<&mut Self> {
        self.max = self.max.max(parse::series_max_index(src, kind)?);
        Ok(self)
    }

    fn at_least(&mut self, n: usize) -> &mut Self {
        self.max = self.max.max(n);
        self
    }

    fn resolve(&self, flags: &Flags) -> Result<usize> {
        match parse_usize(flags, "dim")? {
            Some(d) => {
                if self.max > d {
                    Err(DqError::IndexOutOfRange(self.max, d))
                } else {
                    Ok(d)
                }
            }
            None => Ok(self.max.max(1)),
        }
    }
}

fn parse_scalar(src: &str) -> Result<GaussianRational> {
    let e = parse::parse_expr(src.trim(), ParseKind::Polynomial)?;
    if parse::max_index(&e) > 0 {
        return Err(DqError::Parse {
            pos: 0,
            msg: format!("expected a constant scalar, got '{}'", src.trim()),
        });
    }
    Ok(parse::lower_polynomial(&e, 1)?.constant_part())
}

fn comma_list(src: &str) -> Vec<&str> {
    src.split(',').map(str::trim).collect()
}

// ---- JSON helpers ----

fn series_json_display<C: Coeff + Display>(s: &HbarSeries<C>) -> Value {
    json!({
        "order": s.order(),
        "coeffs": s.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    })
}

fn series_json_ops(s: &HbarSeries<MultiDiffOp>) -> Value {
    json!({
        "order": s.order(),
        "coeffs": s.coeffs().iter().map(MultiDiffOp::to_json).collect::<Vec<_>>(),
    })
}

fn star_json(s: &StarProduct) -> Value {
    json!({
        "dim": s.dim(),
        "order": s.order(),
        "coeffs": s.series().coeffs().iter().map(MultiDiffOp::to_json).collect::<Vec<_>>(),
    })
}

// ---- star-product input (shared by several subcommands) ----

/// Antisymmetric rational matrix from JSON text; entries are integers or
/// "p/q" strings.
#[allow(clippy::needless_range_loop)]
fn alpha_from_json(src: &str) -> Result<PolyVector> {
    let doc: Value = serde_json::from_str(src).map_err(|e| DqError::Parse {
        pos: 0,
        msg: format!("--alpha is not valid JSON: {}", e),
    })?;
    let rows = doc
        .as_array()
        .ok_or_else(|| DqError::Parse { pos: 0, msg: "--alpha must be a JSON matrix".into() })?;
    let n = rows.len();
    if n == 0 {
        return Err(DqError::Parse { pos: 0, msg: "--alpha matrix is empty".into() });
    }
    let mut matrix = vec![vec![GaussianRational::zero(); n]; n];
    for (i, row) in rows.iter().enumerate() {
        let cells = row
            .as_array()
            .ok_or_else(|| DqError::Parse { pos: 0, msg: "--alpha rows must be arrays".into() })?;
        if cells.len() != n {
            return Err(DqError::Parse {
                pos: 0,
                msg: format!("--alpha must be square: row {} has {} entries", i, cells.len()),
            });
        }
        for (j, cell) in cells.iter().enumerate() {
            matrix[i][j] = match cell {
                Value::Number(num) => {
                    let as_int = num.as_i64().ok_or_else(|| DqError::Parse {
                        pos: 0,
                        msg: "matrix entries must be integers or \"p/q\" strings".into(),
                    })?;
                    GaussianRational::from_int(as_int)
                }
                Value::String(s) => parse_scalar(s)?,
                _ => {
                    return Err(DqError::Parse {
                        pos: 0,
                        msg: "matrix entries must be integers or \"p/q\" strings".into(),
                    })
                }
            };
        }
    }
    for i in 0..n {
        for j in 0..n {
            let sum = &matrix[i][j] + &matrix[j][i];
            if !sum.is_zero() {
                return Err(DqError::domain(format!(
                    "--alpha must be antisymmetric; entries ({}, {}) and ({}, {}) clash",
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    let mut comps = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !matrix[i][j].is_zero() {
                comps.push((
                    vec![i + 1, j + 1],
                    Polynomial::constant(n, matrix[i][j].clone()),
                ));
            }
        }
    }
    PolyVector::from_components(n, 2, comps)
}

/// Build the star product named by `--star` (default `moyal`).
fn build_star(flags: &Flags) -> Result<StarProduct> {
    let order = need_order(flags)?;
    match opt(flags, "star").unwrap_or("moyal") {
        "moyal" => {
            let alpha = alpha_from_json(need(flags, "alpha")?)?;
            if let Some(d) = parse_usize(flags, "dim")? {
                if d != alpha.dim() {
                    return Err(DqError::DimMismatch(alpha.dim(), d));
                }
            }
            StarProduct::moyal(&alpha, order)
        }
        "custom" => {
            let src = need(flags, "p")?;
            let dim = DimResolver::new()
                .series(src, ParseKind::Operator)?
                .resolve(flags)?;
            let series = parse::operator_series(src, dim, order, 2)?;
            StarProduct::new(dim, series)
        }
        other => Err(usage_err(format!("unknown --star '{}'", other))),
    }
}

/// `--f`-style inputs for star application: plain polynomial, or `k: ...`
/// series entries when a colon is present.
fn formal_function(src: &str, dim: usize, order: usize) -> Result<FormalFunction> {
    if src.contains(':') {
        parse::polynomial_series(src, dim, order)
    } else {
        Ok(HbarSeries::constant(parse::polynomial(src, Some(dim))?, order))
    }
}

// ---- subcommands ----

fn cmd_parse(flags: &Flags) -> Result<(Value, i32)> {
    let expr = need(flags, "expr")?;
    let kind = need(flags, "kind")?;
    match kind {
        "polynomial" => {
            let dim = DimResolver::new()
                .expr(expr, ParseKind::Polynomial)?
                .resolve(flags)?;
            let p = parse::polynomial(expr, Some(dim))?;
            let mut out = json!({
                "kind": "polynomial",
                "dim": dim,
                "canonical": p.to_string(),
            });
            if let Some(i) = parse_usize(flags, "derive")? {
                out["derivative"] = Value::String(p.partial(i)?.to_string());
            }
            if let Some(point_src) = opt(flags, "eval") {
                let point = comma_list(point_src)
                    .into_iter()
                    .map(parse_scalar)
                    .collect::<Result<Vec<_>>>()?;
                out["value"] = p.eval(&point)?.to_json();
            }
            Ok((out, 0))
        }
        "multivector" => {
            let dim = DimResolver::new()
                .expr(expr, ParseKind::Multivector)?
                .resolve(flags)?;
            let v = parse::multivector(expr, Some(dim))?;
            Ok((
                json!({
                    "kind": "multivector",
                    "dim": dim,
                    "degree": v.degree(),
                    "canonical": v.to_string(),
                    "components": v.to_json()["components"],
                }),
                0,
            ))
        }
        "operator" => {
            let dim = DimResolver::new()
                .expr(expr, ParseKind::Operator)?
                .resolve(flags)?;
            let op = parse::operator(expr, Some(dim))?;
            Ok((
                json!({
                    "kind": "operator",
                    "dim": dim,
                    "arity": op.arity(),
                    "canonical": op.to_string(),
                    "normalized": op.is_normalized(),
                    "terms": op.to_json()["terms"],
                }),
                0,
            ))
        }
        "series" => {
            let order = need_order(flags)?;
            let inner = opt(flags, "inner").unwrap_or("polynomial");
            match inner {
                "polynomial" => {
                    let dim = DimResolver::new()
                        .series(expr, ParseKind::Polynomial)?
                        .resolve(flags)?;
                    let s = parse::polynomial_series(expr, dim, order)?;
                    Ok((
                        json!({
                            "kind": "series",
                            "inner": "polynomial",
                            "dim": dim,
                            "canonical": series_string(&s),
                            "series": series_json_display(&s),
                        }),
                        0,
                    ))
                }
                "multivector" => {
                    let dim = DimResolver::new()
                        .series(expr, ParseKind::Multivector)?
                        .resolve(flags)?;
                    // take the degree from the first nonzero entry
                    let entries = parse::parse_series_entries(expr, ParseKind::Multivector)?;
                    let degree = entries
                        .iter()
                        .map(|(_, e)| parse::lower_multivector(e, dim).map(|v| v.degree()))
                        .next()
                        .transpose()?
                        .unwrap_or(0);
                    let s = parse::multivector_series(expr, dim, order, degree)?;
                    Ok((
                        json!({
                            "kind": "series",
                            "inner": "multivector",
                            "dim": dim,
                            "canonical": series_string(&s),
                            "series": series_json_display(&s),
                        }),
                        0,
                    ))
                }
                "operator" => {
                    let dim = DimResolver::new()
                        .series(expr, ParseKind::Operator)?
                        .resolve(flags)?;
                    let entries = parse::parse_series_entries(expr, ParseKind::Operator)?;
                    let arity = entries
                        .iter()
                        .map(|(_, e)| parse::lower_operator(e, dim).map(|v| v.arity()))
                        .next()
                        .transpose()?
                        .unwrap_or(0);
                    let s = parse::operator_series(expr, dim, order, arity)?;
                    Ok((
                        json!({
                            "kind": "series",
                            "inner": "operator",
                            "dim": dim,
                            "canonical": series_string(&s),
                            "series": series_json_ops(&s),
                        }),
                        0,
                    ))
                }
                other => Err(usage_err(format!("unknown --inner '{}'", other))),
            }
        }
        other => Err(usage_err(format!("unknown --kind '{}'", other))),
    }
}

fn cmd_poisson_check(flags: &Flags) -> Result<(Value, i32)> {
    let src = need(flags, "bivector")?;
    let dim = DimResolver::new()
        .expr(src, ParseKind::Multivector)?
        .resolve(flags)?;
    let pi = parse::multivector(src, Some(dim))?;
    let (ok, witness) = pi.is_poisson()?;
    let out = json!({
        "poisson": ok,
        "witness": witness.to_string(),
    });
    Ok((out, if ok { 0 } else { 3 }))
}

fn cmd_schouten(flags: &Flags) -> Result<(Value, i32)> {
    let a_src = need(flags, "a")?;
    let b_src = need(flags, "b")?;
    let dim = DimResolver::new()
        .expr(a_src, ParseKind::Multivector)?
        .expr(b_src, ParseKind::Multivector)?
        .resolve(flags)?;
    let a = parse::multivector(a_src, Some(dim))?;
    let b = parse::multivector(b_src, Some(dim))?;
    let result = match opt(flags, "mode").unwrap_or("bracket") {
        "bracket" => a.schouten(&b)?,
        "wedge" => a.wedge(&b)?,
        other => return Err(usage_err(format!("unknown --mode '{}'", other))),
    };
    Ok((json!({ "result": result.to_string() }), 0))
}

fn cmd_sharp(flags: &Flags) -> Result<(Value, i32)> {
    let biv_src = need(flags, "bivector")?;
    let mut resolver = DimResolver::new();
    resolver.expr(biv_src, ParseKind::Multivector)?;
    if let Some(df_src) = opt(flags, "df") {
        let dim = resolver
            .expr(df_src, ParseKind::Polynomial)?
            .resolve(flags)?;
        let pi = parse::multivector(biv_src, Some(dim))?;
        let f = parse::polynomial(df_src, Some(dim))?;
        let result = pi.hamiltonian_vf(&f)?;
        return Ok((json!({ "result": result.to_string() }), 0));
    }
    let cov_src = need(flags, "covector")?;
    let parts = comma_list(cov_src);
    for p in &parts {
        resolver.expr(p, ParseKind::Polynomial)?;
    }
    let dim = resolver.at_least(parts.len()).resolve(flags)?;
    if parts.len() != dim {
        return Err(DqError::DimMismatch(dim, parts.len()));
    }
    let comps = parts
        .into_iter()
        .map(|p| parse::polynomial(p, Some(dim)))
        .collect::<Result<Vec<_>>>()?;
    let alpha = CovectorField::new(dim, comps)?;
    let pi = parse::multivector(biv_src, Some(dim))?;
    Ok((json!({ "result": pi.sharp(&alpha)?.to_string() }), 0))
}

fn cmd_pbracket(flags: &Flags) -> Result<(Value, i32)> {
    if let Some(pi_src) = opt(flags, "pi") {
        // formal mode
        let order = need_order(flags)?;
        let f_src = need(flags, "f-series")?;
        let g_src = need(flags, "g-series")?;
        let dim = DimResolver::new()
            .series(pi_src, ParseKind::Multivector)?
            .series(f_src, ParseKind::Polynomial)?
            .series(g_src, ParseKind::Polynomial)?
            .resolve(flags)?;
        let pi = parse::multivector_series(pi_src, dim, order, 2)?;
        let f = parse::polynomial_series(f_src, dim, order)?;
        let g = parse::polynomial_series(g_src, dim, order)?;
        let out = formal_poisson_bracket(&pi, &f, &g)?;
        return Ok((json!({ "series": series_json_display(&out) }), 0));
    }
    let biv_src = need(flags, "bivector")?;
    let f_src = need(flags, "f")?;
    let g_src = need(flags, "g")?;
    let dim = DimResolver::new()
        .expr(biv_src, ParseKind::Multivector)?
        .expr(f_src, ParseKind::Polynomial)?
        .expr(g_src, ParseKind::Polynomial)?
        .resolve(flags)?;
    let pi = parse::multivector(biv_src, Some(dim))?;
    let f = parse::polynomial(f_src, Some(dim))?;
    let g = parse::polynomial(g_src, Some(dim))?;
    Ok((json!({ "result": pi.poisson_bracket(&f, &g)?.to_string() }), 0))
}

fn cmd_jacobiator(flags: &Flags) -> Result<(Value, i32)> {
    let biv_src = need(flags, "bivector")?;
    let f_src = need(flags, "f")?;
    let g_src = need(flags, "g")?;
    let h_src = need(flags, "h")?;
    let dim = DimResolver::new()
        .expr(biv_src, ParseKind::Multivector)?
        .expr(f_src, ParseKind::Polynomial)?
        .expr(g_src, ParseKind::Polynomial)?
        .expr(h_src, ParseKind::Polynomial)?
        .resolve(flags)?;
    let pi = parse::multivector(biv_src, Some(dim))?;
    let f = parse::polynomial(f_src, Some(dim))?;
    let g = parse::polynomial(g_src, Some(dim))?;
    let h = parse::polynomial(h_src, Some(dim))?;
    Ok((json!({ "result": pi.jacobiator(&f, &g, &h)?.to_string() }), 0))
}

fn cmd_moyal(flags: &Flags) -> Result<(Value, i32)> {
    let star = build_star(flags)?;
    match (opt(flags, "f"), opt(flags, "g")) {
        (Some(f_src), Some(g_src)) => {
            let f = parse::polynomial(f_src, Some(star.dim()))?;
            let g = parse::polynomial(g_src, Some(star.dim()))?;
            let out = star.apply_polys(&f, &g)?;
            Ok((json!({ "series": series_json_display(&out) }), 0))
        }
        (None, None) => Ok((json!({ "star": star_json(&star) }), 0)),
        _ => Err(usage_err("--f and --g must be given together")),
    }
}

fn cmd_star_apply(flags: &Flags) -> Result<(Value, i32)> {
    let star = build_star(flags)?;
    let f = formal_function(need(flags, "f")?, star.dim(), star.order())?;
    let g = formal_function(need(flags, "g")?, star.dim(), star.order())?;
    let out = star.apply(&f, &g)?;
    Ok((json!({ "series": series_json_display(&out) }), 0))
}

fn cmd_assoc_check(flags: &Flags) -> Result<(Value, i32)> {
    let star = build_star(flags)?;
    let f = parse::polynomial(need(flags, "f")?, Some(star.dim()))?;
    let g = parse::polynomial(need(flags, "g")?, Some(star.dim()))?;
    let h = parse::polynomial(need(flags, "h")?, Some(star.dim()))?;
    let residual = star.associator_residual(&f, &g, &h)?;
    let zero = residual.is_zero();
    Ok((
        json!({ "residual": series_string(&residual) }),
        if zero { 0 } else { 3 },
    ))
}

fn cmd_skew_p1(flags: &Flags) -> Result<(Value, i32)> {
    let star = build_star(flags)?;
    Ok((json!({ "bivector": star.first_order_skew()?.to_string() }), 0))
}

fn cmd_mc_check(flags: &Flags) -> Result<(Value, i32)> {
    if let Some(pi_src) = opt(flags, "pi") {
        let order = need_order(flags)?;
        let dim = DimResolver::new()
            .series(pi_src, ParseKind::Multivector)?
            .resolve(flags)?;
        let pi = parse::multivector_series(pi_src, dim, order, 2)?;
        let residual = mc_residual_poisson(&pi)?;
        let zero = residual.is_zero();
        let out = json!({
            "side": "poisson",
            "residual": series_string(&residual),
        });
        return Ok((out, if zero { 0 } else { 3 }));
    }
    let star = build_star(flags)?;
    let residual = mc_residual_star(&star.deformation_part())?;
    let zero = residual.is_zero();
    let out = json!({
        "side": "star",
        "residual": series_string(&residual),
    });
    Ok((out, if zero { 0 } else { 3 }))
}

fn cmd_equiv_apply(flags: &Flags) -> Result<(Value, i32)> {
    let star = build_star(flags)?;
    let t_src = need(flags, "t")?;
    let mut series = parse::operator_series(t_src, star.dim(), star.order(), 1)?;
    // the identity at order 0 may be left implicit
    if series.coeff(0).is_zero() {
        series.set_coeff(0, MultiDiffOp::identity(star.dim()));
    }
    let t = EquivalenceOp::new(star.dim(), series)?;
    let out = t.conjugate(&star)?;
    Ok((json!({ "star": star_json(&out) }), 0))
}

fn cmd_gauge(flags: &Flags) -> Result<(Value, i32)> {
    let order = need_order(flags)?;
    match opt(flags, "side").unwrap_or("schouten") {
        "schouten" => {
            let vf_src = need(flags, "vf")?;
            let pi_src = need(flags, "pi")?;
            let dim = DimResolver::new()
                .series(vf_src, ParseKind::Multivector)?
                .series(pi_src, ParseKind::Multivector)?
                .resolve(flags)?;
            let x = parse::multivector_series(vf_src, dim, order, 1)?;
            let pi = parse::multivector_series(pi_src, dim, order, 2)?;
            let out = gauge_apply_bivector(&x, &pi)?;
            Ok((json!({ "result": series_json_display(&out) }), 0))
        }
        "gerstenhaber" => {
            let g_src = need(flags, "g")?;
            let a_src = need(flags, "a")?;
            let dim = DimResolver::new()
                .series(g_src, ParseKind::Operator)?
                .series(a_src, ParseKind::Operator)?
                .resolve(flags)?;
            let g = parse::operator_series(g_src, dim, order, 1)?;
            let a = parse::operator_series(a_src, dim, order, 2)?;
            let out = gauge_act(&GerstenhaberDgla, &g, &a)?;
            Ok((json!({ "result": series_json_ops(&out) }), 0))
        }
        other => Err(usage_err(format!("unknown --side '{}'", other))),
    }
}

fn cmd_bch(flags: &Flags) -> Result<(Value, i32)> {
    let order = need_order(flags)?;
    let x_src = need(flags, "x")?;
    let y_src = need(flags, "y")?;
    let dim = DimResolver::new()
        .series(x_src, ParseKind::Multivector)?
        .series(y_src, ParseKind::Multivector)?
        .resolve(flags)?;
    let x = parse::multivector_series(x_src, dim, order, 1)?;
    let y = parse::multivector_series(y_src, dim, order, 1)?;
    let z = bch(&x, &y, order)?;
    Ok((json!({ "result": series_json_display(&z) }), 0))
}

fn cmd_hochschild_d(flags: &Flags) -> Result<(Value, i32)> {
    let src = need(flags, "op")?;
    let dim = DimResolver::new()
        .expr(src, ParseKind::Operator)?
        .resolve(flags)?;
    let op = parse::operator(src, Some(dim))?;
    let d = op.hochschild_d()?;
    Ok((
        json!({
            "canonical": d.to_string(),
            "input_normalized": op.is_normalized(),
            "result": d.to_json(),
        }),
        0,
    ))
}

fn cmd_gerst(flags: &Flags) -> Result<(Value, i32)> {
    let a_src = need(flags, "a")?;
    let b_src = need(flags, "b")?;
    let mut resolver = DimResolver::new();
    resolver
        .expr(a_src, ParseKind::Operator)?
        .expr(b_src, ParseKind::Operator)?;
    let arg_srcs: Vec<&str> = match opt(flags, "args") {
        Some(s) => comma_list(s),
        None => Vec::new(),
    };
    for s in &arg_srcs {
        resolver.expr(s, ParseKind::Polynomial)?;
    }
    let dim = resolver.resolve(flags)?;
    let a = parse::operator(a_src, Some(dim))?;
    let b = parse::operator(b_src, Some(dim))?;
    let result = match opt(flags, "mode").unwrap_or("bracket") {
        "bracket" => a.gerst_bracket(&b)?,
        "product" => a.gerst_product(&b)?,
        other => return Err(usage_err(format!("unknown --mode '{}'", other))),
    };
    let mut out = json!({
        "canonical": result.to_string(),
        "result": result.to_json(),
    });
    if !arg_srcs.is_empty() {
        let args = arg_srcs
            .into_iter()
            .map(|s| parse::polynomial(s, Some(dim)))
            .collect::<Result<Vec<_>>>()?;
        out["applied"] = Value::String(result.apply(&args)?.to_string());
    }
    Ok((out, 0))
}

fn cmd_hkr(flags: &Flags) -> Result<(Value, i32)> {
    let src = need(flags, "multivector")?;
    let dim = DimResolver::new()
        .expr(src, ParseKind::Multivector)?
        .resolve(flags)?;
    let x = parse::multivector(src, Some(dim))?;
    let op = hkr_map(&x)?;
    let chain = hkr_chain_check(&x)?;
    Ok((
        json!({
            "canonical": op.to_string(),
            "chain_residual": chain.to_string(),
            "operator": op.to_json(),
        }),
        0,
    ))
}

fn cmd_hkr_defect(flags: &Flags) -> Result<(Value, i32)> {
    let a_src = need(flags, "a")?;
    let b_src = need(flags, "b")?;
    let dim = DimResolver::new()
        .expr(a_src, ParseKind::Multivector)?
        .expr(b_src, ParseKind::Multivector)?
        .resolve(flags)?;
    let a = parse::multivector(a_src, Some(dim))?;
    let b = parse::multivector(b_src, Some(dim))?;
    let r = hkr_bracket_defect(&a, &b)?;
    Ok((
        json!({
            "canonical": r.defect.to_string(),
            "closed": r.closed,
            "defect": r.defect.to_json(),
        }),
        0,
    ))
}

fn cmd_linfty_check(flags: &Flags) -> Result<(Value, i32)> {
    let samples_src = need(flags, "samples")?;
    let mut pairs_src = Vec::new();
    for sample in samples_src.split('|') {
        let parts: Vec<&str> = sample.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(usage_err(
                "--samples must be 'x , y' pairs separated by '|'",
            ));
        }
        pairs_src.push((parts[0], parts[1]));
    }
    let mut resolver = DimResolver::new();
    for (a, b) in &pairs_src {
        resolver
            .expr(a, ParseKind::Multivector)?
            .expr(b, ParseKind::Multivector)?;
    }
    let dim = resolver.resolve(flags)?;
    let samples = pairs_src
        .into_iter()
        .map(|(a, b)| {
            Ok((
                parse::multivector(a, Some(dim))?,
                parse::multivector(b, Some(dim))?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let family = match opt(flags, "family").unwrap_or("hkr") {
        "hkr" => LInftyMapFamily::hkr(),
        "zero" => LInftyMapFamily::zero(),
        other => return Err(usage_err(format!("unknown --family '{}'", other))),
    };
    let reports = linfty_check(&family, &samples)?;
    let all_pass = reports.iter().all(|r| r.all_pass());
    let out = json!({
        "all_pass": all_pass,
        "samples": reports
            .iter()
            .map(|r| {
                json!({
                    "antisymmetry": r.antisymmetry,
                    "bracket_compat": r.bracket_compat,
                    "chain_map": r.chain_map,
                })
            })
            .collect::<Vec<_>>(),
    });
    Ok((out, if all_pass { 0 } else { 3 }))
}

// keep the Schouten context nameable from the dispatch docs
#[allow(unused)]
fn _schouten_context() -> SchoutenDgla {
    SchoutenDgla
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String) {
        let owned: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        run_capture(&owned)
    }

    #[test]
    fn dispatch_table_is_a_bijection_onto_operations() {
        let catalog = [
            "series_add", "series_mul", "series_invert",
            "poly_ring_ops", "partial_derive", "evaluate",
            "wedge", "schouten_bracket", "sharp", "poisson_bracket",
            "hamiltonian_vf", "jacobiator", "is_poisson",
            "apply", "mult_op", "gerst_product", "gerst_bracket",
            "hochschild_d", "is_normalized",
            "moyal_star", "star_apply", "associator_residual",
            "first_order_skew", "mc_residual_star", "equivalence_apply",
            "formal_poisson_bracket", "mc_residual_poisson", "bch",
            "gauge_act_dgla", "gauge_apply_bivector",
            "hkr_map", "hkr_chain_check", "hkr_bracket_defect", "linfty_check",
            "parse",
        ];
        let mut seen = std::collections::BTreeMap::new();
        for (sub, ops) in DISPATCH {
            for op in *ops {
                if let Some(previous) = seen.insert(*op, *sub) {
                    panic!("operation {} mapped from both {} and {}", op, previous, sub);
                }
            }
        }
        for op in catalog {
            assert!(
                seen.contains_key(op),
                "operation {} is not reachable from any subcommand",
                op
            );
        }
        assert_eq!(seen.len(), catalog.len());
        assert_eq!(DISPATCH.len(), 19);
    }

    #[test]
    fn exit_codes() {
        // success
        let (code, out) = run(&["pbracket", "--dim", "2", "--bivector", "d1^d2", "--f", "x1", "--g", "x2"]);
        assert_eq!(code, 0);
        assert_eq!(out, "{\"result\":\"1\"}\n");
        // parse error
        let (code, _) = run(&["pbracket", "--bivector", "d1^^d2", "--f", "x1", "--g", "x2"]);
        assert_eq!(code, 1);
        // domain error: degree mismatch
        let (code, _) = run(&["pbracket", "--bivector", "d1", "--f", "x1", "--g", "x2"]);
        assert_eq!(code, 2);
        // check failed
        let (code, _) = run(&["poisson-check", "--dim", "3", "--bivector", "d1^d2 + x2*d2^d3"]);
        assert_eq!(code, 3);
        // unknown subcommand
        let (code, _) = run(&["frobnicate"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn golden_shapes() {
        let (code, out) = run(&["poisson-check", "--dim", "3", "--bivector", "d1^d2 + x2*d2^d3"]);
        assert_eq!(code, 3);
        assert_eq!(out, "{\"poisson\":false,\"witness\":\"2*d1^d2^d3\"}\n");

        let (code, out) = run(&[
            "moyal", "--alpha", "[[0,1],[-1,0]]", "--order", "2", "--f", "x1", "--g", "x2",
        ]);
        assert_eq!(code, 0);
        assert_eq!(
            out,
            "{\"series\":{\"coeffs\":[\"x1*x2\",\"1/2*i\",\"0\"],\"order\":2}}\n"
        );

        let (code, out) = run(&[
            "assoc-check", "--star", "moyal", "--alpha", "[[0,1],[-1,0]]", "--order", "4",
            "--f", "x1**2", "--g", "x2", "--h", "x1*x2",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "{\"residual\":\"0\"}\n");
    }

    #[test]
    fn file_input_merges_flags() {
        let dir = std::env::temp_dir().join("dq-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("input.json");
        std::fs::write(
            &path,
            "{\"bivector\": \"d1^d2\", \"f\": \"x1\", \"g\": \"x2\", \"dim\": \"2\"}",
        )
        .unwrap();
        let (code, out) = run(&["pbracket", "--file", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        assert_eq!(out, "{\"result\":\"1\"}\n");
        // explicit flags override file entries
        let (code, out) = run(&[
            "pbracket", "--file", path.to_str().unwrap(), "--g", "x1",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out, "{\"result\":\"0\"}\n");
    }

    #[test]
    fn every_subcommand_is_callable() {
        let cases: Vec<Vec<&str>> = vec![
            vec!["parse", "--kind", "polynomial", "--expr", "x1**2 - x2", "--derive", "1", "--eval", "1/2, 1/4"],
            vec!["poisson-check", "--dim", "2", "--bivector", "d1^d2"],
            vec!["schouten", "--a", "x2*d1", "--b", "d2", "--dim", "2"],
            vec!["sharp", "--bivector", "d1^d2", "--df", "x1"],
            vec!["pbracket", "--bivector", "d1^d2", "--f", "x1", "--g", "x2"],
            vec!["jacobiator", "--bivector", "d1^d2 + x2*d2^d3", "--f", "x1", "--g", "x2", "--h", "x3"],
            vec!["moyal", "--alpha", "[[0,1],[-1,0]]", "--order", "2"],
            vec!["star-apply", "--alpha", "[[0,1],[-1,0]]", "--order", "2", "--f", "1: x1", "--g", "x2"],
            vec!["assoc-check", "--alpha", "[[0,1],[-1,0]]", "--order", "3", "--f", "x1", "--g", "x2", "--h", "x1"],
            vec!["skew-p1", "--alpha", "[[0,1],[-1,0]]", "--order", "2"],
            vec!["mc-check", "--alpha", "[[0,1],[-1,0]]", "--order", "3"],
            vec!["equiv-apply", "--alpha", "[[0,1],[-1,0]]", "--order", "2", "--t", "1: [ d1 d1 ]"],
            vec!["gauge", "--vf", "0: x1*d1", "--pi", "1: d1^d2", "--order", "3"],
            vec!["bch", "--x", "0: x2*d1", "--y", "0: d2", "--order", "2"],
            vec!["hochschild-d", "--op", "[ ]", "--dim", "2"],
            vec!["gerst", "--a", "x1 [ d1 | d2 ]", "--b", "[ d1 ]", "--args", "x1, x2"],
            vec!["hkr", "--multivector", "x3*d1^d2"],
            vec!["hkr-defect", "--a", "d1^d2", "--b", "x1*d3"],
            vec!["linfty-check", "--samples", "x2*d1 , d2 | d1^d2 , x1*d3"],
        ];
        assert_eq!(cases.len(), DISPATCH.len());
        for case in cases {
            let (code, out) = run(&case);
            assert!(
                code == 0 || code == 3,
                "subcommand {:?} failed with code {}",
                case,
                code
            );
            assert!(out.ends_with('\n'));
            let parsed: Value = serde_json::from_str(out.trim()).unwrap();
            assert!(parsed.is_object());
        }
    }
}
