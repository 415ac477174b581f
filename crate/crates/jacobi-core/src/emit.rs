//! Text output of inversion systems: LaTeX and JSON.
//!
//! Monomials appear in descending Sató weight. Inside one monomial the
//! λ-only part comes first, then the ζ/℘ symbols in their canonical order.

use std::fmt::Write;

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde_json::{json, Map, Value};

use crate::algebra::{rational_string, LambdaMonomial, WeightedPoly};
use crate::curve::Monomial;
use crate::sigma::{AbelianExpr, AbelianSymbol};
use crate::RationalSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Latex,
    Json,
}

impl std::str::FromStr for EmitFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "latex" => Ok(EmitFormat::Latex),
            "json" => Ok(EmitFormat::Json),
            other => Err(format!("unknown format {other:?}, expected latex or json")),
        }
    }
}

pub fn emit_system(sys: &RationalSystem, format: EmitFormat) -> String {
    match format {
        EmitFormat::Latex => latex(sys),
        EmitFormat::Json => {
            let mut s = serde_json::to_string_pretty(&json_value(sys)).expect("JSON values always serialize");
            s.push('\n');
            s
        }
    }
}

/// Weight of the function with the given index.
fn function_weight(sys: &RationalSystem, idx: usize) -> u32 {
    2 * sys.fam.genus + sys.label(idx) - 1
}

fn monomials_descending(f: &crate::EntireRationalFn<AbelianExpr<BigRational>>) -> Vec<(&Monomial, &AbelianExpr<BigRational>)> {
    f.terms.iter().rev().filter(|(_, e)| !e.is_zero()).collect()
}

fn lambda_json(m: &LambdaMonomial) -> Value {
    let map: Map<String, Value> = m.exponents().iter().map(|(k, e)| (k.to_string(), json!(e))).collect();
    Value::Object(map)
}

fn coefficient_json(e: &AbelianExpr<BigRational>) -> Value {
    let mut obj = Map::new();
    let constant: Vec<Value> = e
        .constant_term()
        .terms()
        .map(|(m, q)| json!({ "lambda": lambda_json(m), "rational": rational_string(q) }))
        .collect();
    if !constant.is_empty() {
        obj.insert("constant".into(), Value::Array(constant));
    }
    let mut symbols = Vec::new();
    for (sym, poly) in e.terms() {
        for (m, q) in poly.terms() {
            symbols.push(json!({
                "kind": sym.kind(),
                "indices": sym.indices(),
                "lambda": lambda_json(m),
                "rational": rational_string(q),
            }));
        }
    }
    obj.insert("symbols".into(), Value::Array(symbols));
    Value::Object(obj)
}

pub fn json_value(sys: &RationalSystem) -> Value {
    let functions: Vec<Value> = sys
        .r_functions
        .iter()
        .enumerate()
        .map(|(idx, f)| {
            let terms: Vec<Value> = monomials_descending(f)
                .into_iter()
                .map(|(m, e)| json!({ "monomial": { "j": m.j, "i": m.i }, "coefficient": coefficient_json(e) }))
                .collect();
            json!({ "weight": function_weight(sys, idx), "terms": terms })
        })
        .collect();
    json!({
        "n": sys.fam.n,
        "s": sys.fam.s,
        "m": sys.fam.m(),
        "genus": sys.fam.genus,
        "gaps": sys.fam.gaps,
        "functions": functions,
    })
}

fn latex_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("\\tfrac{{{}}}{{{}}}", q.numer(), q.denom())
    }
}

fn latex_monomial(m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (v, e) in [("y", m.j), ("x", m.i)] {
        match e {
            0 => {}
            1 => parts.push(v.to_string()),
            _ => parts.push(format!("{v}^{{{e}}}")),
        }
    }
    parts.join(" ")
}

fn latex_lambda(m: &LambdaMonomial) -> String {
    m.exponents()
        .iter()
        .map(|&(k, e)| if e == 1 { format!("\\lambda_{{{k}}}") } else { format!("\\lambda_{{{k}}}^{{{e}}}") })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn latex_symbol(s: &AbelianSymbol) -> String {
    let idx = s.indices().iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    match s {
        AbelianSymbol::Zeta(_) => format!("\\zeta_{{{idx}}}(u)"),
        AbelianSymbol::Wp(_) => format!("\\wp_{{{idx}}}(u)"),
    }
}

/// Appends `± q·λ·rest` to `out`.
fn push_term(out: &mut String, q: &BigRational, lambda: &LambdaMonomial, rest: &[String]) {
    let negative = q.is_negative();
    let mag = q.abs();
    let mut factors: Vec<String> = Vec::new();
    let bare = lambda.is_one() && rest.iter().all(String::is_empty);
    if !mag.is_one() || bare {
        factors.push(latex_rational(&mag));
    }
    if !lambda.is_one() {
        factors.push(latex_lambda(lambda));
    }
    factors.extend(rest.iter().filter(|s| !s.is_empty()).cloned());
    let body = factors.join(" ");
    if out.is_empty() {
        if negative {
            out.push('-');
        }
    } else {
        out.push_str(if negative { " - " } else { " + " });
    }
    out.push_str(&body);
}

fn latex_function(f: &crate::EntireRationalFn<AbelianExpr<BigRational>>) -> String {
    let mut out = String::new();
    for (m, e) in monomials_descending(f) {
        let mono = latex_monomial(m);
        for (lam, q) in e.constant_term().terms() {
            push_term(&mut out, q, lam, std::slice::from_ref(&mono));
        }
        for (sym, poly) in e.terms() {
            let s = latex_symbol(sym);
            for (lam, q) in poly.terms() {
                push_term(&mut out, q, lam, &[mono.clone(), s.clone()]);
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// A λ-polynomial in LaTeX, `0` when empty.
pub fn latex_poly(p: &WeightedPoly<BigRational>) -> String {
    let mut out = String::new();
    for (lam, q) in p.terms() {
        push_term(&mut out, q, lam, &[]);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn latex(sys: &RationalSystem) -> String {
    let fam = &sys.fam;
    let gaps = fam.gaps.iter().map(u32::to_string).collect::<Vec<_>>().join(", ");
    let mut out = String::new();
    writeln!(out, "% ({},{})-curve, genus {}, gaps {}", fam.n, fam.s, fam.genus, gaps).unwrap();
    writeln!(out, "\\begin{{align*}}").unwrap();
    let last = sys.r_functions.len().saturating_sub(1);
    for (idx, f) in sys.r_functions.iter().enumerate() {
        let end = if idx == last { "" } else { " \\\\" };
        writeln!(out, "\\mathcal{{R}}_{{{}}}(x,y;u) &= {}{end}", function_weight(sys, idx), latex_function(f)).unwrap();
    }
    writeln!(out, "\\end{{align*}}").unwrap();
    out
}
