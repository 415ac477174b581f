//! Command implementations behind the `jacobi` binary.
//!
//! Every command returns its report as a string plus a pass flag, so the
//! binary only handles argument parsing, output and exit codes.

pub mod curve_file;

use std::fmt::Write;

use jacobi_core::emit::{emit_system, EmitFormat};
use jacobi_core::expansions::{check_rcond, is_identity_columns};
use jacobi_core::sigma::{build_inversion_system_with_order, generator_order, SigmaError};
use jacobi_core::{golden, CurveFamily, CurvePoint, FirstKindBasis, InfinityChart, ParameterRange, SecondKindBasis};
use jacobi_numeric::divisor::{check_non_degenerate, roundtrip, roundtrip_one, seeded_divisor, seeded_family, Divisor};
use jacobi_numeric::hyper::{compute_periods, verify_inversion, wp_from_theta, HyperellipticCurve};
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, unreadable or inconsistent input: exit code 2.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A computation failed on valid input: exit code 1.
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Numeric(_) => 1,
        }
    }
}

impl From<jacobi_core::curve::CurveError> for CliError {
    fn from(e: jacobi_core::curve::CurveError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

/// Report text and whether every check in it passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub passed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, passed: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Latex,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "latex" => Ok(Format::Latex),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}, expected text, latex or json")),
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn symbolic(n: u32, s: u32, range: ParameterRange) -> Result<CurveFamily, CliError> {
    Ok(CurveFamily::symbolic_with_range(n, s, range)?)
}

/// Default truncation order 2g+n+2.
pub fn default_order(fam: &CurveFamily) -> i32 {
    (2 * fam.genus + fam.n + 2) as i32
}

fn checked_order(fam: &CurveFamily, order: Option<i32>) -> Result<i32, CliError> {
    let order = order.unwrap_or_else(|| default_order(fam));
    let min = 2 * fam.genus as i32 + 2;
    if order < min {
        return Err(CliError::Invalid(format!("order {order} is below 2g+2 = {min}")));
    }
    Ok(order)
}

pub fn cmd_info(n: u32, s: u32, format: Format) -> Result<Outcome, CliError> {
    let fam = symbolic(n, s, ParameterRange::Strict)?;
    let monos = fam.monomial_basis(2 * fam.genus as usize);
    let slots = fam.slots();
    if format == Format::Json {
        let v = json!({
            "n": n,
            "s": s,
            "genus": fam.genus,
            "gaps": fam.gaps,
            "sigma_weight": fam.sigma_weight(),
            "parameters": slots.iter().map(|(k, (j, i))| json!({"k": k, "j": j, "i": i})).collect::<Vec<_>>(),
            "monomials": monos.iter().map(|m| json!({"label": m.label, "weight": m.sato_weight, "monomial": m.to_string()})).collect::<Vec<_>>(),
        });
        return Ok(Outcome::ok(pretty(&v)));
    }
    let mut out = String::new();
    let gaps: Vec<String> = fam.gaps.iter().map(|w| w.to_string()).collect();
    writeln!(out, "curve ({n},{s})").unwrap();
    writeln!(out, "genus         {}", fam.genus).unwrap();
    writeln!(out, "gaps          {}", gaps.join(", ")).unwrap();
    writeln!(out, "sigma weight  {}", fam.sigma_weight()).unwrap();
    let params: Vec<String> = slots.iter().map(|(k, (j, i))| format!("λ{k}·{}", fam.monomial(*j, *i))).collect();
    writeln!(out, "parameters    {}", params.join(", ")).unwrap();
    writeln!(out, "{:>6} {:>6}  monomial", "label", "weight").unwrap();
    for m in monos {
        writeln!(out, "{:>6} {:>6}  {m}", m.label, m.sato_weight).unwrap();
    }
    Ok(Outcome::ok(out))
}

fn series_json<T: std::fmt::Display>(terms: impl Iterator<Item = (i32, T)>, order: i32) -> Value {
    json!({
        "terms": terms.map(|(e, c)| json!({"exponent": e, "coefficient": c.to_string()})).collect::<Vec<_>>(),
        "order": order,
    })
}

pub fn cmd_expand(n: u32, s: u32, order: Option<i32>, range: ParameterRange, format: Format) -> Result<Outcome, CliError> {
    let fam = symbolic(n, s, range)?;
    let order = checked_order(&fam, order)?;
    let chart = InfinityChart::<BigRational>::expand(&fam, order).map_err(|e| CliError::Numeric(e.to_string()))?;
    let first = FirstKindBasis::new(&chart).map_err(|e| CliError::Numeric(e.to_string()))?;
    let x = chart.x_series();
    let y = chart.y_series();
    if format == Format::Json {
        let u: Vec<Value> = first
            .gaps
            .iter()
            .zip(&first.u_series)
            .map(|(w, u)| json!({"w": w, "series": series_json(u.terms(), u.truncation_order())}))
            .collect();
        let v = json!({
            "n": n,
            "s": s,
            "order": order,
            "x": series_json(x.terms(), x.truncation_order()),
            "y": series_json(y.terms(), y.truncation_order()),
            "u": u,
        });
        return Ok(Outcome::ok(pretty(&v)));
    }
    let mut out = String::new();
    writeln!(out, "x(ξ) = {x}").unwrap();
    writeln!(out, "y(ξ) = {y}").unwrap();
    for (w, u) in first.gaps.iter().zip(&first.u_series) {
        writeln!(out, "u{w}(ξ) = {u}").unwrap();
    }
    Ok(Outcome::ok(out))
}

pub fn cmd_differentials(
    n: u32,
    s: u32,
    order: Option<i32>,
    range: ParameterRange,
    format: Format,
) -> Result<Outcome, CliError> {
    let fam = symbolic(n, s, range)?;
    let order = checked_order(&fam, order)?.max(generator_order(&fam));
    let numeric = |e: jacobi_core::expansions::ExpansionError| CliError::Numeric(e.to_string());
    let chart = InfinityChart::<BigRational>::expand(&fam, order).map_err(numeric)?;
    let first = FirstKindBasis::new(&chart).map_err(numeric)?;
    let second = SecondKindBasis::associated(&chart, &first).map_err(numeric)?;
    let pairing = check_rcond(&first, &second).map_err(numeric)?;
    let identity = is_identity_columns(&first.gaps, &pairing);
    let dr: Vec<Vec<(String, String)>> = second
        .numerators
        .iter()
        .map(|f| f.terms.iter().rev().map(|(m, c)| (m.to_string(), c.to_string())).collect())
        .collect();
    let text = if format == Format::Json {
        let v = json!({
            "n": n,
            "s": s,
            "first_kind": first.gaps.iter().zip(&first.numerators).map(|(w, m)| json!({"w": w, "numerator": m.to_string()})).collect::<Vec<_>>(),
            "second_kind": dr.iter().enumerate().map(|(i, t)| json!({
                "label": i + 1,
                "numerator": t.iter().map(|(m, c)| json!({"monomial": m, "coefficient": c})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "pairing_is_identity": identity,
        });
        pretty(&v)
    } else {
        let mut out = String::new();
        writeln!(out, "first kind: du_w = M dx/∂_y f").unwrap();
        for (w, m) in first.gaps.iter().zip(&first.numerators) {
            writeln!(out, "  du{w}: {m}").unwrap();
        }
        writeln!(out, "second kind: dr_l = M dx/∂_y f").unwrap();
        for (i, t) in dr.iter().enumerate() {
            let sum: Vec<String> = t.iter().map(|(m, c)| format!("({c})·{m}")).collect();
            writeln!(out, "  dr{}: {}", i + 1, sum.join(" + ")).unwrap();
        }
        writeln!(out, "residue pairing: {}", if identity { "identity" } else { "NOT identity" }).unwrap();
        out
    };
    Ok(Outcome { text, passed: identity })
}

pub fn cmd_formulas(
    n: u32,
    s: u32,
    m: u32,
    order: Option<i32>,
    range: ParameterRange,
    format: Format,
    check_golden: bool,
) -> Result<Outcome, CliError> {
    let fam = symbolic(n, s, range)?;
    if fam.m() != m {
        return Err(CliError::Invalid(format!("m = {m} does not match (n,s) = ({n},{s}), which has m = {}", fam.m())));
    }
    let order = match order {
        Some(o) => checked_order(&fam, Some(o))?,
        None => generator_order(&fam),
    };
    let sys = build_inversion_system_with_order::<BigRational>(&fam, order).map_err(|e| match e {
        SigmaError::OrderExceedsSupport { .. } => CliError::Invalid(e.to_string()),
        other => CliError::Numeric(other.to_string()),
    })?;
    let emit_format = match format {
        Format::Json => EmitFormat::Json,
        Format::Latex | Format::Text => EmitFormat::Latex,
    };
    let mut text = emit_system(&sys, emit_format);
    if !check_golden {
        return Ok(Outcome::ok(text));
    }
    let checks = golden::check_curve(n, s, range).map_err(|e| CliError::Numeric(e.to_string()))?;
    if checks.is_empty() {
        return Err(CliError::Invalid(format!("no reference data for ({n},{s}) in the {range:?} range")));
    }
    let passed = checks.iter().all(|c| c.passed());
    let mut report = String::new();
    for c in &checks {
        writeln!(report, "{c}").unwrap();
    }
    writeln!(report, "golden: {}", if passed { "PASS" } else { "FAIL" }).unwrap();
    if format == Format::Json {
        // Keep stdout a single JSON document.
        text = pretty(&json!({
            "system": serde_json::from_str::<Value>(&text).expect("emitter writes JSON"),
            "golden": checks.iter().map(|c| json!({
                "section": c.section, "item": c.item, "passed": c.passed(), "mismatch": c.mismatch,
            })).collect::<Vec<_>>(),
            "passed": passed,
        }));
    } else {
        text.push_str(&report);
    }
    Ok(Outcome { text, passed })
}

/// Divisor file: JSON list of [re x, im x, re y, im y].
pub fn parse_divisor(fam: &CurveFamily, text: &str) -> Result<Divisor, CliError> {
    let rows: Vec<[f64; 4]> = serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("divisor file: {e}")))?;
    let points = rows.iter().map(|r| CurvePoint::new(Complex64::new(r[0], r[1]), Complex64::new(r[2], r[3]))).collect();
    Divisor::new(fam, points).map_err(|e| CliError::Invalid(e.to_string()))
}

/// Round trip on `count` seeded divisors, or on the one in `divisor` if given.
pub fn cmd_roundtrip(
    curve: &str,
    divisor: Option<&str>,
    seed: u64,
    count: usize,
    tolerance: f64,
) -> Result<Outcome, CliError> {
    let fam = curve_file::parse(curve).map_err(CliError::Invalid)?;
    check_non_degenerate(&fam)?;
    if let Some(text) = divisor {
        let d = parse_divisor(&fam, text)?;
        if d.points.len() != fam.genus as usize {
            return Err(CliError::Invalid(format!("divisor has {} points, genus is {}", d.points.len(), fam.genus)));
        }
        if !d.non_special {
            return Err(CliError::Invalid("divisor is special".into()));
        }
        let (degree, err) = roundtrip_one(&fam, &d, seed).map_err(|e| CliError::Numeric(e.to_string()))?;
        let passed = err < tolerance && degree == fam.genus as usize;
        let v = json!({
            "n": fam.n, "s": fam.s, "genus": fam.genus, "seed": seed, "tolerance": tolerance,
            "chi_degree": degree, "max_relative_error": err, "passed": passed,
        });
        return Ok(Outcome { text: pretty(&v), passed });
    }
    let report = roundtrip(&fam, seed, count, tolerance).map_err(|e| CliError::Numeric(e.to_string()))?;
    let v = serde_json::to_value(&report).expect("report serializes");
    Ok(Outcome { text: pretty(&v), passed: report.passed })
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Residuals of the genus-one uniformization y² = P(x) at x = ℘, y = −½℘′.
pub fn uniformization_residuals(
    curve: &HyperellipticCurve,
    periods: &jacobi_numeric::hyper::PeriodData,
    count: usize,
    rng: &mut impl Rng,
) -> Result<Vec<(Complex64, f64)>, CliError> {
    (0..count)
        .map(|_| {
            let (a, b): (f64, f64) = (rng.gen_range(0.1..0.9), rng.gen_range(0.1..0.9));
            let u = periods.omega[(0, 0)] * a + periods.omega_prime[(0, 0)] * b;
            let wp = wp_from_theta(&[u], periods).map_err(|e| CliError::Numeric(e.to_string()))?;
            let (x, y) = (wp.wp2(1, 1), -0.5 * wp.wp3(1, 1, 1));
            Ok((u, (curve.p(x) - y * y).norm()))
        })
        .collect()
}

/// Default tolerance and sample count of the demo for genus g.
pub fn demo_defaults(g: u32) -> (f64, usize) {
    if g == 1 {
        (1e-8, 10)
    } else {
        (1e-6, 20)
    }
}

pub fn cmd_hyper_demo(g: u32, seed: u64, count: Option<usize>, tolerance: Option<f64>) -> Result<Outcome, CliError> {
    if !(1..=2).contains(&g) {
        return Err(CliError::Invalid(format!("genus must be 1 or 2, got {g}")));
    }
    let (default_tol, default_count) = demo_defaults(g);
    let tolerance = tolerance.unwrap_or(default_tol);
    let count = count.unwrap_or(default_count);
    let numeric = |e: &dyn std::fmt::Display| CliError::Numeric(e.to_string());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fam = seeded_family(2, 2 * g + 1, &mut rng)?;
    let curve = HyperellipticCurve::new(&fam).map_err(|e| numeric(&e))?;
    let periods = compute_periods(&curve).map_err(|e| numeric(&e))?;
    let g_us = g as usize;
    let matrix = |m: &nalgebra::DMatrix<Complex64>| -> Vec<Vec<[f64; 2]>> {
        (0..g_us).map(|i| (0..g_us).map(|j| pair(m[(i, j)])).collect()).collect()
    };
    let lambda: Vec<Value> = fam
        .numeric_lambdas()?
        .iter()
        .map(|(k, z)| json!({"k": k, "value": pair(*z)}))
        .collect();

    let mut worst: f64 = 0.0;
    let mut uniformization = Vec::new();
    if g == 1 {
        for (u, r) in uniformization_residuals(&curve, &periods, count, &mut rng)? {
            worst = worst.max(r);
            uniformization.push(json!({"u": pair(u), "residual": r}));
        }
    }
    let mut inversion = Vec::new();
    for _ in 0..count {
        let d = seeded_divisor(&fam, &mut rng).map_err(|e| numeric(&e))?;
        let report = verify_inversion(&curve, &periods, &d).map_err(|e| numeric(&e))?;
        worst = worst.max(report.max_abs_err);
        inversion.push(json!({
            "points": d.points.iter().map(|p| [p.x.re, p.x.im, p.y.re, p.y.im]).collect::<Vec<_>>(),
            "report": serde_json::to_value(&report).expect("report serializes"),
        }));
    }
    let passed = worst < tolerance;
    let v = json!({
        "n": 2,
        "s": 2 * g + 1,
        "genus": g,
        "seed": seed,
        "lambda": lambda,
        "branch_points": periods.branch_points.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
        "omega": matrix(&periods.omega),
        "omega_prime": matrix(&periods.omega_prime),
        "tau": matrix(&periods.tau),
        "characteristic": periods.theta.characteristic,
        "tau_asymmetry": periods.tau_asymmetry,
        "legendre_defect": periods.legendre_defect,
        "uniformization": uniformization,
        "inversion": inversion,
        "tolerance": tolerance,
        "max_abs_err": worst,
        "passed": passed,
    });
    Ok(Outcome { text: pretty(&v), passed })
}
