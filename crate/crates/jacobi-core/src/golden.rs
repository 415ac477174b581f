//! Reference inversion systems and the expansions behind them, compared
//! exactly against what the generator produces.
//!
//! The data lives in `golden/theorems.txt`; see the header of that file for
//! the line format.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::algebra::{parse_rational, LambdaMonomial, WeightedPoly};
use crate::curve::{CurveFamily, Monomial, ParameterRange};
use crate::expansions::{FirstKindBasis, InfinityChart, SecondKindBasis};
use crate::sigma::{build_inversion_system, generator_order, log_sigma_derivative_expansion, AbelianExpr, AbelianSymbol};

const THEOREMS: &str = include_str!("../golden/theorems.txt");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GoldenError {
    #[error("golden data line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Debug, Clone, Copy)]
struct Env {
    m: i64,
    i: Option<i64>,
    w: Option<i64>,
}

/// c + a·m + b·i + d·w.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Affine {
    c: i64,
    m: i64,
    i: i64,
    w: i64,
}

impl Affine {
    fn constant(c: i64) -> Self {
        Affine { c, ..Default::default() }
    }

    fn parse(text: &str) -> Result<Self, String> {
        let s: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err("empty exponent".into());
        }
        let mut out = Affine::default();
        let mut k = 0;
        while k < s.len() {
            let mut sign = 1;
            if s[k] == '+' || s[k] == '-' {
                sign = if s[k] == '-' { -1 } else { 1 };
                k += 1;
            } else if k > 0 {
                return Err(format!("bad affine expression {text:?}"));
            }
            let start = k;
            while k < s.len() && s[k].is_ascii_digit() {
                k += 1;
            }
            let digits: Option<i64> = if k > start { s[start..k].iter().collect::<String>().parse().ok() } else { None };
            let var = if k < s.len() && s[k].is_ascii_alphabetic() {
                k += 1;
                Some(s[k - 1])
            } else {
                None
            };
            let coef = sign * digits.unwrap_or(1);
            match var {
                None if digits.is_none() => return Err(format!("bad affine expression {text:?}")),
                None => out.c += coef,
                Some('m') => out.m += coef,
                Some('i') => out.i += coef,
                Some('w') => out.w += coef,
                Some(v) => return Err(format!("unknown variable {v} in {text:?}")),
            }
        }
        Ok(out)
    }

    fn eval(&self, env: &Env) -> Result<i64, String> {
        let i = match (self.i, env.i) {
            (0, _) => 0,
            (_, Some(i)) => i,
            (_, None) => return Err("i is not bound here".into()),
        };
        let w = match (self.w, env.w) {
            (0, _) => 0,
            (_, Some(w)) => w,
            (_, None) => return Err("w is not bound here".into()),
        };
        Ok(self.c + self.m * env.m + self.i * i + self.w * w)
    }

    fn eval_u32(&self, env: &Env) -> Result<u32, String> {
        let v = self.eval(env)?;
        u32::try_from(v).map_err(|_| format!("negative value {v}"))
    }
}

#[derive(Debug, Clone)]
enum SymbolTemplate {
    Zeta(Affine),
    Wp(Vec<Affine>),
}

#[derive(Debug, Clone)]
struct Term {
    coef: BigRational,
    lambda: Vec<(u32, Affine)>,
    x: Affine,
    y: Affine,
    t: Affine,
    symbol: Option<SymbolTemplate>,
}

/// One evaluated term: λ-polynomial times x^x y^y t^t times a symbol.
struct Concrete {
    poly: WeightedPoly<BigRational>,
    x: u32,
    y: u32,
    t: i32,
    symbol: Option<AbelianSymbol>,
}

#[derive(Debug, Clone)]
struct Template(Vec<Term>);

impl Template {
    fn parse(text: &str) -> Result<Self, String> {
        let mut pieces: Vec<(bool, String)> = Vec::new();
        let mut depth = 0i32;
        let mut current = String::new();
        let mut negative = false;
        for ch in text.chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            if depth == 0 && (ch == '+' || ch == '-') {
                if !current.trim().is_empty() {
                    pieces.push((negative, std::mem::take(&mut current)));
                } else if !pieces.is_empty() || negative {
                    return Err(format!("dangling sign in {text:?}"));
                }
                current.clear();
                negative = ch == '-';
                continue;
            }
            current.push(ch);
        }
        if current.trim().is_empty() {
            return Err(format!("empty term in {text:?}"));
        }
        pieces.push((negative, current));
        pieces.into_iter().map(|(neg, p)| parse_term(&p, neg)).collect::<Result<_, _>>().map(Template)
    }

    fn eval(&self, env: &Env) -> Result<Vec<Concrete>, String> {
        self.0
            .iter()
            .map(|t| {
                let pairs = t.lambda.iter().map(|(k, e)| Ok((*k, e.eval_u32(env)?))).collect::<Result<Vec<_>, String>>()?;
                let symbol = match &t.symbol {
                    None => None,
                    Some(SymbolTemplate::Zeta(a)) => Some(AbelianSymbol::Zeta(a.eval_u32(env)?)),
                    Some(SymbolTemplate::Wp(idx)) => {
                        Some(AbelianSymbol::wp(idx.iter().map(|a| a.eval_u32(env)).collect::<Result<_, _>>()?))
                    }
                };
                Ok(Concrete {
                    poly: WeightedPoly::term(LambdaMonomial::from_pairs(pairs), t.coef.clone()),
                    x: t.x.eval_u32(env)?,
                    y: t.y.eval_u32(env)?,
                    t: t.t.eval(env)? as i32,
                    symbol,
                })
            })
            .collect()
    }

    fn abelian(&self, env: &Env) -> Result<AbelianExpr<BigRational>, String> {
        let mut out = AbelianExpr::zero();
        for c in self.eval(env)? {
            if c.x != 0 || c.y != 0 || c.t != 0 {
                return Err("unexpected x, y or t in an abelian expression".into());
            }
            out = out.add(&match c.symbol {
                Some(s) => AbelianExpr::symbol(s, c.poly),
                None => AbelianExpr::constant(c.poly),
            });
        }
        Ok(out)
    }

    fn curve_function(&self, fam: &CurveFamily, env: &Env) -> Result<BTreeMap<Monomial, AbelianExpr<BigRational>>, String> {
        let mut out: BTreeMap<Monomial, AbelianExpr<BigRational>> = BTreeMap::new();
        for c in self.eval(env)? {
            if c.t != 0 {
                return Err("unexpected t in a function on the curve".into());
            }
            let e = match c.symbol {
                Some(s) => AbelianExpr::symbol(s, c.poly),
                None => AbelianExpr::constant(c.poly),
            };
            let slot = out.entry(fam.monomial(c.y, c.x)).or_default();
            *slot = slot.add(&e);
        }
        out.retain(|_, e| !e.is_zero());
        Ok(out)
    }

    fn series(&self, env: &Env) -> Result<BTreeMap<i32, WeightedPoly<BigRational>>, String> {
        let mut out: BTreeMap<i32, WeightedPoly<BigRational>> = BTreeMap::new();
        for c in self.eval(env)? {
            if c.x != 0 || c.y != 0 || c.symbol.is_some() {
                return Err("a series may only contain λ and t".into());
            }
            let slot = out.entry(c.t).or_default();
            *slot = &*slot + &c.poly;
        }
        out.retain(|_, p| !p.is_zero());
        Ok(out)
    }

    fn single_monomial(&self, fam: &CurveFamily, env: &Env) -> Result<Monomial, String> {
        match self.eval(env)?.as_slice() {
            [c] if c.symbol.is_none() && c.t == 0 && c.poly.as_constant().is_some_and(|q| q == BigRational::from_integer(1.into())) => {
                Ok(fam.monomial(c.y, c.x))
            }
            _ => Err("basis entries must be a bare monomial".into()),
        }
    }
}

fn parse_term(text: &str, negative: bool) -> Result<Term, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut term = Term {
        coef: BigRational::from_integer(if negative { (-1).into() } else { 1.into() }),
        lambda: Vec::new(),
        x: Affine::default(),
        y: Affine::default(),
        t: Affine::default(),
        symbol: None,
    };
    let mut k = 0;
    let read_while = |k: &mut usize, pred: &dyn Fn(char) -> bool| {
        let start = *k;
        while *k < chars.len() && pred(chars[*k]) {
            *k += 1;
        }
        chars[start..*k].iter().collect::<String>()
    };
    let read_group = |k: &mut usize| -> Result<String, String> {
        // chars[*k] == '('
        let mut depth = 0;
        let start = *k + 1;
        while *k < chars.len() {
            match chars[*k] {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth == 0 {
                        *k += 1;
                        return Ok(chars[start..*k - 1].iter().collect());
                    }
                }
                _ => {}
            }
            *k += 1;
        }
        Err(format!("unbalanced parentheses in {text:?}"))
    };
    while k < chars.len() {
        let ch = chars[k];
        if ch.is_whitespace() || ch == '*' {
            k += 1;
            continue;
        }
        if ch.is_ascii_digit() {
            let num = read_while(&mut k, &|c: char| c.is_ascii_digit() || c == '/');
            let q = parse_rational(&num).ok_or_else(|| format!("bad rational {num:?}"))?;
            term.coef *= q;
            continue;
        }
        if !ch.is_ascii_alphabetic() {
            return Err(format!("unexpected {ch:?} in {text:?}"));
        }
        let name = read_while(&mut k, &|c: char| c.is_ascii_alphabetic());
        let args = if k < chars.len() && chars[k] == '(' { Some(read_group(&mut k)?) } else { None };
        let exponent = if k < chars.len() && chars[k] == '^' {
            k += 1;
            if k < chars.len() && chars[k] == '(' {
                Some(Affine::parse(&read_group(&mut k)?)?)
            } else {
                Some(Affine::parse(&read_while(&mut k, &|c: char| c.is_ascii_alphanumeric()))?)
            }
        } else {
            None
        };
        let exp = exponent.unwrap_or(Affine::constant(1));
        match name.as_str() {
            "l" => {
                let idx = read_while(&mut k, &|c: char| c.is_ascii_digit());
                let idx: u32 = idx.parse().map_err(|_| format!("λ needs an index in {text:?}"))?;
                let exp = if k < chars.len() && chars[k] == '^' {
                    k += 1;
                    Affine::parse(&read_while(&mut k, &|c: char| c.is_ascii_alphanumeric()))?
                } else {
                    Affine::constant(1)
                };
                term.lambda.push((idx, exp));
            }
            "x" => term.x = exp,
            "y" => term.y = exp,
            "t" => term.t = exp,
            "zeta" | "wp" => {
                let args = args.ok_or_else(|| format!("{name} needs indices"))?;
                let idx = args.split(',').map(Affine::parse).collect::<Result<Vec<_>, _>>()?;
                if term.symbol.is_some() {
                    return Err(format!("two symbols in one term: {text:?}"));
                }
                term.symbol = Some(if name == "zeta" {
                    if idx.len() != 1 {
                        return Err("ζ takes one index".into());
                    }
                    SymbolTemplate::Zeta(idx[0])
                } else {
                    SymbolTemplate::Wp(idx)
                });
            }
            other => return Err(format!("unknown factor {other:?}")),
        }
    }
    Ok(term)
}

#[derive(Debug, Clone)]
struct BasisLine {
    label: Affine,
    monomial: Template,
    upper: Affine,
}

/// One block of reference data.
#[derive(Debug, Clone)]
pub struct GoldenSection {
    pub name: String,
    n: u32,
    s: Affine,
    instances: Option<Vec<i64>>,
    range: ParameterRange,
    basis: Vec<BasisLine>,
    dr: Vec<Template>,
    a: Vec<Template>,
    zeta: Vec<Template>,
    e: Vec<Template>,
    r: Vec<Template>,
    full: Vec<Template>,
    by_weight: BTreeMap<u32, Template>,
    puiseux: Option<(Template, i32)>,
}

impl GoldenSection {
    /// (n, s) for every instance the section lists.
    pub fn curves(&self) -> Vec<(u32, u32)> {
        self.instance_values()
            .into_iter()
            .filter_map(|m| self.s.eval(&Env { m, i: None, w: None }).ok().map(|s| (self.n, s as u32)))
            .collect()
    }

    pub fn range(&self) -> ParameterRange {
        self.range
    }

    fn instance_values(&self) -> Vec<i64> {
        self.instances.clone().unwrap_or_else(|| vec![0])
    }
}

/// Parses the bundled reference data.
pub fn sections() -> Result<Vec<GoldenSection>, GoldenError> {
    parse_sections(THEOREMS)
}

fn parse_sections(text: &str) -> Result<Vec<GoldenSection>, GoldenError> {
    let mut out: Vec<GoldenSection> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| GoldenError::Syntax { line, message };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            out.push(GoldenSection {
                name: name.trim().to_string(),
                n: 0,
                s: Affine::default(),
                instances: None,
                range: ParameterRange::Strict,
                basis: Vec::new(),
                dr: Vec::new(),
                a: Vec::new(),
                zeta: Vec::new(),
                e: Vec::new(),
                r: Vec::new(),
                full: Vec::new(),
                by_weight: BTreeMap::new(),
                puiseux: None,
            });
            continue;
        }
        let sec = out.last_mut().ok_or_else(|| err("data before the first section".into()))?;
        let (key, value) = body.split_once('=').ok_or_else(|| err("expected key = value".into()))?;
        let value = value.trim();
        match key.trim() {
            "curve" => {
                let (n, s) = value.split_once(',').ok_or_else(|| err("curve = n, s".into()))?;
                sec.n = n.trim().parse().map_err(|_| err(format!("bad n {n:?}")))?;
                sec.s = Affine::parse(s).map_err(err)?;
            }
            "m" => {
                let ms = value.split(',').map(|v| v.trim().parse::<i64>()).collect::<Result<Vec<_>, _>>();
                sec.instances = Some(ms.map_err(|_| err(format!("bad m list {value:?}")))?);
            }
            "range" => {
                sec.range = match value {
                    "strict" => ParameterRange::Strict,
                    "extended" => ParameterRange::Extended,
                    other => return Err(err(format!("unknown range {other:?}"))),
                }
            }
            "basis" => {
                let parts: Vec<&str> = value.split(':').collect();
                let [label, mono, upper] = parts.as_slice() else {
                    return Err(err("basis = label : monomial : upper".into()));
                };
                sec.basis.push(BasisLine {
                    label: Affine::parse(label).map_err(err)?,
                    monomial: Template::parse(mono).map_err(err)?,
                    upper: Affine::parse(upper).map_err(err)?,
                });
            }
            "puiseux" => {
                let (series, order) = value.split_once('|').ok_or_else(|| err("puiseux = series | order".into()))?;
                let order: i32 = order.trim().parse().map_err(|_| err(format!("bad order {order:?}")))?;
                sec.puiseux = Some((Template::parse(series).map_err(err)?, order));
            }
            key @ ("dr" | "A" | "zeta" | "E" | "r" | "R") => {
                let t = Template::parse(value).map_err(err)?;
                match key {
                    "dr" => sec.dr.push(t),
                    "A" => sec.a.push(t),
                    "zeta" => sec.zeta.push(t),
                    "E" => sec.e.push(t),
                    "r" => sec.r.push(t),
                    _ => sec.full.push(t),
                }
            }
            other => {
                let weight = other.strip_prefix('R').and_then(|w| w.parse::<u32>().ok());
                let weight = weight.ok_or_else(|| err(format!("unknown key {other:?}")))?;
                sec.by_weight.insert(weight, Template::parse(value).map_err(err)?);
            }
        }
    }
    Ok(out)
}

/// Outcome of one comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenCheck {
    pub section: String,
    pub n: u32,
    pub s: u32,
    pub item: String,
    /// `None` when the generated object equals the reference.
    pub mismatch: Option<String>,
}

impl GoldenCheck {
    pub fn passed(&self) -> bool {
        self.mismatch.is_none()
    }
}

impl fmt::Display for GoldenCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "ok" } else { "MISMATCH" };
        write!(f, "{} ({},{}) {}: {status}", self.section, self.n, self.s, self.item)?;
        if let Some(m) = &self.mismatch {
            write!(f, " ({m})")?;
        }
        Ok(())
    }
}

/// Runs every comparison in every section.
pub fn check_all() -> Result<Vec<GoldenCheck>, GoldenError> {
    Ok(sections()?.iter().flat_map(check_section).collect())
}

/// Runs the comparisons of every section that covers the curve (n, s).
pub fn check_curve(n: u32, s: u32, range: ParameterRange) -> Result<Vec<GoldenCheck>, GoldenError> {
    let mut out = Vec::new();
    for sec in sections()? {
        if sec.range != range {
            continue;
        }
        for m in sec.instance_values() {
            if sec.n == n && sec.s.eval(&Env { m, i: None, w: None }).ok() == Some(s as i64) {
                out.extend(check_instance(&sec, m));
            }
        }
    }
    Ok(out)
}

pub fn check_section(sec: &GoldenSection) -> Vec<GoldenCheck> {
    sec.instance_values().into_iter().flat_map(|m| check_instance(sec, m)).collect()
}

fn show_map<K: fmt::Display, V: fmt::Display>(map: &BTreeMap<K, V>) -> String {
    if map.is_empty() {
        return "0".into();
    }
    map.iter().map(|(k, v)| format!("({v})·{k}")).collect::<Vec<_>>().join(" + ")
}

struct Generated {
    fam: CurveFamily,
    system: crate::RationalSystem,
    chart: InfinityChart<BigRational>,
    first: FirstKindBasis<BigRational>,
    second: SecondKindBasis<BigRational>,
    expansion: Vec<AbelianExpr<BigRational>>,
}

fn generate(sec: &GoldenSection, s: u32) -> Result<Generated, String> {
    let fam = CurveFamily::symbolic_with_range(sec.n, s, sec.range).map_err(|e| e.to_string())?;
    let system = build_inversion_system::<BigRational>(&fam).map_err(|e| e.to_string())?;
    let order = generator_order(&fam).max(sec.puiseux.as_ref().map_or(0, |p| p.1));
    let chart = InfinityChart::<BigRational>::expand(&fam, order).map_err(|e| e.to_string())?;
    let first = FirstKindBasis::new(&chart).map_err(|e| e.to_string())?;
    let second = SecondKindBasis::associated(&chart, &first).map_err(|e| e.to_string())?;
    let depth = system.r_functions.len() - 1;
    let expansion = log_sigma_derivative_expansion(&first, depth).map_err(|e| e.to_string())?;
    Ok(Generated { fam, system, chart, first, second, expansion })
}

fn check_instance(sec: &GoldenSection, m: i64) -> Vec<GoldenCheck> {
    let env = Env { m, i: None, w: None };
    let s = sec.s.eval(&env).unwrap_or(0) as u32;
    let mut out = Vec::new();
    let mut push = |item: String, result: Result<(), String>| {
        out.push(GoldenCheck { section: sec.name.clone(), n: sec.n, s, item, mismatch: result.err() });
    };
    let gen = match generate(sec, s) {
        Ok(g) => g,
        Err(e) => {
            push("generate".into(), Err(e));
            return out;
        }
    };
    let fam = &gen.fam;
    let two_g = 2 * fam.genus;

    let mut basis: BTreeMap<u32, Monomial> = BTreeMap::new();
    if !sec.basis.is_empty() {
        let result = (|| {
            for line in &sec.basis {
                for i in 1..=line.upper.eval(&env)? {
                    let e = Env { i: Some(i), ..env };
                    basis.insert(line.label.eval_u32(&e)?, line.monomial.single_monomial(fam, &e)?);
                }
            }
            let generated: BTreeMap<u32, Monomial> =
                gen.first.gaps.iter().copied().zip(gen.first.numerators.iter().copied()).collect();
            if generated == basis {
                Ok(())
            } else {
                Err(format!("expected {}, got {}", show_map(&basis), show_map(&generated)))
            }
        })();
        push("basis".into(), result);
    }

    for (idx, t) in sec.dr.iter().enumerate() {
        let result = (|| {
            let want = t.curve_function(fam, &env)?;
            let got: BTreeMap<Monomial, AbelianExpr<BigRational>> = gen.system.second_kind_numerators[idx]
                .terms
                .iter()
                .map(|(m, c)| (*m, AbelianExpr::constant(c.clone())))
                .collect();
            if want == got {
                Ok(())
            } else {
                Err(format!("expected {}, got {}", show_map(&want), show_map(&got)))
            }
        })();
        push(format!("dr{}", idx + 1), result);
    }

    for (idx, t) in sec.a.iter().enumerate() {
        let label = idx as u32 + 1;
        let result = (|| {
            for &w in &fam.gaps {
                let want = t.abelian(&Env { w: Some(w as i64), ..env })?;
                let got = gen.system.coefficients.get(&(label, w)).cloned().unwrap_or_default();
                if want != got {
                    return Err(format!("w={w}: expected {want}, got {got}"));
                }
            }
            Ok(())
        })();
        push(format!("A{label}"), result);
    }

    let assembled = !basis.is_empty() && sec.a.len() == sec.dr.len();
    for idx in 0..gen.system.r_functions.len() {
        let label = idx as u32 + 1;
        let weight = two_g + label - 1;
        let want = if let Some(t) = sec.full.get(idx).or_else(|| sec.by_weight.get(&weight)) {
            t.curve_function(fam, &env)
        } else if assembled && idx < sec.dr.len() {
            (|| {
                let mut f = sec.dr[idx].curve_function(fam, &env)?;
                for (&w, mono) in &basis {
                    let a = sec.a[idx].abelian(&Env { w: Some(w as i64), ..env })?;
                    let slot = f.entry(*mono).or_default();
                    *slot = slot.sub(&a);
                }
                f.retain(|_, e| !e.is_zero());
                Ok(f)
            })()
        } else {
            continue;
        };
        let result = want.and_then(|want| {
            let got: BTreeMap<Monomial, AbelianExpr<BigRational>> =
                gen.system.r_functions[idx].terms.iter().filter(|(_, e)| !e.is_zero()).map(|(m, e)| (*m, e.clone())).collect();
            if want == got {
                Ok(())
            } else {
                Err(format!("expected {}, got {}", show_map(&want), show_map(&got)))
            }
        });
        push(format!("R{weight}"), result);
    }

    for (idx, t) in sec.zeta.iter().enumerate() {
        let result = t.abelian(&env).and_then(|want| {
            let got = gen.system.zeta_relations.get(idx).cloned().unwrap_or_default();
            if want == got {
                Ok(())
            } else {
                Err(format!("expected {want}, got {got}"))
            }
        });
        push(format!("zeta{}", idx + 1), result);
    }

    if let Some((t, order)) = &sec.puiseux {
        let result = t.series(&env).and_then(|want| {
            for e in 0..*order {
                let w = want.get(&e).cloned().unwrap_or_default();
                let g = gen.chart.h_series().coeff(e).map_err(|x| x.to_string())?;
                if w != g {
                    return Err(format!("t^{e}: expected {w}, got {g}"));
                }
            }
            Ok(())
        });
        push("puiseux".into(), result);
    }

    for (k, t) in sec.e.iter().enumerate() {
        let result = t.abelian(&env).and_then(|want| {
            let got = gen.expansion.get(k).cloned().ok_or("expansion too short")?;
            if want == got {
                Ok(())
            } else {
                Err(format!("expected {want}, got {got}"))
            }
        });
        push(format!("E{k}"), result);
    }

    for (idx, t) in sec.r.iter().enumerate() {
        let result = t.series(&env).and_then(|want| {
            let r = gen.second.r_series.get(idx).ok_or("no such second-kind integral")?;
            let lowest = r.lowest_exponent().min(want.keys().next().copied().unwrap_or(-1));
            for e in lowest..0 {
                let w = want.get(&e).cloned().unwrap_or_default();
                let g = r.coeff(e).map_err(|x| x.to_string())?;
                if w != g {
                    return Err(format!("t^{e}: expected {w}, got {g}"));
                }
            }
            Ok(())
        });
        push(format!("r{}", idx + 1), result);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_forms() {
        let env = Env { m: 2, i: Some(3), w: None };
        assert_eq!(Affine::parse("2m+1-i").unwrap().eval(&env).unwrap(), 2);
        assert_eq!(Affine::parse("3i-2").unwrap().eval(&env).unwrap(), 7);
        assert_eq!(Affine::parse("-2").unwrap().eval(&env).unwrap(), -2);
        assert!(Affine::parse("w").unwrap().eval(&env).is_err());
        assert!(Affine::parse("2q").is_err());
    }

    #[test]
    fn parses_abelian_template() {
        let t = Template::parse("- zeta(3) - 3/2 wp(1,2) + 1/2 l1 wp(1,1) + 1/2 wp(1,1,1)").unwrap();
        let e = t.abelian(&Env { m: 1, i: None, w: None }).unwrap();
        assert_eq!(e.coefficient(&AbelianSymbol::Zeta(3)), -WeightedPoly::<BigRational>::constant(crate::algebra::rat(1, 1)));
        assert_eq!(e.coefficient(&AbelianSymbol::wp(vec![1, 1])), WeightedPoly::lambda(1).scale(&crate::algebra::rat(1, 2)));
    }

    #[test]
    fn bundled_data_parses() {
        let secs = sections().unwrap();
        assert!(secs.iter().any(|s| s.name == "C55m4"));
        assert!(secs.iter().all(|s| s.n >= 2));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let err = parse_sections("[X]\ncurve = 3, 4\nA = wp(1,w\n").unwrap_err();
        assert!(matches!(err, GoldenError::Syntax { line: 3, .. }));
    }

    #[test]
    fn wrong_reference_is_reported() {
        let secs = parse_sections("[bad]\ncurve = 3, 4\nA = wp(1,w)\nA = wp(2,w) + wp(1,1,w)\n").unwrap();
        let checks = check_section(&secs[0]);
        let a2 = checks.iter().find(|c| c.item == "A2").unwrap();
        assert!(!a2.passed());
        assert!(checks.iter().find(|c| c.item == "A1").unwrap().passed());
    }
}
