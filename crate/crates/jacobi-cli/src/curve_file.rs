//! Curve description files.
//!
//! ```text
//! # comment
//! n = 3
//! s = 4
//! range = strict          # or extended
//! lambda.2 = 1/3
//! lambda.5 = -0.25
//! lambda.8 = sym
//! ```
//!
//! Values are exact rationals (`p/q` or integers), decimals, or `sym`.
//! Parameters not listed are zero.

use std::collections::BTreeMap;
use std::str::FromStr;

use jacobi_core::{CurveFamily, Lambda, ParameterRange};
use num_complex::Complex64;
use num_rational::BigRational;

pub fn parse(text: &str) -> Result<CurveFamily, String> {
    let mut n = None;
    let mut s = None;
    let mut range = ParameterRange::Strict;
    let mut lambda = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: String| format!("line {}: {m}", idx + 1);
        let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "n" => n = Some(value.parse::<u32>().map_err(|e| err(format!("n: {e}")))?),
            "s" => s = Some(value.parse::<u32>().map_err(|e| err(format!("s: {e}")))?),
            "range" => {
                range = match value {
                    "strict" => ParameterRange::Strict,
                    "extended" => ParameterRange::Extended,
                    other => return Err(err(format!("unknown range {other:?}"))),
                }
            }
            _ => {
                let k = key
                    .strip_prefix("lambda.")
                    .ok_or_else(|| err(format!("unknown key {key:?}")))?
                    .parse::<u32>()
                    .map_err(|e| err(format!("{key}: {e}")))?;
                if lambda.insert(k, parse_value(value).map_err(err)?).is_some() {
                    return Err(err(format!("λ_{k} given twice")));
                }
            }
        }
    }
    let n = n.ok_or("missing n")?;
    let s = s.ok_or("missing s")?;
    CurveFamily::new(n, s, lambda, range).map_err(|e| e.to_string())
}

fn parse_value(v: &str) -> Result<Lambda, String> {
    if v == "sym" {
        return Ok(Lambda::Symbolic);
    }
    if let Ok(q) = BigRational::from_str(v) {
        return Ok(Lambda::Exact(q));
    }
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .map(|x| Lambda::Numeric(Complex64::new(x, 0.0)))
        .ok_or_else(|| format!("cannot read {v:?} as a rational, decimal or sym"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_all_value_kinds() {
        let fam = parse("n = 3\ns = 4\nlambda.2 = 1/3 # exact\nlambda.5 = -0.25\nlambda.8 = sym\n").unwrap();
        assert_eq!(fam.genus, 3);
        assert_eq!(fam.lambda(2), Some(&Lambda::Exact(BigRational::new(1.into(), 3.into()))));
        assert_eq!(fam.lambda(5), Some(&Lambda::Numeric(Complex64::new(-0.25, 0.0))));
        assert_eq!(fam.lambda(8), Some(&Lambda::Symbolic));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse("n = 3\n").is_err());
        assert!(parse("n = 4\ns = 6\n").is_err());
        assert!(parse("n = 3\ns = 4\nlambda.3 = 1\n").is_err());
        assert!(parse("n = 3\ns = 4\nlambda.2 = one\n").is_err());
        assert!(parse("n = 3\ns = 4\nmu = 1\n").is_err());
    }
}
