//! (n,s)-curves: parameters, gap sequence, weighted monomial list, evaluation.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::algebra::{Coefficient, WeightedPoly};
use crate::roots::{poly_roots, RootError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("n={n} and s={s} are not coprime")]
    NotCoprime { n: u32, s: u32 },
    #[error("need 2 <= n < s, got n={n}, s={s}")]
    InvalidDegrees { n: u32, s: u32 },
    #[error("λ_{k} is not a parameter of the ({n},{s}) family")]
    InvalidLambdaIndex { n: u32, s: u32, k: i64 },
    #[error("λ_{0} is symbolic; a numeric value is required")]
    SymbolicLambda(u32),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("curve is degenerate: branch points collide (separation {separation:e})")]
    Degenerate { separation: f64 },
}

/// Value attached to a curve parameter λ_k.
#[derive(Debug, Clone, PartialEq)]
pub enum Lambda {
    Symbolic,
    Exact(BigRational),
    Numeric(Complex64),
}

impl Lambda {
    pub fn numeric(&self) -> Option<Complex64> {
        match self {
            Lambda::Symbolic => None,
            Lambda::Exact(q) => Some(Complex64::new(q.to_f64().unwrap_or(f64::NAN), 0.0)),
            Lambda::Numeric(z) => Some(*z),
        }
    }
}

/// Which parameters a family admits.
///
/// `Strict` allows λ on y^j x^i with j ≤ n−2 and i ≤ s−2. `Extended`
/// also allows j = n−1 or i = s−1; those terms can be removed by a change
/// of variables but some worked examples keep them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParameterRange {
    #[default]
    Strict,
    Extended,
}

/// The monomial y^j x^i with its weight js+in and label js+in−2g+1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub sato_weight: u32,
    pub j: u32,
    pub i: u32,
    pub label: i64,
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [("y", self.j), ("x", self.i)]
            .iter()
            .filter(|(_, e)| *e > 0)
            .map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(""))
        }
    }
}

/// A point (x, y) on a numeric curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub x: Complex64,
    pub y: Complex64,
}

impl CurvePoint {
    pub fn new(x: Complex64, y: Complex64) -> Self {
        CurvePoint { x, y }
    }
}

/// Polynomial Σ c_M M(x,y) on the curve with coefficients of type `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntireRationalFn<T> {
    pub weight: u32,
    pub terms: BTreeMap<Monomial, T>,
}

impl<T> EntireRationalFn<T> {
    /// Highest Sató weight present.
    pub fn leading_weight(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.sato_weight)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveFamily {
    pub n: u32,
    pub s: u32,
    pub genus: u32,
    pub gaps: Vec<u32>,
    pub range: ParameterRange,
    lambda: BTreeMap<u32, Lambda>,
    /// k ↦ (j, i) with y^j x^i the monomial multiplied by λ_k.
    slots: BTreeMap<u32, (u32, u32)>,
}

impl CurveFamily {
    /// Builds a family with the given parameter values; parameters not
    /// mentioned are zero.
    pub fn new(
        n: u32,
        s: u32,
        lambda: BTreeMap<u32, Lambda>,
        range: ParameterRange,
    ) -> Result<Self, CurveError> {
        if n < 2 || s <= n {
            return Err(CurveError::InvalidDegrees { n, s });
        }
        if n.gcd(&s) != 1 {
            return Err(CurveError::NotCoprime { n, s });
        }
        let slots = Self::parameter_slots(n, s, range);
        for &k in lambda.keys() {
            if !slots.contains_key(&k) {
                return Err(CurveError::InvalidLambdaIndex { n, s, k: k as i64 });
            }
        }
        let genus = (n - 1) * (s - 1) / 2;
        let gaps = gap_sequence(n, s);
        Ok(CurveFamily { n, s, genus, gaps, range, lambda, slots })
    }

    /// Every admissible parameter symbolic.
    pub fn symbolic(n: u32, s: u32) -> Result<Self, CurveError> {
        Self::symbolic_with_range(n, s, ParameterRange::Strict)
    }

    pub fn symbolic_with_range(n: u32, s: u32, range: ParameterRange) -> Result<Self, CurveError> {
        if n < 2 || s <= n {
            return Err(CurveError::InvalidDegrees { n, s });
        }
        let keys = Self::parameter_slots(n, s, range).into_keys();
        Self::new(n, s, keys.map(|k| (k, Lambda::Symbolic)).collect(), range)
    }

    /// Numeric family from complex values indexed by weight.
    pub fn numeric(n: u32, s: u32, values: &BTreeMap<u32, Complex64>) -> Result<Self, CurveError> {
        Self::new(
            n,
            s,
            values.iter().map(|(&k, &v)| (k, Lambda::Numeric(v))).collect(),
            ParameterRange::Strict,
        )
    }

    /// Admissible weights k = ns − in − js > 0 with their monomials.
    pub fn parameter_slots(n: u32, s: u32, range: ParameterRange) -> BTreeMap<u32, (u32, u32)> {
        let (jmax, imax) = match range {
            ParameterRange::Strict => (n.saturating_sub(2), s.saturating_sub(2)),
            ParameterRange::Extended => (n - 1, s - 1),
        };
        let mut out = BTreeMap::new();
        for j in 0..=jmax {
            for i in 0..=imax {
                let k = (n * s) as i64 - (i * n) as i64 - (j * s) as i64;
                if k > 0 {
                    out.insert(k as u32, (j, i));
                }
            }
        }
        out
    }

    pub fn slots(&self) -> &BTreeMap<u32, (u32, u32)> {
        &self.slots
    }

    pub fn lambda(&self, k: u32) -> Option<&Lambda> {
        self.lambda.get(&k)
    }

    pub fn lambdas(&self) -> &BTreeMap<u32, Lambda> {
        &self.lambda
    }

    /// m = ⌊s/n⌋, the index of the family within its residue class.
    pub fn m(&self) -> u32 {
        self.s / self.n
    }

    pub fn monomial(&self, j: u32, i: u32) -> Monomial {
        let w = j * self.s + i * self.n;
        Monomial { sato_weight: w, j, i, label: w as i64 - (2 * self.genus as i64 - 1) }
    }

    /// Monomial of given Sató weight with y-degree below n, if it exists.
    pub fn monomial_of_weight(&self, w: u32) -> Option<Monomial> {
        (0..self.n)
            .find(|&j| w >= j * self.s && (w - j * self.s).is_multiple_of(self.n))
            .map(|j| self.monomial(j, (w - j * self.s) / self.n))
    }

    /// Monomial with label ℓ, i.e. weight ℓ + 2g − 1.
    pub fn monomial_with_label(&self, label: i64) -> Option<Monomial> {
        let w = label + 2 * self.genus as i64 - 1;
        if w < 0 {
            return None;
        }
        self.monomial_of_weight(w as u32)
    }

    /// First `count` monomials of the list ordered by Sató weight.
    pub fn monomial_basis(&self, count: usize) -> Vec<Monomial> {
        let mut out = Vec::with_capacity(count);
        let mut w = 0;
        while out.len() < count {
            if let Some(m) = self.monomial_of_weight(w) {
                out.push(m);
            }
            w += 1;
        }
        out
    }

    /// σ-weight −(n²−1)(s²−1)/24.
    pub fn sigma_weight(&self) -> i64 {
        let (n, s) = (self.n as i64, self.s as i64);
        -((n * n - 1) * (s * s - 1)) / 24
    }

    /// Parameters as polynomials: symbolic λ_k becomes the variable λ_k.
    pub fn lambda_polys<C: Coefficient>(&self) -> Result<BTreeMap<u32, WeightedPoly<C>>, CurveError> {
        let mut out = BTreeMap::new();
        for (&k, v) in &self.lambda {
            let p = match v {
                Lambda::Symbolic => WeightedPoly::lambda(k),
                Lambda::Exact(q) => WeightedPoly::constant(C::from_rational(q)),
                Lambda::Numeric(z) => {
                    if z.im != 0.0 {
                        return Err(CurveError::SymbolicLambda(k));
                    }
                    WeightedPoly::constant(C::from_rational(
                        &BigRational::from_float(z.re).ok_or(CurveError::SymbolicLambda(k))?,
                    ))
                }
            };
            if !p.is_empty() {
                out.insert(k, p);
            }
        }
        Ok(out)
    }

    /// Numeric parameter values; fails if any is symbolic.
    pub fn numeric_lambdas(&self) -> Result<BTreeMap<u32, Complex64>, CurveError> {
        self.lambda
            .iter()
            .map(|(&k, v)| v.numeric().map(|z| (k, z)).ok_or(CurveError::SymbolicLambda(k)))
            .collect()
    }

    /// Coefficients c_0(x)..c_n(x) of f(x, y) = Σ c_j(x) y^j.
    pub fn y_coefficients(&self, x: Complex64) -> Result<Vec<Complex64>, CurveError> {
        let lam = self.numeric_lambdas()?;
        let zero = Complex64::new(0.0, 0.0);
        let mut by_j: Vec<Vec<Complex64>> = vec![Vec::new(); self.n as usize + 1];
        for (k, &(j, i)) in &self.slots {
            if let Some(v) = lam.get(k) {
                let row = &mut by_j[j as usize];
                if row.len() <= i as usize {
                    row.resize(i as usize + 1, zero);
                }
                row[i as usize] += v;
            }
        }
        let row0 = &mut by_j[0];
        if row0.len() <= self.s as usize {
            row0.resize(self.s as usize + 1, zero);
        }
        row0[self.s as usize] += 1.0;
        let n = self.n as usize;
        if by_j[n].is_empty() {
            by_j[n].push(zero);
        }
        by_j[n][0] -= 1.0;
        Ok(by_j.iter().map(|row| crate::roots::horner(row, x)).collect())
    }

    /// f(x, y) = −yⁿ + xˢ + Σ λ_k y^j x^i.
    pub fn eval_f(&self, x: Complex64, y: Complex64) -> Result<Complex64, CurveError> {
        let c = self.y_coefficients(x)?;
        Ok(crate::roots::horner(&c, y))
    }

    /// ∂f/∂y at (x, y).
    pub fn eval_dyf(&self, x: Complex64, y: Complex64) -> Result<Complex64, CurveError> {
        let c = self.y_coefficients(x)?;
        let d: Vec<Complex64> = c.iter().enumerate().skip(1).map(|(j, v)| v * j as f64).collect();
        Ok(crate::roots::horner(&d, y))
    }

    /// Scale used for relative residuals: Σ |terms of f| at (x, y).
    pub fn residual_scale(&self, x: Complex64, y: Complex64) -> f64 {
        let mut s = y.norm().powi(self.n as i32) + x.norm().powi(self.s as i32);
        if let Ok(lam) = self.numeric_lambdas() {
            for (k, &(j, i)) in &self.slots {
                if let Some(v) = lam.get(k) {
                    s += v.norm() * y.norm().powi(j as i32) * x.norm().powi(i as i32);
                }
            }
        }
        1.0 + s
    }

    /// The n points of the curve above x.
    pub fn lift_x_to_points(&self, x: Complex64) -> Result<Vec<CurvePoint>, CurveError> {
        let c = self.y_coefficients(x)?;
        let ys = poly_roots(&c)?;
        if ys.len() != self.n as usize {
            return Err(CurveError::Root(RootError::RootFindingFailure));
        }
        Ok(ys.into_iter().map(|y| CurvePoint::new(x, y)).collect())
    }
}

/// ℕ₀ minus the semigroup generated by n and s.
pub fn gap_sequence(n: u32, s: u32) -> Vec<u32> {
    let conductor = (n - 1) * (s - 1);
    let mut in_semigroup = vec![false; conductor as usize + 1];
    for j in 0..n {
        let mut w = j * s;
        while w <= conductor {
            in_semigroup[w as usize] = true;
            w += n;
        }
    }
    (0..conductor).filter(|&w| !in_semigroup[w as usize]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn genus_and_gaps() {
        let f = CurveFamily::symbolic(3, 4).unwrap();
        assert_eq!((f.genus, f.gaps.clone()), (3, vec![1, 2, 5]));
        let f = CurveFamily::symbolic(3, 7).unwrap();
        assert_eq!((f.genus, f.gaps.clone()), (6, vec![1, 2, 4, 5, 8, 11]));
        let f = CurveFamily::symbolic(4, 5).unwrap();
        assert_eq!((f.genus, f.gaps.clone()), (6, vec![1, 2, 3, 6, 7, 11]));
    }

    #[test]
    fn coprimality_and_indices() {
        assert_eq!(CurveFamily::symbolic(4, 6).unwrap_err(), CurveError::NotCoprime { n: 4, s: 6 });
        let bad = BTreeMap::from([(3u32, Lambda::Symbolic)]);
        // (3,4) parameters: 12 − 3i − 4j for j ≤ 1, i ≤ 2 → 12, 9, 6, 8, 5, 2
        assert!(matches!(
            CurveFamily::new(3, 4, bad, ParameterRange::Strict),
            Err(CurveError::InvalidLambdaIndex { k: 3, .. })
        ));
        let keys: Vec<u32> = CurveFamily::parameter_slots(3, 4, ParameterRange::Strict).into_keys().collect();
        assert_eq!(keys, vec![2, 5, 6, 8, 9, 12]);
        let ext: Vec<u32> = CurveFamily::parameter_slots(3, 4, ParameterRange::Extended).into_keys().collect();
        assert_eq!(ext, vec![1, 2, 3, 4, 5, 6, 8, 9, 12]);
    }

    #[test]
    fn monomial_lists() {
        let f = CurveFamily::symbolic(3, 4).unwrap();
        let b = f.monomial_basis(5);
        let labels: Vec<i64> = b.iter().map(|m| m.label).collect();
        assert_eq!(labels, vec![-5, -2, -1, 1, 2]);
        let names: Vec<String> = b.iter().map(|m| m.to_string()).collect();
        assert_eq!(names, vec!["1", "x", "y", "x^2", "yx"]);
        let f = CurveFamily::symbolic(2, 5).unwrap();
        let labels: Vec<i64> = f.monomial_basis(3).iter().map(|m| m.label).collect();
        assert_eq!(labels, vec![-3, -1, 1]);
        let f = CurveFamily::symbolic(5, 6).unwrap();
        let w: Vec<u32> = f.monomial_basis(10).iter().map(|m| m.sato_weight).collect();
        assert_eq!(w, vec![0, 5, 6, 10, 11, 12, 15, 16, 17, 18]);
    }

    #[test]
    fn evaluation_examples() {
        let f = CurveFamily::numeric(2, 3, &BTreeMap::new()).unwrap();
        assert_eq!(f.eval_f(c(1.0), c(1.0)).unwrap(), c(0.0));
        let f = CurveFamily::numeric(2, 3, &BTreeMap::from([(6, c(-1.0))])).unwrap();
        assert_eq!(f.eval_f(c(1.0), c(0.0)).unwrap(), c(0.0));
        let f = CurveFamily::numeric(3, 4, &BTreeMap::new()).unwrap();
        assert_eq!(f.eval_f(c(1.0), c(1.0)).unwrap(), c(0.0));
        assert_eq!(f.eval_dyf(c(1.0), c(1.0)).unwrap(), c(-3.0));
        let sym = CurveFamily::symbolic(2, 3).unwrap();
        assert!(matches!(sym.eval_f(c(0.0), c(0.0)), Err(CurveError::SymbolicLambda(_))));
    }

    #[test]
    fn lifting() {
        let f = CurveFamily::numeric(2, 3, &BTreeMap::new()).unwrap();
        let mut ys: Vec<f64> = f.lift_x_to_points(c(1.0)).unwrap().iter().map(|p| p.y.re).collect();
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ys[0] + 1.0).abs() < 1e-12 && (ys[1] - 1.0).abs() < 1e-12);
        let f = CurveFamily::numeric(3, 4, &BTreeMap::new()).unwrap();
        let pts = f.lift_x_to_points(c(1.0)).unwrap();
        for p in &pts {
            assert!((p.y.powu(3) - c(1.0)).norm() < 1e-12);
        }
        let pts = f.lift_x_to_points(c(0.0)).unwrap();
        assert!(pts.iter().all(|p| p.y.norm() < 1e-12));
    }

    #[test]
    fn sigma_weight_formula() {
        assert_eq!(CurveFamily::symbolic(3, 4).unwrap().sigma_weight(), -5);
        assert_eq!(CurveFamily::symbolic(2, 3).unwrap().sigma_weight(), -1);
    }
}
