//! Sparse polynomials in the curve parameters λ_k, graded by weight k.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::scalar::{Coefficient, Ring};

/// Product of powers of λ_k, stored as `(k, exponent)` pairs sorted by `k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LambdaMonomial(Vec<(u32, u32)>);

impl LambdaMonomial {
    pub fn one() -> Self {
        LambdaMonomial(Vec::new())
    }

    pub fn var(k: u32) -> Self {
        LambdaMonomial(vec![(k, 1)])
    }

    /// Builds a monomial from arbitrary `(k, e)` pairs, merging repeats.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut map = BTreeMap::new();
        for (k, e) in pairs {
            *map.entry(k).or_insert(0) += e;
        }
        LambdaMonomial(map.into_iter().filter(|&(_, e)| e > 0).collect())
    }

    pub fn exponents(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Σ k·e.
    pub fn weight(&self) -> u32 {
        self.0.iter().map(|&(k, e)| k * e).sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&(ka, ea)), Some(&&(kb, eb))) => {
                    if ka == kb {
                        out.push((ka, ea + eb));
                        a.next();
                        b.next();
                    } else if ka < kb {
                        out.push((ka, ea));
                        a.next();
                    } else {
                        out.push((kb, eb));
                        b.next();
                    }
                }
                (Some(&&p), None) => {
                    out.push(p);
                    a.next();
                }
                (None, Some(&&p)) => {
                    out.push(p);
                    b.next();
                }
                (None, None) => break,
            }
        }
        LambdaMonomial(out)
    }
}

impl fmt::Display for LambdaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for &(k, e) in &self.0 {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "λ{k}")?;
            } else {
                write!(f, "λ{k}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial Σ c_α λ^α with no zero coefficients stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct WeightedPoly<C> {
    terms: BTreeMap<LambdaMonomial, C>,
}

impl<C: Coefficient> WeightedPoly<C> {
    pub fn constant(c: C) -> Self {
        Self::term(LambdaMonomial::one(), c)
    }

    pub fn lambda(k: u32) -> Self {
        Self::term(LambdaMonomial::var(k), C::one())
    }

    pub fn term(mono: LambdaMonomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        WeightedPoly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (LambdaMonomial, C)>) -> Self {
        let mut out = WeightedPoly { terms: BTreeMap::new() };
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LambdaMonomial, &C)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: LambdaMonomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Common Sató weight of all terms, `None` for zero or mixed weights.
    pub fn weight(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(LambdaMonomial::weight);
        let w = it.next()?;
        it.all(|v| v == w).then_some(w)
    }

    /// True when every term carries weight `w` (the zero polynomial qualifies).
    pub fn is_homogeneous_of(&self, w: u32) -> bool {
        self.terms.keys().all(|m| m.weight() == w)
    }

    /// The value when the polynomial has no λ-dependence.
    pub fn as_constant(&self) -> Option<C> {
        match self.terms.len() {
            0 => Some(C::zero()),
            1 => self.terms.get(&LambdaMonomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn coefficient(&self, m: &LambdaMonomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        WeightedPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v.clone() * c.clone()))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    /// Evaluates with a value for every λ_k.
    pub fn eval<T: Ring>(&self, lambda: impl Fn(u32) -> T, lift: impl Fn(&C) -> T) -> T {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = lift(c);
            for &(k, e) in m.exponents() {
                let v = lambda(k);
                for _ in 0..e {
                    t = t * v.clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Maps coefficients into another scalar type.
    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> WeightedPoly<D> {
        WeightedPoly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

impl<C: Coefficient> Zero for WeightedPoly<C> {
    fn zero() -> Self {
        WeightedPoly { terms: BTreeMap::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<C: Coefficient> One for WeightedPoly<C> {
    fn one() -> Self {
        Self::constant(C::one())
    }
}

impl<'a, C: Coefficient> Add<&'a WeightedPoly<C>> for &'a WeightedPoly<C> {
    type Output = WeightedPoly<C>;
    fn add(self, rhs: &WeightedPoly<C>) -> WeightedPoly<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a, C: Coefficient> Sub<&'a WeightedPoly<C>> for &'a WeightedPoly<C> {
    type Output = WeightedPoly<C>;
    fn sub(self, rhs: &WeightedPoly<C>) -> WeightedPoly<C> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a, C: Coefficient> Mul<&'a WeightedPoly<C>> for &'a WeightedPoly<C> {
    type Output = WeightedPoly<C>;
    fn mul(self, rhs: &WeightedPoly<C>) -> WeightedPoly<C> {
        let mut out = WeightedPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<C: Coefficient> Neg for &WeightedPoly<C> {
    type Output = WeightedPoly<C>;
    fn neg(self) -> WeightedPoly<C> {
        WeightedPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl<C: Coefficient> $tr for WeightedPoly<C> {
            type Output = WeightedPoly<C>;
            fn $f(self, rhs: WeightedPoly<C>) -> WeightedPoly<C> {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<C: Coefficient> Neg for WeightedPoly<C> {
    type Output = WeightedPoly<C>;
    fn neg(self) -> WeightedPoly<C> {
        -&self
    }
}

impl<C: Coefficient> Ring for WeightedPoly<C> {
    fn from_i64(v: i64) -> Self {
        Self::constant(C::from_i64(v))
    }
    fn unit_inverse(&self) -> Option<Self> {
        let c = self.as_constant()?;
        c.unit_inverse().map(Self::constant)
    }
}

impl<C: Coefficient> fmt::Display for WeightedPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let text = c.to_string();
            let (neg, body) = match text.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, text),
            };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            if m.is_one() {
                write!(f, "{body}")?;
            } else if body == "1" {
                write!(f, "{m}")?;
            } else {
                write!(f, "{body}*{m}")?;
            }
        }
        Ok(())
    }
}

impl<C: Coefficient> fmt::Debug for WeightedPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::scalar::rat;
    use num_rational::BigRational;

    type P = WeightedPoly<BigRational>;

    #[test]
    fn weight_metadata() {
        let l2 = P::lambda(2);
        let sq = &l2 * &l2;
        assert_eq!(sq.weight(), Some(4));
        let mixed = &P::lambda(4) + &P::lambda(6);
        assert_eq!(mixed.weight(), None);
        assert_eq!((&mixed - &P::lambda(6)), P::lambda(4));
    }

    #[test]
    fn rational_product() {
        let a = P::lambda(2).scale(&rat(1, 4));
        let b = P::lambda(3).scale(&rat(1, 5));
        let p = &a * &b;
        assert_eq!(p.weight(), Some(5));
        assert_eq!(p.coefficient(&LambdaMonomial::from_pairs([(2, 1), (3, 1)])), rat(1, 20));
        assert_eq!(p.to_string(), "1/20*λ2*λ3");
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let a = &P::lambda(1) + &P::one();
        let d = &a - &a;
        assert!(d.is_zero());
        assert_eq!(d.len(), 0);
    }

    #[test]
    fn evaluation() {
        let p = &(&P::lambda(1) * &P::lambda(1)) + &P::constant(rat(3, 1));
        let v: f64 = p.eval(|_| 2.0, crate::algebra::scalar::Coefficient::from_rational);
        assert_eq!(v, 7.0);
    }
}
