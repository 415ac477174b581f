//! Truncated Laurent series in a local parameter ξ.
//!
//! A series stores coefficients for exponents `lowest..order` and is known
//! only modulo `ξ^order`. Every operation returns the largest order it can
//! prove, so precision loss shows up as a smaller `order` rather than as
//! silently wrong coefficients.

use std::fmt;

use thiserror::Error;

use super::scalar::Ring;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("leading coefficient is not a unit")]
    NonUnitLeadingCoefficient,
    #[error("lowest exponent {exponent} is not divisible by {n}")]
    ExponentNotDivisible { exponent: i32, n: u32 },
    #[error("leading coefficient must be 1 for root extraction")]
    LeadingCoefficientNotOne,
    #[error("cannot integrate: coefficient of 1/ξ is nonzero")]
    ResidueObstruction,
    #[error("coefficient of ξ^{needed} requested but series is only known below ξ^{order}")]
    TruncationTooShallow { needed: i32, order: i32 },
    #[error("operation undefined on a series that is zero to its truncation order")]
    ZeroSeries,
}

#[derive(Clone, PartialEq)]
pub struct LaurentSeries<R> {
    lowest: i32,
    coeffs: Vec<R>,
    order: i32,
}

impl<R: Ring> LaurentSeries<R> {
    /// Builds Σ coeffs[k] ξ^{lowest+k} + O(ξ^order). Coefficients at or
    /// beyond `order` are discarded; missing ones are zero.
    pub fn new(lowest: i32, mut coeffs: Vec<R>, order: i32) -> Self {
        let len = (order - lowest).max(0) as usize;
        coeffs.resize(len, R::zero());
        let mut s = LaurentSeries { lowest: lowest.min(order), coeffs, order };
        s.normalize();
        s
    }

    /// The zero series known below `order`.
    pub fn zero(order: i32) -> Self {
        LaurentSeries { lowest: order, coeffs: Vec::new(), order }
    }

    /// c·ξ^exp + O(ξ^order).
    pub fn monomial(c: R, exp: i32, order: i32) -> Self {
        if exp >= order {
            return Self::zero(order);
        }
        Self::new(exp, vec![c], order)
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lowest += lead as i32;
        }
    }

    pub fn lowest_exponent(&self) -> i32 {
        self.lowest
    }

    pub fn truncation_order(&self) -> i32 {
        self.order
    }

    /// Exponent of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<i32> {
        (!self.coeffs.is_empty()).then_some(self.lowest)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Number of known terms after the leading one.
    pub fn relative_precision(&self) -> i32 {
        self.order - self.lowest
    }

    pub fn coefficients(&self) -> &[R] {
        &self.coeffs
    }

    /// Coefficient of ξ^e; errors when `e` lies beyond the truncation.
    pub fn coeff(&self, e: i32) -> Result<R, SeriesError> {
        if e >= self.order {
            return Err(SeriesError::TruncationTooShallow { needed: e, order: self.order });
        }
        if e < self.lowest {
            return Ok(R::zero());
        }
        Ok(self.coeffs[(e - self.lowest) as usize].clone())
    }

    /// Iterates `(exponent, coefficient)` over stored nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &R)> {
        let lo = self.lowest;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(k, c)| (lo + k as i32, c))
    }

    /// Drops everything at or above `order` (no-op if already shallower).
    pub fn truncate(&self, order: i32) -> Self {
        if order >= self.order {
            return self.clone();
        }
        Self::new(self.lowest, self.coeffs.clone(), order)
    }

    /// Declares extra precision by padding with zero coefficients.
    /// Only meaningful when the caller knows the padding is exact or will
    /// be corrected (Newton iteration).
    pub fn with_order(&self, order: i32) -> Self {
        Self::new(self.lowest, self.coeffs.clone(), order)
    }

    /// Multiplies by ξ^k exactly.
    pub fn shift(&self, k: i32) -> Self {
        LaurentSeries { lowest: self.lowest + k, coeffs: self.coeffs.clone(), order: self.order + k }
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::new(self.lowest, self.coeffs.iter().map(|v| v.clone() * c.clone()).collect(), self.order)
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let lowest = self.lowest.min(other.lowest).min(order);
        let mut coeffs = vec![R::zero(); (order - lowest) as usize];
        for src in [self, other] {
            for (k, c) in src.coeffs.iter().enumerate() {
                let e = src.lowest + k as i32;
                if e < order {
                    let slot = &mut coeffs[(e - lowest) as usize];
                    *slot = slot.clone() + c.clone();
                }
            }
        }
        Self::new(lowest, coeffs, order)
    }

    pub fn neg(&self) -> Self {
        LaurentSeries {
            lowest: self.lowest,
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            order: self.order,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = (self.order + other.lowest).min(other.order + self.lowest);
        let lowest = (self.lowest + other.lowest).min(order);
        let len = (order - lowest).max(0) as usize;
        let mut coeffs = vec![R::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let k = i + j;
                if k >= len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[k] = coeffs[k].clone() + a.clone() * b.clone();
                }
            }
        }
        Self::new(lowest, coeffs, order)
    }

    pub fn pow(&self, e: u32) -> Self {
        let rel = self.relative_precision();
        let mut acc = Self::new(0, vec![R::one()], rel.max(0));
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse; the leading coefficient must be a unit.
    pub fn invert(&self) -> Result<Self, SeriesError> {
        let v = self.valuation().ok_or(SeriesError::ZeroSeries)?;
        let inv0 = self.coeffs[0].unit_inverse().ok_or(SeriesError::NonUnitLeadingCoefficient)?;
        let p = self.relative_precision() as usize;
        let mut b: Vec<R> = Vec::with_capacity(p);
        b.push(inv0.clone());
        for k in 1..p {
            let mut acc = R::zero();
            for i in 1..=k {
                let a = &self.coeffs[i];
                if !a.is_zero() {
                    acc = acc + a.clone() * b[k - i].clone();
                }
            }
            b.push(-(inv0.clone() * acc));
        }
        Ok(Self::new(-v, b, -v + p as i32))
    }

    /// Principal n-th root of a series whose leading term is ξ^{kn}.
    pub fn nth_root(&self, n: u32) -> Result<Self, SeriesError> {
        let v = self.valuation().ok_or(SeriesError::ZeroSeries)?;
        if v.rem_euclid(n as i32) != 0 {
            return Err(SeriesError::ExponentNotDivisible { exponent: v, n });
        }
        if self.coeffs[0] != R::one() {
            return Err(SeriesError::LeadingCoefficientNotOne);
        }
        // k·b_k = Σ_{i=1..k} ((n+1)i/n − k) a_i b_{k−i}, from b' a = (1/n) a' b.
        let p = self.relative_precision() as usize;
        let ni = n as i64;
        let mut b: Vec<R> = vec![R::one()];
        for k in 1..p {
            let mut acc = R::zero();
            for i in 1..=k {
                let a = &self.coeffs[i];
                if a.is_zero() {
                    continue;
                }
                let f = (ni + 1) * i as i64 - ni * k as i64;
                acc = acc + R::from_i64(f) * a.clone() * b[k - i].clone();
            }
            let d = R::from_i64(ni * k as i64)
                .unit_inverse()
                .ok_or(SeriesError::NonUnitLeadingCoefficient)?;
            b.push(acc * d);
        }
        let lo = v / n as i32;
        Ok(Self::new(lo, b, lo + p as i32))
    }

    /// Antiderivative with zero constant term.
    pub fn integrate(&self) -> Result<Self, SeriesError> {
        if !self.coeff(-1)?.is_zero() {
            return Err(SeriesError::ResidueObstruction);
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (k, c) in self.coeffs.iter().enumerate() {
            let e = self.lowest + k as i32;
            if e == -1 || c.is_zero() {
                coeffs.push(R::zero());
                continue;
            }
            let d = R::from_i64((e + 1) as i64)
                .unit_inverse()
                .ok_or(SeriesError::NonUnitLeadingCoefficient)?;
            coeffs.push(c.clone() * d);
        }
        Ok(Self::new(self.lowest + 1, coeffs, self.order + 1))
    }

    /// Term-wise derivative d/dξ.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| R::from_i64((self.lowest + k as i32) as i64) * c.clone())
            .collect();
        Self::new(self.lowest - 1, coeffs, self.order - 1)
    }

    /// Coefficient of ξ^{-1}.
    pub fn residue(&self) -> Result<R, SeriesError> {
        self.coeff(-1)
    }

    /// Coefficientwise map into another ring.
    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> LaurentSeries<S> {
        LaurentSeries::new(self.lowest, self.coeffs.iter().map(f).collect(), self.order)
    }
}

impl<R: Ring> fmt::Debug for LaurentSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for (e, c) in self.terms() {
            list.entry(&(e, c));
        }
        list.finish()?;
        write!(f, " + O(ξ^{})", self.order)
    }
}

impl<R: Ring + fmt::Display> fmt::Display for LaurentSeries<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, c) in self.terms() {
            write!(f, "({c})·ξ^{e} + ")?;
        }
        write!(f, "O(ξ^{})", self.order)
    }
}
