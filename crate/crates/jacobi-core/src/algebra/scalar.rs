//! Scalar traits shared by polynomials and series.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Commutative ring with enough structure for truncated series arithmetic.
///
/// `unit_inverse` returns the inverse when the element is a unit; for
/// fields this is every nonzero element, for polynomial rings only the
/// nonzero constants.
pub trait Ring:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    fn unit_inverse(&self) -> Option<Self>;
}

/// Field of scalars: exact rationals or floating point (real or complex).
pub trait Coefficient: Ring + Div<Output = Self> + Display {
    /// Converts an exact rational into this scalar type.
    fn from_rational(q: &BigRational) -> Self;
}

macro_rules! float_scalar {
    ($($t:ty),*) => {$(
        impl Ring for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn unit_inverse(&self) -> Option<Self> {
                if self.is_zero() { None } else { Some(1.0 / *self) }
            }
        }
        impl Coefficient for $t {
            fn from_rational(q: &BigRational) -> Self {
                num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN) as $t
            }
        }
        impl Ring for Complex<$t> {
            fn from_i64(v: i64) -> Self {
                Complex::new(v as $t, 0.0)
            }
            fn unit_inverse(&self) -> Option<Self> {
                if self.is_zero() { None } else { Some(self.inv()) }
            }
        }
        impl Coefficient for Complex<$t> {
            fn from_rational(q: &BigRational) -> Self {
                Complex::new(<$t as Coefficient>::from_rational(q), 0.0)
            }
        }
    )*};
}

float_scalar!(f32, f64);

impl Ring for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }
    fn unit_inverse(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl Coefficient for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
}

/// Builds the rational `p/q`. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

/// Formats a rational as `p` or `p/q`.
pub fn rational_string(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let p: num_bigint::BigInt = p.parse().ok()?;
    let q: num_bigint::BigInt = q.parse().ok()?;
    if q.is_zero() {
        return None;
    }
    Some(BigRational::new(p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roundtrip_text() {
        assert_eq!(parse_rational("-6/4"), Some(rat(-3, 2)));
        assert_eq!(rational_string(&rat(-3, 2)), "-3/2");
        assert_eq!(rational_string(&rat(4, 2)), "2");
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn units() {
        assert_eq!(rat(2, 3).unit_inverse(), Some(rat(3, 2)));
        assert_eq!(BigRational::zero().unit_inverse(), None);
        assert_eq!(4.0f64.unit_inverse(), Some(0.25));
        assert_eq!(Complex::new(0.0f64, 2.0).unit_inverse(), Some(Complex::new(0.0, -0.5)));
    }
}
