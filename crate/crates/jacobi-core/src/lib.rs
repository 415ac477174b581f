//! Exact series arithmetic and formal sigma calculus for the Jacobi
//! inversion problem on (n,s)-curves.

pub mod algebra;
pub mod curve;
pub mod emit;
pub mod expansions;
pub mod golden;
pub mod roots;
pub mod sigma;

use num_rational::BigRational;

pub use algebra::{LaurentSeries, Series, WeightedPoly};
pub use curve::{CurveFamily, CurvePoint, EntireRationalFn, Lambda, Monomial, ParameterRange};
pub use expansions::{FirstKindBasis, InfinityChart, SecondKindBasis};
pub use sigma::{AbelianExpr, AbelianSymbol, InversionSystem};

/// λ-polynomial with exact rational coefficients.
pub type RationalPoly = WeightedPoly<BigRational>;
/// Laurent series with exact λ-polynomial coefficients.
pub type RationalSeries = Series<BigRational>;
/// Abelian expression with exact coefficients.
pub type RationalExpr = AbelianExpr<BigRational>;
/// Inversion system with exact coefficients.
pub type RationalSystem = InversionSystem<BigRational>;
