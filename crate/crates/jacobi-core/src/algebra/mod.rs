//! Exact arithmetic: rationals, weighted λ-polynomials, truncated Laurent series.

pub mod poly;
pub mod scalar;
pub mod series;

pub use poly::{LambdaMonomial, WeightedPoly};
pub use scalar::{parse_rational, rat, rational_string, Coefficient, Ring};
pub use series::{LaurentSeries, SeriesError};

/// Truncated series whose coefficients are λ-polynomials over `C`.
pub type Series<C> = LaurentSeries<WeightedPoly<C>>;
