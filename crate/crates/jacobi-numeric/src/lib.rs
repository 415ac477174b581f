//! Numeric layer: divisor recovery on (n,s)-curves, and periods, theta
//! functions and ℘-values on hyperelliptic curves of genus 1 and 2.
pub mod divisor;
pub mod hyper;

pub use divisor::{chi_polynomial, rfunctions_from_divisor, solve_divisor, Divisor, DivisorError, NumericRSystem};
pub use hyper::{
    abel_map, compute_periods, theta, verify_inversion, wp_from_theta, HyperError, HyperellipticCurve,
    InversionReport, PeriodData, ThetaContext, WpValues,
};
