//! Roots of univariate complex polynomials.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("polynomial has no nonzero coefficients")]
    ZeroPolynomial,
    #[error("root finder did not converge")]
    RootFindingFailure,
}

/// Evaluates Σ c_k x^k (coefficients in ascending order) by Horner's rule.
pub fn horner(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * x + c)
}

fn horner_with_derivative(coeffs: &[Complex64], x: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// Index of the highest coefficient whose magnitude exceeds `rel_tol` times
/// the largest coefficient magnitude.
pub fn effective_degree(coeffs: &[Complex64], rel_tol: f64) -> Option<usize> {
    let norm = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if norm == 0.0 {
        return None;
    }
    coeffs.iter().rposition(|c| c.norm() > rel_tol * norm)
}

/// All roots (with multiplicity) of the polynomial with ascending coefficients.
///
/// Trailing coefficients below `1e-14` of the norm are treated as zero. The
/// roots are eigenvalues of the companion matrix of the monic polynomial,
/// refined by a few Newton steps.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>, RootError> {
    let deg = effective_degree(coeffs, 1e-14).ok_or(RootError::ZeroPolynomial)?;
    let zeros = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let coeffs = &coeffs[zeros..=deg];
    let deg = deg - zeros;
    if deg == 0 {
        return Ok(roots);
    }
    let lead = coeffs[deg];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let mut comp = DMatrix::<Complex64>::zeros(deg, deg);
    for k in 1..deg {
        comp[(k, k - 1)] = Complex64::new(1.0, 0.0);
    }
    for k in 0..deg {
        comp[(k, deg - 1)] = -monic[k];
    }
    let schur = comp.try_schur(f64::EPSILON, 1000 * deg);
    let mut found: Vec<Complex64> = match schur.and_then(|s| s.eigenvalues()) {
        Some(ev) if ev.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => ev.iter().copied().collect(),
        _ => aberth(&monic)?,
    };
    for r in found.iter_mut() {
        *r = polish(&monic, *r);
    }
    roots.extend(found);
    Ok(roots)
}

fn polish(monic: &[Complex64], mut x: Complex64) -> Complex64 {
    for _ in 0..8 {
        let (p, dp) = horner_with_derivative(monic, x);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        let next = x - step;
        let (pn, _) = horner_with_derivative(monic, next);
        if !(pn.norm() < p.norm()) {
            break;
        }
        x = next;
        if step.norm() <= 1e-16 * (1.0 + x.norm()) {
            break;
        }
    }
    x
}

/// Aberth–Ehrlich simultaneous iteration; fallback when the eigen solver
/// does not deliver a triangular Schur form.
fn aberth(monic: &[Complex64]) -> Result<Vec<Complex64>, RootError> {
    let deg = monic.len() - 1;
    let radius = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius * 0.5, 0.4 + std::f64::consts::TAU * k as f64 / deg as f64))
        .collect();
    for _ in 0..500 {
        let mut worst: f64 = 0.0;
        for i in 0..deg {
            let (p, dp) = horner_with_derivative(monic, z[i]);
            let ratio = p / dp;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..deg {
                if j != i {
                    sum += 1.0 / (z[i] - z[j]);
                }
            }
            let w = ratio / (1.0 - ratio * sum);
            z[i] -= w;
            worst = worst.max(w.norm() / (1.0 + z[i].norm()));
        }
        if worst < 1e-15 {
            return Ok(z);
        }
    }
    Err(RootError::RootFindingFailure)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sorted(mut v: Vec<Complex64>) -> Vec<Complex64> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn real_cubic() {
        // (x-1)(x-2)(x+3) = x^3 - 7x + 6
        let r = sorted(poly_roots(&[c(6.0), c(-7.0), c(0.0), c(1.0)]).unwrap());
        for (got, want) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((got - c(want)).norm() < 1e-12, "{got}");
        }
    }

    #[test]
    fn cube_roots_of_unity() {
        let r = poly_roots(&[c(-1.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        assert_eq!(r.len(), 3);
        for z in r {
            assert!((z.powu(3) - c(1.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn aberth_agrees() {
        let p = [c(6.0), c(-7.0), c(0.0), c(1.0)];
        let r = sorted(aberth(&p).unwrap());
        assert!((r[0] - c(-3.0)).norm() < 1e-10);
    }

    #[test]
    fn trailing_zero_coefficients_drop() {
        let r = poly_roots(&[c(-2.0), c(1.0), c(0.0)]).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - c(2.0)).norm() < 1e-14);
    }
}
