//! Expansions at the point at infinity: the Puiseux parameterization, the
//! first-kind differentials and their integrals, and the associated
//! second-kind differentials.
//!
//! With x = ξ⁻ⁿ and y = ξ⁻ˢ h(ξ), the curve equation becomes
//! F(h) = 1 − hⁿ + Σ λ_k ξ^k h^j = 0 with h(0) = 1, which Newton's method
//! solves in the ring of truncated power series.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{Coefficient, Ring, Series, SeriesError, WeightedPoly};
use crate::curve::{CurveError, CurveFamily, EntireRationalFn, Monomial};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExpansionError {
    #[error("Newton iteration for y(ξ) did not converge to order {order}")]
    NewtonStall { order: i32 },
    #[error("cannot correct the second-kind differential of label {label}: residue system is singular")]
    UnsolvableCorrection { label: u32 },
    #[error("second-kind differential of label {label} fails the residue normalization")]
    NormalizationFailed { label: u32 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Local coordinates near infinity, valid to a fixed relative precision.
#[derive(Debug, Clone)]
pub struct InfinityChart<C: Coefficient> {
    fam: CurveFamily,
    lambda: BTreeMap<u32, WeightedPoly<C>>,
    order: i32,
    h_powers: Vec<Series<C>>,
    g_inv: Series<C>,
}

fn unit<C: Coefficient>(order: i32) -> Series<C> {
    Series::monomial(WeightedPoly::one(), 0, order)
}

impl<C: Coefficient> InfinityChart<C> {
    /// Expands y(ξ) to `order` terms after the leading one.
    pub fn expand(fam: &CurveFamily, order: i32) -> Result<Self, ExpansionError> {
        let order = order.max(1);
        let lambda = fam.lambda_polys::<C>()?;
        let mut h = unit::<C>(1);
        let mut prec = 1;
        while prec < order {
            prec = (2 * prec).min(order);
            let hp = h.with_order(prec);
            let (f, g) = equation_and_derivative(fam, &lambda, &hp, prec);
            let step = f.mul(&g.invert()?);
            h = hp.sub(&step).truncate(prec);
        }
        let h = h.with_order(order);
        let (f, g) = equation_and_derivative(fam, &lambda, &h, order);
        if !f.is_zero() {
            return Err(ExpansionError::NewtonStall { order });
        }
        let mut h_powers = vec![unit::<C>(order)];
        for _ in 0..fam.n {
            let next = h_powers.last().unwrap().mul(&h);
            h_powers.push(next);
        }
        Ok(InfinityChart { fam: fam.clone(), lambda, order, h_powers, g_inv: g.invert()? })
    }

    pub fn family(&self) -> &CurveFamily {
        &self.fam
    }

    /// Relative precision of every series produced by this chart.
    pub fn order(&self) -> i32 {
        self.order
    }

    /// Parameters as λ-polynomials (zero parameters omitted).
    pub fn lambda_polys(&self) -> &BTreeMap<u32, WeightedPoly<C>> {
        &self.lambda
    }

    /// h(ξ) = ξˢ y(ξ).
    pub fn h_series(&self) -> &Series<C> {
        &self.h_powers[1]
    }

    pub fn x_series(&self) -> Series<C> {
        let n = self.fam.n as i32;
        Series::monomial(WeightedPoly::one(), -n, -n + self.order)
    }

    pub fn y_series(&self) -> Series<C> {
        self.h_series().shift(-(self.fam.s as i32))
    }

    /// Coefficient of dξ in dx.
    pub fn dx_series(&self) -> Series<C> {
        let n = self.fam.n as i32;
        Series::monomial(WeightedPoly::constant(C::from_i64(-(n as i64))), -n - 1, -n - 1 + self.order)
    }

    /// ∂f/∂y along the chart.
    pub fn dyf_series(&self) -> Series<C> {
        let shift = -(((self.fam.n - 1) * self.fam.s) as i32);
        self.g_inv.invert().expect("chart derivative is a unit").shift(shift)
    }

    /// y^j x^i as a series.
    pub fn monomial_series(&self, m: &Monomial) -> Series<C> {
        self.h_powers[m.j as usize].shift(-(m.sato_weight as i32))
    }

    /// Coefficient of dξ in m · dx / ∂_y f.
    pub fn differential(&self, m: &Monomial) -> Series<C> {
        let n = self.fam.n as i64;
        let shift = 2 * self.fam.genus as i32 - 2 - m.sato_weight as i32;
        self.h_powers[m.j as usize]
            .mul(&self.g_inv)
            .scale(&WeightedPoly::constant(C::from_i64(-n)))
            .shift(shift)
    }

    /// Coefficient of dξ in P(x, y) dx / ∂_y f.
    pub fn differential_of(&self, p: &EntireRationalFn<WeightedPoly<C>>) -> Series<C> {
        let mut acc = Series::zero(i32::MAX / 4);
        for (m, c) in &p.terms {
            acc = acc.add(&self.differential(m).scale(c));
        }
        acc
    }

    /// F(h) evaluated on the stored expansion; identically zero.
    pub fn residual(&self) -> Series<C> {
        equation_and_derivative(&self.fam, &self.lambda, self.h_series(), self.order).0
    }
}

/// F(h) = 1 − hⁿ + Σ λ_k ξ^k h^j and F′(h) = −n hⁿ⁻¹ + Σ j λ_k ξ^k h^{j−1}.
fn equation_and_derivative<C: Coefficient>(
    fam: &CurveFamily,
    lambda: &BTreeMap<u32, WeightedPoly<C>>,
    h: &Series<C>,
    order: i32,
) -> (Series<C>, Series<C>) {
    let n = fam.n;
    let mut pows = vec![unit::<C>(order)];
    for _ in 0..n {
        let next = pows.last().unwrap().mul(h);
        pows.push(next);
    }
    let mut f = unit::<C>(order).sub(&pows[n as usize]);
    let mut g = pows[n as usize - 1].scale(&WeightedPoly::constant(C::from_i64(-(n as i64))));
    for (&k, c) in lambda {
        let (j, _) = fam.slots()[&k];
        let lam = Series::monomial(c.clone(), k as i32, order);
        f = f.add(&lam.mul(&pows[j as usize]));
        if j > 0 {
            let dl = lam.scale(&WeightedPoly::constant(C::from_i64(j as i64)));
            g = g.add(&dl.mul(&pows[j as usize - 1]));
        }
    }
    (f.truncate(order), g.truncate(order))
}

/// Holomorphic differentials du_w = 𝓜_{−w} dx/∂_y f for w in the gap sequence.
#[derive(Debug, Clone)]
pub struct FirstKindBasis<C: Coefficient> {
    pub gaps: Vec<u32>,
    pub numerators: Vec<Monomial>,
    pub du_series: Vec<Series<C>>,
    pub u_series: Vec<Series<C>>,
}

impl<C: Coefficient> FirstKindBasis<C> {
    pub fn new(chart: &InfinityChart<C>) -> Result<Self, ExpansionError> {
        let fam = chart.family();
        let mut numerators = Vec::with_capacity(fam.gaps.len());
        let mut du_series = Vec::with_capacity(fam.gaps.len());
        let mut u_series = Vec::with_capacity(fam.gaps.len());
        for &w in &fam.gaps {
            let m = fam.monomial_with_label(-(w as i64)).expect("every gap labels a monomial");
            let du = chart.differential(&m);
            u_series.push(du.integrate()?);
            du_series.push(du);
            numerators.push(m);
        }
        Ok(FirstKindBasis { gaps: fam.gaps.clone(), numerators, du_series, u_series })
    }

    /// Position of gap `w`.
    pub fn index_of(&self, w: u32) -> Option<usize> {
        self.gaps.iter().position(|&v| v == w)
    }

    pub fn u(&self, w: u32) -> Option<&Series<C>> {
        self.index_of(w).map(|i| &self.u_series[i])
    }

    pub fn du(&self, w: u32) -> Option<&Series<C>> {
        self.index_of(w).map(|i| &self.du_series[i])
    }
}

/// How many second-kind differentials enter the inversion system.
///
/// n − 1 for n ≥ 3. Hyperelliptic curves need two: the label-2 function
/// supplies the y-coordinate even though 2 is not a gap there.
pub fn second_kind_count(fam: &CurveFamily) -> u32 {
    if fam.n == 2 {
        2
    } else {
        fam.n - 1
    }
}

/// Second-kind differentials dr_ℓ = 𝓜̃_ℓ dx/∂_y f, ℓ = 1..L, normalized by
/// res u_w dr_ℓ = δ_{wℓ} for gaps w ≤ ℓ.
#[derive(Debug, Clone)]
pub struct SecondKindBasis<C: Coefficient> {
    pub numerators: Vec<EntireRationalFn<WeightedPoly<C>>>,
    pub dr_series: Vec<Series<C>>,
    pub r_series: Vec<Series<C>>,
}

impl<C: Coefficient> SecondKindBasis<C> {
    /// Starts from ℓ𝓜_ℓ and subtracts multiples of 𝓜_κ, κ < ℓ, until the
    /// residue pairing with the first-kind integrals is normalized.
    pub fn associated(chart: &InfinityChart<C>, first: &FirstKindBasis<C>) -> Result<Self, ExpansionError> {
        let fam = chart.family();
        let count = second_kind_count(fam);
        let mut numerators = Vec::new();
        let mut dr_series = Vec::new();
        let mut r_series = Vec::new();
        for l in 1..=count {
            let lead = fam.monomial_with_label(l as i64).expect("positive labels always exist");
            let mut num = EntireRationalFn { weight: lead.sato_weight, terms: BTreeMap::new() };
            num.terms.insert(lead, WeightedPoly::constant(C::from_i64(l as i64)));
            let mut dr = chart.differential(&lead).scale(&WeightedPoly::constant(C::from_i64(l as i64)));
            for k in (1..l).rev() {
                let Some(u) = first.u(k) else { continue };
                let target = u.mul(&dr).residue()?;
                if target.is_zero() {
                    continue;
                }
                let mk = fam.monomial_with_label(k as i64).expect("positive labels always exist");
                let dmk = chart.differential(&mk);
                let pivot = u.mul(&dmk).residue()?;
                let inv = pivot.unit_inverse().ok_or(ExpansionError::UnsolvableCorrection { label: l })?;
                let d = -(target * inv);
                dr = dr.add(&dmk.scale(&d));
                let slot = num.terms.entry(mk).or_insert_with(WeightedPoly::zero);
                *slot = &*slot + &d;
            }
            num.terms.retain(|_, c| !c.is_zero());
            for &w in fam.gaps.iter().filter(|&&w| w <= l) {
                let want = if w == l { WeightedPoly::one() } else { WeightedPoly::zero() };
                if first.u(w).unwrap().mul(&dr).residue()? != want {
                    return Err(ExpansionError::NormalizationFailed { label: l });
                }
            }
            r_series.push(dr.integrate()?);
            dr_series.push(dr);
            numerators.push(num);
        }
        Ok(SecondKindBasis { numerators, dr_series, r_series })
    }
}

/// Residue pairing res u_{w_i} dr_ℓ, one row per gap, one column per ℓ.
pub fn check_rcond<C: Coefficient>(
    first: &FirstKindBasis<C>,
    second: &SecondKindBasis<C>,
) -> Result<Vec<Vec<WeightedPoly<C>>>, ExpansionError> {
    first
        .u_series
        .iter()
        .map(|u| second.dr_series.iter().map(|dr| Ok(u.mul(dr).residue()?)).collect())
        .collect()
}

/// True when column ℓ of the pairing is the unit vector at gap ℓ (or zero
/// when ℓ is not a gap).
pub fn is_identity_columns<C: Coefficient>(gaps: &[u32], pairing: &[Vec<WeightedPoly<C>>]) -> bool {
    pairing.iter().zip(gaps).all(|(row, &w)| {
        row.iter().enumerate().all(|(col, v)| {
            if col as u32 + 1 == w {
                *v == WeightedPoly::one()
            } else {
                v.is_zero()
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use num_rational::BigRational;

    type P = WeightedPoly<BigRational>;

    fn lam(k: u32) -> P {
        P::lambda(k)
    }

    #[test]
    fn elliptic_chart_matches_binomial_series() {
        let fam = CurveFamily::symbolic(2, 3).unwrap();
        let chart = InfinityChart::<BigRational>::expand(&fam, 8).unwrap();
        let h = chart.h_series();
        assert_eq!(h.coeff(4).unwrap(), lam(4).scale(&rat(1, 2)));
        assert_eq!(h.coeff(6).unwrap(), lam(6).scale(&rat(1, 2)));
        assert!(h.coeff(2).unwrap().is_zero());
        assert!(chart.residual().is_zero());
    }

    #[test]
    fn trigonal_first_kind_leading_terms() {
        let fam = CurveFamily::symbolic(3, 4).unwrap();
        let chart = InfinityChart::<BigRational>::expand(&fam, 8).unwrap();
        let first = FirstKindBasis::new(&chart).unwrap();
        let names: Vec<String> = first.numerators.iter().map(|m| m.to_string()).collect();
        assert_eq!(names, ["y", "x", "1"]);
        for (w, u) in first.gaps.iter().zip(&first.u_series) {
            assert_eq!(u.valuation(), Some(*w as i32));
            assert_eq!(u.coeff(*w as i32).unwrap(), P::constant(rat(1, *w as i64)));
        }
    }

    #[test]
    fn second_kind_numerators_for_three_five() {
        let fam = CurveFamily::symbolic(3, 5).unwrap();
        let chart = InfinityChart::<BigRational>::expand(&fam, 6).unwrap();
        let first = FirstKindBasis::new(&chart).unwrap();
        let second = SecondKindBasis::associated(&chart, &first).unwrap();
        let dr2 = &second.numerators[1];
        assert_eq!(dr2.terms.len(), 2);
        assert_eq!(dr2.terms[&fam.monomial(0, 3)], P::constant(rat(2, 1)));
        assert_eq!(dr2.terms[&fam.monomial(1, 1)], lam(1));
        let pairing = check_rcond(&first, &second).unwrap();
        assert!(is_identity_columns(&fam.gaps, &pairing));
    }

    #[test]
    fn float_coefficients_follow_same_path() {
        let fam = CurveFamily::symbolic(3, 4).unwrap();
        let chart = InfinityChart::<f64>::expand(&fam, 6).unwrap();
        let c = chart.h_series().coeff(2).unwrap();
        let v = c.coefficient(&crate::algebra::LambdaMonomial::var(2));
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }
}
