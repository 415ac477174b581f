//! Formal ζ/℘ calculus and assembly of the inversion system.
//!
//! ζ_a = ∂_a log σ, ℘_{a,b} = −∂_a∂_b log σ and ℘_{a,b,c} = ∂_c ℘_{a,b}, so
//! ∂_b ζ_a = −℘_{a,b} and every higher ℘ is a derivative of a lower one.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::algebra::{Coefficient, Series, WeightedPoly};
use crate::curve::{CurveError, CurveFamily, EntireRationalFn, Monomial};
use crate::expansions::{
    check_rcond, is_identity_columns, second_kind_count, ExpansionError, FirstKindBasis, InfinityChart,
    SecondKindBasis,
};

/// Highest ℘ rank the Taylor engine emits.
pub const MAX_WP_RANK: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SigmaError {
    #[error("expansion to ξ^{order} needs ℘ of rank {needed}, above the supported {MAX_WP_RANK}")]
    OrderExceedsSupport { order: usize, needed: usize },
    #[error("relation for label {label} contains unexpected ζ terms: {found}")]
    ZetaLeakage { label: u32, found: String },
    #[error("residue pairing is not the identity on the first columns")]
    PairingNotIdentity,
    #[error(transparent)]
    Expansion(#[from] ExpansionError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

impl From<crate::algebra::SeriesError> for SigmaError {
    fn from(e: crate::algebra::SeriesError) -> Self {
        SigmaError::Expansion(e.into())
    }
}

/// ζ_a or ℘ with a sorted multiset of indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AbelianSymbol {
    Zeta(u32),
    Wp(Vec<u32>),
}

impl AbelianSymbol {
    pub fn wp(mut indices: Vec<u32>) -> Self {
        indices.sort_unstable();
        AbelianSymbol::Wp(indices)
    }

    pub fn indices(&self) -> Vec<u32> {
        match self {
            AbelianSymbol::Zeta(a) => vec![*a],
            AbelianSymbol::Wp(v) => v.clone(),
        }
    }

    /// 1 for ζ, number of indices for ℘.
    pub fn rank(&self) -> usize {
        match self {
            AbelianSymbol::Zeta(_) => 1,
            AbelianSymbol::Wp(v) => v.len(),
        }
    }

    /// Sató weight of the symbol (the sum of its indices).
    pub fn weight(&self) -> u32 {
        self.indices().iter().sum()
    }

    /// `zeta`, `wp2`, `wp3`, ...
    pub fn kind(&self) -> String {
        match self {
            AbelianSymbol::Zeta(_) => "zeta".into(),
            AbelianSymbol::Wp(v) => format!("wp{}", v.len()),
        }
    }

    /// ∂/∂u_w, as a signed symbol.
    pub fn derivative(&self, w: u32) -> (i64, AbelianSymbol) {
        match self {
            AbelianSymbol::Zeta(a) => (-1, AbelianSymbol::wp(vec![*a, w])),
            AbelianSymbol::Wp(v) => {
                let mut v = v.clone();
                v.push(w);
                (1, AbelianSymbol::wp(v))
            }
        }
    }
}

impl Ord for AbelianSymbol {
    fn cmp(&self, other: &Self) -> Ordering {
        let tag = |s: &AbelianSymbol| matches!(s, AbelianSymbol::Wp(_));
        (tag(self), self.rank(), self.indices()).cmp(&(tag(other), other.rank(), other.indices()))
    }
}

impl PartialOrd for AbelianSymbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for AbelianSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices().iter().map(u32::to_string).collect();
        match self {
            AbelianSymbol::Zeta(_) => write!(f, "ζ{}", idx.join(",")),
            AbelianSymbol::Wp(_) => write!(f, "℘{}", idx.join(",")),
        }
    }
}

/// Σ c_S S + c_0 with λ-polynomial coefficients; zero terms are never stored.
#[derive(Clone, PartialEq, Eq)]
pub struct AbelianExpr<C: Coefficient> {
    terms: BTreeMap<AbelianSymbol, WeightedPoly<C>>,
    constant: WeightedPoly<C>,
}

impl<C: Coefficient> Default for AbelianExpr<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Coefficient> AbelianExpr<C> {
    pub fn zero() -> Self {
        AbelianExpr { terms: BTreeMap::new(), constant: WeightedPoly::zero() }
    }

    pub fn constant(c: WeightedPoly<C>) -> Self {
        AbelianExpr { terms: BTreeMap::new(), constant: c }
    }

    pub fn symbol(sym: AbelianSymbol, c: WeightedPoly<C>) -> Self {
        let mut e = Self::zero();
        e.add_term(sym, c);
        e
    }

    pub fn terms(&self) -> impl Iterator<Item = (&AbelianSymbol, &WeightedPoly<C>)> {
        self.terms.iter()
    }

    pub fn constant_term(&self) -> &WeightedPoly<C> {
        &self.constant
    }

    pub fn coefficient(&self, sym: &AbelianSymbol) -> WeightedPoly<C> {
        self.terms.get(sym).cloned().unwrap_or_else(WeightedPoly::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    pub fn add_term(&mut self, sym: AbelianSymbol, c: WeightedPoly<C>) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(sym.clone()).or_insert_with(WeightedPoly::zero);
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&sym);
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &WeightedPoly<C>) {
        for (s, v) in &other.terms {
            self.add_term(s.clone(), v * c);
        }
        self.constant = &self.constant + &(&other.constant * c);
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &WeightedPoly::one());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-WeightedPoly::<C>::one());
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-WeightedPoly::<C>::one())
    }

    pub fn scale(&self, c: &WeightedPoly<C>) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    /// ∂/∂u_w; the constant drops out.
    pub fn derivative(&self, w: u32) -> Self {
        let mut out = Self::zero();
        for (s, c) in &self.terms {
            let (sign, ds) = s.derivative(w);
            out.add_term(ds, c.scale(&C::from_i64(sign)));
        }
        out
    }

    pub fn zeta_indices(&self) -> Vec<u32> {
        self.terms
            .keys()
            .filter_map(|s| match s {
                AbelianSymbol::Zeta(a) => Some(*a),
                _ => None,
            })
            .collect()
    }

    pub fn max_rank(&self) -> usize {
        self.terms.keys().map(AbelianSymbol::rank).max().unwrap_or(0)
    }

    /// Every term has total weight `w` = (λ weight) + (symbol weight).
    pub fn is_homogeneous_of(&self, w: u32) -> bool {
        self.terms.iter().all(|(s, c)| s.weight() <= w && c.is_homogeneous_of(w - s.weight()))
            && self.constant.is_homogeneous_of(w)
    }

    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D + Copy) -> AbelianExpr<D> {
        let mut out = AbelianExpr::zero();
        for (s, c) in &self.terms {
            out.add_term(s.clone(), c.map_coefficients(f));
        }
        out.constant = self.constant.map_coefficients(f);
        out
    }
}

impl<C: Coefficient> fmt::Display for AbelianExpr<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.constant.is_zero() {
            parts.push(format!("({})", self.constant));
        }
        for (s, c) in &self.terms {
            parts.push(format!("({c})*{s}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl<C: Coefficient> fmt::Debug for AbelianExpr<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Non-decreasing sequences over `gaps` whose sum is at most `budget`.
fn multisets(gaps: &[u32], budget: u32) -> Vec<Vec<u32>> {
    fn rec(gaps: &[u32], start: usize, budget: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(cur.clone());
        for i in start..gaps.len() {
            if gaps[i] > budget {
                break;
            }
            cur.push(gaps[i]);
            rec(gaps, i, budget - gaps[i], cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(gaps, 0, budget, &mut Vec::new(), &mut out);
    out
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// Coefficients of ξ⁰..ξ^order in d/dξ log σ(u − 𝒜(ξ)) with 𝒜 = (u_w(ξ)).
///
/// Taylor expansion of ζ_a(u − 𝒜) in the components of 𝒜 gives
/// −Σ_a 𝒜′_a ζ_a + Σ_{a,B} (−1)^{|B|} 𝒜′_a 𝒜^B / B! · ℘_{a∪B}.
pub fn log_sigma_derivative_expansion<C: Coefficient>(
    first: &FirstKindBasis<C>,
    order: usize,
) -> Result<Vec<AbelianExpr<C>>, SigmaError> {
    if order + 1 > MAX_WP_RANK {
        return Err(SigmaError::OrderExceedsSupport { order, needed: order + 1 });
    }
    let k_max = order as i32;
    let mut out = vec![AbelianExpr::zero(); order + 1];
    for (ia, &a) in first.gaps.iter().enumerate() {
        if a as i32 - 1 > k_max {
            break;
        }
        let da = &first.du_series[ia];
        for k in 0..=k_max {
            out[k as usize].add_term(AbelianSymbol::Zeta(a), -da.coeff(k)?);
        }
        for b in multisets(&first.gaps, (k_max - (a as i32 - 1)) as u32) {
            if b.is_empty() {
                continue;
            }
            let mut prod: Series<C> = da.clone();
            let mut denom = 1i64;
            let mut run = 1usize;
            for (i, &w) in b.iter().enumerate() {
                prod = prod.mul(first.u(w).expect("multiset drawn from gaps"));
                if i + 1 < b.len() && b[i + 1] == w {
                    run += 1;
                } else {
                    denom *= factorial(run);
                    run = 1;
                }
            }
            let sign = if b.len() % 2 == 0 { 1 } else { -1 };
            let scale = C::from_i64(sign) / C::from_i64(denom);
            let mut idx = b.clone();
            idx.push(a);
            let sym = AbelianSymbol::wp(idx);
            for k in 0..=k_max {
                out[k as usize].add_term(sym.clone(), prod.coeff(k)?.scale(&scale));
            }
        }
    }
    Ok(out)
}

/// R_ℓ(u) = −res_{ξ=0} r_ℓ(ξ) · d/dξ log σ(u − 𝒜(ξ)).
pub fn zeta_relations<C: Coefficient>(
    fam: &CurveFamily,
    second: &SecondKindBasis<C>,
    expansion: &[AbelianExpr<C>],
) -> Result<Vec<AbelianExpr<C>>, SigmaError> {
    let mut out = Vec::with_capacity(second.r_series.len());
    for (idx, r) in second.r_series.iter().enumerate() {
        let label = idx as u32 + 1;
        let mut rel = AbelianExpr::zero();
        for (k, e) in expansion.iter().enumerate() {
            let c = r.coeff(-(k as i32) - 1)?;
            rel.add_scaled(e, &-c);
        }
        let zetas = rel.zeta_indices();
        let expected: Vec<u32> = if fam.gaps.contains(&label) { vec![label] } else { vec![] };
        let unit_coefficient = expected.is_empty()
            || rel.coefficient(&AbelianSymbol::Zeta(label)) == -WeightedPoly::<C>::one();
        if zetas != expected || !unit_coefficient {
            let found = zetas.iter().map(|a| format!("ζ{a}")).collect::<Vec<_>>().join(", ");
            return Err(SigmaError::ZetaLeakage { label, found });
        }
        out.push(rel);
    }
    Ok(out)
}

/// Relative precision used when generating inversion systems.
///
/// Enough for every residue the construction reads: the deepest one is
/// at ξ^{−1} against a pole of order n.
pub fn generator_order(fam: &CurveFamily) -> i32 {
    fam.n as i32 + 3
}

/// The entire rational functions R_{2g+ℓ−1}(x, y; u) and their ζ-relations.
#[derive(Debug, Clone)]
pub struct InversionSystem<C: Coefficient> {
    pub fam: CurveFamily,
    pub second_kind_numerators: Vec<EntireRationalFn<WeightedPoly<C>>>,
    pub zeta_relations: Vec<AbelianExpr<C>>,
    /// A_{ℓ,w} keyed by (ℓ, w).
    pub coefficients: BTreeMap<(u32, u32), AbelianExpr<C>>,
    pub r_functions: Vec<EntireRationalFn<AbelianExpr<C>>>,
}

impl<C: Coefficient> InversionSystem<C> {
    /// Label ℓ of `r_functions[idx]`.
    pub fn label(&self, idx: usize) -> u32 {
        idx as u32 + 1
    }
}

/// Generates the inversion system of a (symbolic or exact) family.
pub fn build_inversion_system<C: Coefficient>(fam: &CurveFamily) -> Result<InversionSystem<C>, SigmaError> {
    build_inversion_system_with_order(fam, generator_order(fam))
}

pub fn build_inversion_system_with_order<C: Coefficient>(
    fam: &CurveFamily,
    order: i32,
) -> Result<InversionSystem<C>, SigmaError> {
    let count = second_kind_count(fam) as usize;
    if count > MAX_WP_RANK {
        return Err(SigmaError::OrderExceedsSupport { order: count - 1, needed: count });
    }
    let chart = InfinityChart::<C>::expand(fam, order)?;
    let first = FirstKindBasis::new(&chart)?;
    let second = SecondKindBasis::associated(&chart, &first)?;
    if !is_identity_columns(&fam.gaps, &check_rcond(&first, &second)?) {
        return Err(SigmaError::PairingNotIdentity);
    }
    let expansion = log_sigma_derivative_expansion(&first, count - 1)?;
    let zeta_relations = zeta_relations(fam, &second, &expansion)?;
    let mut coefficients = BTreeMap::new();
    let mut r_functions = Vec::with_capacity(count);
    for (idx, rel) in zeta_relations.iter().enumerate() {
        let label = idx as u32 + 1;
        let num = &second.numerators[idx];
        let mut terms: BTreeMap<Monomial, AbelianExpr<C>> =
            num.terms.iter().map(|(m, c)| (*m, AbelianExpr::constant(c.clone()))).collect();
        for (&w, m) in first.gaps.iter().zip(&first.numerators) {
            let a = rel.derivative(w);
            let entry = terms.entry(*m).or_default();
            *entry = entry.sub(&a);
            if entry.is_zero() {
                terms.remove(m);
            }
            coefficients.insert((label, w), a);
        }
        r_functions.push(EntireRationalFn { weight: num.weight, terms });
    }
    Ok(InversionSystem {
        fam: fam.clone(),
        second_kind_numerators: second.numerators,
        zeta_relations,
        coefficients,
        r_functions,
    })
}
