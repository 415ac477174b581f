//! Divisors from entire rational functions and back.
//!
//! `rfunctions_from_divisor` builds R_{2g+l}, l = 0..L−1, vanishing on a
//! degree-g divisor as determinants over the first g+l+1 monomials.
//! `solve_divisor` recovers the divisor: x-coordinates are the zeros of
//! 𝒳(x) = det 𝐑(x), y-coordinates come from the null vector of 𝐑(x).

use jacobi_core::curve::CurveError;
use jacobi_core::expansions::second_kind_count;
use jacobi_core::roots::{horner, poly_roots, RootError};
use jacobi_core::{CurveFamily, CurvePoint, ParameterRange};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

/// Roots of 𝒳 closer than this (relative) are merged with multiplicity.
pub const ROOT_MERGE_TOL: f64 = 1e-7;
/// A leading coefficient of 𝒳 below this fraction of its norm is a collapse.
pub const DEGREE_COLLAPSE_TOL: f64 = 1e-10;
/// Discriminant roots closer than this make the curve degenerate.
pub const DISCRIMINANT_SEPARATION_TOL: f64 = 1e-8;

const RANK_TOL: f64 = 1e-11;
const NULL_TOL: f64 = 1e-8;
const VANISH_TOL: f64 = 1e-8;
const ON_CURVE_TOL: f64 = 1e-8;
const SAME_POINT_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DivisorError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("divisor has {found} points, genus is {genus}")]
    WrongDegree { found: usize, genus: u32 },
    #[error("point ({x}, {y}) is off the curve (relative residual {residual:e})")]
    PointOffCurve { x: Complex64, y: Complex64, residual: f64 },
    #[error("divisor contains a full fiber over x = {x} and is special")]
    SpecialDivisor { x: Complex64 },
    #[error("need {needed} extra points, got {found}")]
    MissingExtraPoints { needed: usize, found: usize },
    #[error("points do not determine R_{weight}: {detail}")]
    DegenerateDeterminant { weight: u32, detail: String },
    #[error("deg ρ_{j} of R_{weight} is {degree}, bound is {bound:?}")]
    DegreeBoundViolated { weight: u32, j: usize, degree: usize, bound: Option<usize> },
    #[error("leading coefficient of 𝒳 collapsed: |c_g| = {leading:e}, norm {norm:e}")]
    DegreeCollapse { leading: f64, norm: f64 },
    #[error("null space of R(x) at x = {x} has dimension {dim}, root multiplicity {multiplicity}")]
    NullSpaceDimensionError { x: Complex64, dim: usize, multiplicity: usize },
    #[error("root finding failed: {0}")]
    RootFindingFailure(#[from] RootError),
}

/// A positive divisor of degree g given by its support with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Divisor {
    pub points: Vec<CurvePoint>,
    /// False when the support contains all n points over one x.
    pub non_special: bool,
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

impl Divisor {
    /// Checks every point against the curve equation and computes the
    /// non-speciality flag.
    pub fn new(fam: &CurveFamily, points: Vec<CurvePoint>) -> Result<Self, DivisorError> {
        for p in &points {
            let residual = fam.eval_f(p.x, p.y)?.norm() / fam.residual_scale(p.x, p.y);
            if residual > ON_CURVE_TOL {
                return Err(DivisorError::PointOffCurve { x: p.x, y: p.y, residual });
            }
        }
        let non_special = full_fiber(fam, &points)?.is_none();
        Ok(Divisor { points, non_special })
    }

    pub fn degree(&self) -> usize {
        self.points.len()
    }
}

/// First x over which `points` contain the whole fiber, counted with multiplicity.
fn full_fiber(fam: &CurveFamily, points: &[CurvePoint]) -> Result<Option<Complex64>, DivisorError> {
    let n = fam.n as usize;
    for (i, p) in points.iter().enumerate() {
        let group: Vec<&CurvePoint> = points.iter().filter(|q| close(q.x, p.x, SAME_POINT_TOL)).collect();
        if group.len() < n || points[..i].iter().any(|q| close(q.x, p.x, SAME_POINT_TOL)) {
            continue;
        }
        let fiber = fam.lift_x_to_points(p.x)?;
        let mut used = vec![false; group.len()];
        let covered = fiber.iter().all(|f| {
            let hit = (0..group.len()).find(|&k| !used[k] && close(group[k].y, f.y, 1e-6));
            hit.map(|k| used[k] = true).is_some()
        });
        if covered {
            return Ok(Some(p.x));
        }
    }
    Ok(None)
}

/// Coefficients ρ_j^{[2g+l]}(x) of the functions R_{2g+l} = Σ_j y^j ρ_j^{[2g+l]}(x).
///
/// Rows l = 0..n−2 form the square matrix 𝐑(x). For n = 2 a second row
/// R_{2g+1} = ρ_0(x) + y ρ_1 supplies the y-coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericRSystem {
    pub fam: CurveFamily,
    /// rho[l][j]: ascending coefficients in x.
    pub rho: Vec<Vec<Vec<Complex64>>>,
}

/// Degree bound floor((2g+l−js)/n) for ρ_j^{[2g+l]}; `None` when it must vanish.
pub fn degree_bound(fam: &CurveFamily, l: u32, j: u32) -> Option<usize> {
    let top = 2 * fam.genus as i64 + l as i64 - (j * fam.s) as i64;
    (top >= 0).then(|| (top / fam.n as i64) as usize)
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl NumericRSystem {
    pub fn row_count(&self) -> usize {
        self.rho.len()
    }

    /// Weight 2g+l of row l.
    pub fn weight(&self, l: usize) -> u32 {
        2 * self.fam.genus + l as u32
    }

    /// R_{2g+l}(x, y).
    pub fn eval(&self, l: usize, x: Complex64, y: Complex64) -> Complex64 {
        let per_j: Vec<Complex64> = self.rho[l].iter().map(|c| horner(c, x)).collect();
        horner(&per_j, y)
    }

    /// Multiplies row l by `c`.
    pub fn scale_row(&mut self, l: usize, c: Complex64) {
        for poly in &mut self.rho[l] {
            for v in poly.iter_mut() {
                *v *= c;
            }
        }
    }

    /// The square matrix 𝐑(x), rows l = 0..n−2, columns j = 0..n−2.
    pub fn matrix_at(&self, x: Complex64) -> DMatrix<Complex64> {
        let k = self.fam.n as usize - 1;
        DMatrix::from_fn(k, k, |l, j| self.rho[l].get(j).map_or(zero(), |c| horner(c, x)))
    }

    /// Fails if any ρ has a nonzero coefficient above its degree bound.
    pub fn check_degree_bounds(&self) -> Result<(), DivisorError> {
        let scale = self.rho.iter().flatten().flatten().map(|c| c.norm()).fold(0.0, f64::max);
        for (l, row) in self.rho.iter().enumerate() {
            for (j, poly) in row.iter().enumerate() {
                let bound = degree_bound(&self.fam, l as u32, j as u32);
                let allowed = bound.map_or(0, |b| b + 1);
                if let Some(degree) = poly.iter().rposition(|c| c.norm() > 1e-12 * scale) {
                    if degree >= allowed {
                        return Err(DivisorError::DegreeBoundViolated { weight: self.weight(l), j, degree, bound });
                    }
                }
            }
        }
        Ok(())
    }
}

fn monomial_value(j: u32, i: u32, p: &CurvePoint) -> Complex64 {
    p.y.powu(j) * p.x.powu(i)
}

fn det(m: &DMatrix<Complex64>) -> Complex64 {
    if m.nrows() == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        m.clone().lu().determinant()
    }
}

/// Points drawn on the curve from a seeded generator: x in the unit disk,
/// a random sheet above it.
pub fn seeded_points(fam: &CurveFamily, count: usize, rng: &mut impl Rng) -> Result<Vec<CurvePoint>, DivisorError> {
    (0..count)
        .map(|_| {
            let x = Complex64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
            let fiber = fam.lift_x_to_points(x)?;
            Ok(fiber[rng.gen_range(0..fiber.len())])
        })
        .collect()
}

/// Number of extra points the construction consumes.
pub fn extra_points_needed(fam: &CurveFamily) -> usize {
    second_kind_count(fam) as usize - 1
}

/// The functions R_{2g+l} vanishing on `d`, using `extra[..l]` for row l.
pub fn rfunctions_from_divisor(
    fam: &CurveFamily,
    d: &Divisor,
    extra: &[CurvePoint],
) -> Result<NumericRSystem, DivisorError> {
    let g = fam.genus as usize;
    if d.degree() != g {
        return Err(DivisorError::WrongDegree { found: d.degree(), genus: fam.genus });
    }
    if !d.non_special {
        let x = full_fiber(fam, &d.points)?.unwrap_or_default();
        return Err(DivisorError::SpecialDivisor { x });
    }
    let rows = second_kind_count(fam) as usize;
    if extra.len() < rows - 1 {
        return Err(DivisorError::MissingExtraPoints { needed: rows - 1, found: extra.len() });
    }
    let mut rho = Vec::with_capacity(rows);
    for l in 0..rows {
        let weight = 2 * fam.genus + l as u32;
        let monomials = fam.monomial_basis(g + l + 1);
        let pts: Vec<&CurvePoint> = d.points.iter().chain(&extra[..l]).collect();
        let m = DMatrix::from_fn(pts.len(), monomials.len(), |r, c| monomial_value(monomials[c].j, monomials[c].i, pts[r]));
        let sv = m.clone().singular_values();
        let smax = sv.max();
        let smin = sv.iter().copied().fold(f64::INFINITY, f64::min);
        if !(smax > 0.0) || smin < RANK_TOL * smax {
            return Err(DivisorError::DegenerateDeterminant {
                weight,
                detail: format!("value matrix has rank below {} (σ_min/σ_max = {:e})", pts.len(), smin / smax),
            });
        }
        let mut coeffs: Vec<Complex64> = (0..monomials.len())
            .map(|c| {
                let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
                det(&m.clone().remove_column(c)) * sign
            })
            .collect();
        let lead = *coeffs.last().unwrap();
        let norm = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if lead.norm() < 1e-12 * norm {
            return Err(DivisorError::DegenerateDeterminant {
                weight,
                detail: "top monomial drops out".into(),
            });
        }
        for c in coeffs.iter_mut() {
            *c /= lead;
        }
        for p in &pts {
            let terms: Vec<Complex64> =
                monomials.iter().zip(&coeffs).map(|(mo, c)| c * monomial_value(mo.j, mo.i, p)).collect();
            let value: Complex64 = terms.iter().sum();
            let scale: f64 = terms.iter().map(|t| t.norm()).sum();
            if value.norm() > VANISH_TOL * scale {
                return Err(DivisorError::DegenerateDeterminant {
                    weight,
                    detail: format!("does not vanish at ({}, {}): {:e}", p.x, p.y, value.norm() / scale),
                });
            }
        }
        let mut row = vec![Vec::new(); fam.n as usize];
        for (mo, c) in monomials.iter().zip(coeffs) {
            let poly = &mut row[mo.j as usize];
            if poly.len() <= mo.i as usize {
                poly.resize(mo.i as usize + 1, zero());
            }
            poly[mo.i as usize] += c;
        }
        while row.len() > 1 && row.last().is_some_and(|p| p.is_empty()) {
            row.pop();
        }
        rho.push(row);
    }
    let sys = NumericRSystem { fam: fam.clone(), rho };
    sys.check_degree_bounds()?;
    Ok(sys)
}

/// `rfunctions_from_divisor` with extra points drawn from `seed`.
pub fn rfunctions_from_divisor_seeded(fam: &CurveFamily, d: &Divisor, seed: u64) -> Result<NumericRSystem, DivisorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let extra = seeded_points(fam, extra_points_needed(fam), &mut rng)?;
    rfunctions_from_divisor(fam, d, &extra)
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(acc: &mut Vec<Complex64>, b: &[Complex64], sign: f64) {
    if acc.len() < b.len() {
        acc.resize(b.len(), zero());
    }
    for (a, v) in acc.iter_mut().zip(b) {
        *a += v * sign;
    }
}

/// Laplace expansion of a determinant with polynomial entries.
fn poly_det(m: &[Vec<Vec<Complex64>>], rows: &[usize], cols: &[usize]) -> Vec<Complex64> {
    if rows.is_empty() {
        return vec![Complex64::new(1.0, 0.0)];
    }
    let (r, rest) = (rows[0], &rows[1..]);
    let mut acc = Vec::new();
    for (k, &c) in cols.iter().enumerate() {
        let entry = &m[r][c];
        if entry.iter().all(|v| v.norm() == 0.0) {
            continue;
        }
        let minor_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = poly_det(m, rest, &minor_cols);
        poly_add(&mut acc, &poly_mul(entry, &minor), if k % 2 == 0 { 1.0 } else { -1.0 });
    }
    acc
}

/// 𝒳(x) = det 𝐑(x), ascending coefficients, exactly g+1 of them.
pub fn chi_polynomial(sys: &NumericRSystem) -> Result<Vec<Complex64>, DivisorError> {
    let k = sys.fam.n as usize - 1;
    let g = sys.fam.genus as usize;
    let grid: Vec<Vec<Vec<Complex64>>> =
        (0..k).map(|l| (0..k).map(|j| sys.rho[l].get(j).cloned().unwrap_or_default()).collect()).collect();
    let idx: Vec<usize> = (0..k).collect();
    let mut chi = poly_det(&grid, &idx, &idx);
    let norm = chi.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if !(norm > 0.0) {
        return Err(DivisorError::DegenerateDeterminant { weight: 2 * sys.fam.genus, detail: "det 𝐑(x) vanishes".into() });
    }
    chi.resize(chi.len().max(g + 1), zero());
    let above = chi[g + 1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let leading = chi[g].norm();
    if leading < DEGREE_COLLAPSE_TOL * norm || above > DEGREE_COLLAPSE_TOL * norm {
        return Err(DivisorError::DegreeCollapse { leading, norm });
    }
    chi.truncate(g + 1);
    Ok(chi)
}

/// Roots grouped within `ROOT_MERGE_TOL`: (mean, multiplicity).
fn cluster_roots(roots: &[Complex64]) -> Vec<(Complex64, usize)> {
    let mut clusters: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    for &r in roots {
        match clusters.iter_mut().find(|(c, _)| close(*c, r, ROOT_MERGE_TOL)) {
            Some((c, members)) => {
                members.push(r);
                *c = members.iter().sum::<Complex64>() / members.len() as f64;
            }
            None => clusters.push((r, vec![r])),
        }
    }
    clusters.into_iter().map(|(c, m)| (c, m.len())).collect()
}

/// A few Newton steps on f(x, ·), kept only if they stay near `y`.
fn polish_y(fam: &CurveFamily, x: Complex64, y: Complex64) -> Result<Complex64, DivisorError> {
    let mut cur = y;
    for _ in 0..3 {
        let f = fam.eval_f(x, cur)?;
        let df = fam.eval_dyf(x, cur)?;
        if df.norm() == 0.0 {
            break;
        }
        cur -= f / df;
    }
    Ok(if close(cur, y, 1e-6) { cur } else { y })
}

/// y-coordinates over a root x of 𝒳 with the given multiplicity.
fn y_over(sys: &NumericRSystem, x: Complex64, multiplicity: usize) -> Result<Vec<Complex64>, DivisorError> {
    let fam = &sys.fam;
    if fam.n == 2 {
        let row = &sys.rho[1];
        let c1 = row.get(1).and_then(|c| c.first()).copied().unwrap_or_default();
        let c0 = horner(&row[0], x);
        if c1.norm() <= 1e-14 * (1.0 + c0.norm()) {
            return Err(DivisorError::NullSpaceDimensionError { x, dim: 0, multiplicity });
        }
        return Ok(vec![polish_y(fam, x, -c0 / c1)?; multiplicity]);
    }
    let m = sys.matrix_at(x);
    let k = m.nrows();
    let svd = m.clone().svd(false, true);
    let smax = svd.singular_values.max();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]));
    let dim = order.iter().filter(|&&i| svd.singular_values[i] <= NULL_TOL * smax).count();
    if smax == 0.0 {
        return Err(DivisorError::NullSpaceDimensionError { x, dim: k, multiplicity });
    }
    if dim == 1 {
        let v_t = svd.v_t.expect("requested right singular vectors");
        let row = v_t.row(order[0]);
        let (v0, v1) = (row[0].conj(), row[1].conj());
        if v0.norm() <= 1e-10 {
            return Err(DivisorError::NullSpaceDimensionError { x, dim, multiplicity });
        }
        return Ok(vec![polish_y(fam, x, v1 / v0)?; multiplicity]);
    }
    if dim == multiplicity && dim > 1 {
        // Several divisor points share this x: pick the fiber points that R(x) annihilates.
        let norm_m = m.norm();
        let mut scored: Vec<(f64, Complex64)> = fam
            .lift_x_to_points(x)?
            .into_iter()
            .map(|p| {
                let yv = nalgebra::DVector::from_fn(k, |j, _| p.y.powu(j as u32));
                ((&m * &yv).norm() / (norm_m * yv.norm()), p.y)
            })
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0));
        if scored.len() >= dim && scored[dim - 1].0 < 1e-6 {
            return Ok(scored[..dim].iter().map(|s| s.1).collect());
        }
    }
    Err(DivisorError::NullSpaceDimensionError { x, dim, multiplicity })
}

/// Recovers the divisor from the coefficients of its R-functions.
pub fn solve_divisor(sys: &NumericRSystem) -> Result<Divisor, DivisorError> {
    let chi = chi_polynomial(sys)?;
    let roots = poly_roots(&chi)?;
    if roots.len() != sys.fam.genus as usize {
        return Err(DivisorError::RootFindingFailure(RootError::RootFindingFailure));
    }
    let mut points = Vec::with_capacity(roots.len());
    for (x, mult) in cluster_roots(&roots) {
        for y in y_over(sys, x, mult)? {
            points.push(CurvePoint::new(x, y));
        }
    }
    Divisor::new(&sys.fam, points)
}

/// Discriminant of f in y as a polynomial in x, up to a constant factor.
///
/// Sampled as Π_{a<b} (y_a − y_b)² on the unit circle and interpolated.
pub fn y_discriminant(fam: &CurveFamily) -> Result<Vec<Complex64>, CurveError> {
    let deg = (fam.s * (fam.n - 1)) as usize;
    let count = deg + 1;
    let samples: Vec<Complex64> = (0..count)
        .map(|k| {
            let x = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / count as f64);
            let ys: Vec<Complex64> = fam.lift_x_to_points(x)?.iter().map(|p| p.y).collect();
            let mut v = Complex64::new(1.0, 0.0);
            for a in 0..ys.len() {
                for b in a + 1..ys.len() {
                    v *= (ys[a] - ys[b]).powu(2);
                }
            }
            Ok(v)
        })
        .collect::<Result<_, CurveError>>()?;
    Ok((0..count)
        .map(|j| {
            samples
                .iter()
                .enumerate()
                .map(|(k, v)| v * Complex64::from_polar(1.0, -std::f64::consts::TAU * (j * k) as f64 / count as f64))
                .sum::<Complex64>()
                / count as f64
        })
        .collect())
}

/// How far the y-discriminant is from having a repeated root.
///
/// The minimum over roots r of the distance to the nearest other root and of
/// |D′(r)| relative to Σ k|c_k||r|^{k−1}; the second term catches clusters
/// that rounding has split apart.
pub fn discriminant_separation(fam: &CurveFamily) -> Result<f64, CurveError> {
    let mut disc = y_discriminant(fam)?;
    let norm = disc.iter().map(|c| c.norm()).fold(0.0, f64::max);
    for c in disc.iter_mut() {
        if c.norm() < 1e-13 * norm {
            *c = zero();
        }
    }
    let roots = poly_roots(&disc)?;
    let deriv: Vec<Complex64> = disc.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
    let mut sep = f64::INFINITY;
    for (a, &r) in roots.iter().enumerate() {
        for &q in &roots[a + 1..] {
            sep = sep.min((r - q).norm());
        }
        let scale: f64 = deriv.iter().enumerate().map(|(k, c)| c.norm() * r.norm().powi(k as i32)).sum();
        if scale > 0.0 {
            sep = sep.min(horner(&deriv, r).norm() / scale);
        }
    }
    Ok(sep)
}

/// Fails with `CurveError::Degenerate` when the discriminant has a repeated root.
pub fn check_non_degenerate(fam: &CurveFamily) -> Result<(), CurveError> {
    let separation = discriminant_separation(fam)?;
    if separation < DISCRIMINANT_SEPARATION_TOL {
        return Err(CurveError::Degenerate { separation });
    }
    Ok(())
}

/// λ drawn uniformly from the unit disk until the curve is non-degenerate.
pub fn seeded_family(n: u32, s: u32, rng: &mut impl Rng) -> Result<CurveFamily, CurveError> {
    let slots = CurveFamily::parameter_slots(n, s, ParameterRange::Strict);
    loop {
        let values: BTreeMap<u32, Complex64> = slots
            .keys()
            .map(|&k| (k, Complex64::from_polar(rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))))
            .collect();
        let fam = CurveFamily::numeric(n, s, &values)?;
        match check_non_degenerate(&fam) {
            Ok(()) => return Ok(fam),
            Err(CurveError::Degenerate { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// A random non-special divisor of degree g.
pub fn seeded_divisor(fam: &CurveFamily, rng: &mut impl Rng) -> Result<Divisor, DivisorError> {
    loop {
        let d = Divisor::new(fam, seeded_points(fam, fam.genus as usize, rng)?)?;
        if d.non_special {
            return Ok(d);
        }
    }
}

/// Largest relative error between two divisors matched as multisets.
pub fn divisor_distance(a: &Divisor, b: &Divisor) -> f64 {
    if a.degree() != b.degree() {
        return f64::INFINITY;
    }
    let rel = |p: &CurvePoint, q: &CurvePoint| {
        ((p.x - q.x).norm() / p.x.norm().max(1.0)).max((p.y - q.y).norm() / p.y.norm().max(1.0))
    };
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, p) in a.points.iter().enumerate() {
        for (j, q) in b.points.iter().enumerate() {
            pairs.push((rel(p, q), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (mut used_a, mut used_b) = (vec![false; a.degree()], vec![false; b.degree()]);
    let mut worst: f64 = 0.0;
    for (e, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            worst = worst.max(e);
        }
    }
    worst
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundTripTrial {
    pub index: usize,
    pub chi_degree: Option<usize>,
    pub max_relative_error: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundTripReport {
    pub n: u32,
    pub s: u32,
    pub genus: u32,
    pub seed: u64,
    pub tolerance: f64,
    pub max_relative_error: f64,
    pub passed: bool,
    pub trials: Vec<RoundTripTrial>,
}

/// One divisor through construction, 𝒳 and recovery; returns (deg 𝒳, error).
pub fn roundtrip_one(fam: &CurveFamily, d: &Divisor, seed: u64) -> Result<(usize, f64), DivisorError> {
    let sys = rfunctions_from_divisor_seeded(fam, d, seed)?;
    let chi = chi_polynomial(&sys)?;
    let back = solve_divisor(&sys)?;
    Ok((chi.len() - 1, divisor_distance(d, &back)))
}

/// `count` seeded divisors on `fam` through the round trip.
pub fn roundtrip(fam: &CurveFamily, seed: u64, count: usize, tolerance: f64) -> Result<RoundTripReport, DivisorError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trials = Vec::with_capacity(count);
    let mut worst: f64 = 0.0;
    let mut passed = true;
    for index in 0..count {
        let d = seeded_divisor(fam, &mut rng)?;
        let extra_seed = rng.gen::<u64>();
        let trial = match roundtrip_one(fam, &d, extra_seed) {
            Ok((deg, err)) => {
                worst = worst.max(err);
                passed &= err < tolerance && deg == fam.genus as usize;
                RoundTripTrial { index, chi_degree: Some(deg), max_relative_error: Some(err), error: None }
            }
            Err(e) => {
                passed = false;
                RoundTripTrial { index, chi_degree: None, max_relative_error: None, error: Some(e.to_string()) }
            }
        };
        trials.push(trial);
    }
    Ok(RoundTripReport {
        n: fam.n,
        s: fam.s,
        genus: fam.genus,
        seed,
        tolerance,
        max_relative_error: worst,
        passed,
        trials,
    })
}
