//! Hyperelliptic curves y² = P(x), deg P = 2g+1, g ∈ {1, 2}: periods,
//! theta functions, ℘-values from theta, the Abel map, and a numeric check
//! of the inversion formulas.
//!
//! Differentials follow the (2, 2g+1) conventions of the core crate:
//! du_{2i−1} = x^{g−i} dx/∂_y f and ∂_y f = −2y, so near infinity
//! u_w(ξ) = ξ^w/w + … with x = ξ⁻², y = ξ^{−(2g+1)} h(ξ), h(0) = 1.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use jacobi_core::algebra::Coefficient;
use jacobi_core::curve::CurveError;
use jacobi_core::expansions::ExpansionError;
use jacobi_core::roots::{horner, poly_roots, RootError};
use jacobi_core::{CurveFamily, CurvePoint, FirstKindBasis, InfinityChart, Series};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::divisor::Divisor;

type CMat = DMatrix<Complex64>;

/// Terms kept in the series for u(ξ) and h(ξ) near infinity.
const TAIL_ORDER: i32 = 28;
/// Gauss–Legendre nodes per panel.
const PANEL_NODES: usize = 20;
/// Theta tail is kept below 10^−THETA_DIGITS of the dominant term.
const THETA_DIGITS: f64 = 12.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HyperError {
    #[error("({n},{s}) is not a hyperelliptic curve of genus 1 or 2")]
    UnsupportedCurve { n: u32, s: u32 },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("series near infinity: {0}")]
    Series(String),
    #[error("branch points closer than tolerance: {separation:e}")]
    BranchCollision { separation: f64 },
    #[error("τ is not symmetric with positive imaginary part (asymmetry {asymmetry:e})")]
    NonSymmetricTau { asymmetry: f64 },
    #[error("no odd characteristic vanishes on the Abel image of the curve (residual {residual:e})")]
    CharacteristicNotFound { residual: f64 },
    #[error("u lies on the theta divisor (|θ|/scale = {ratio:e})")]
    OnThetaDivisor { ratio: f64 },
    #[error("quadrature did not converge on the cycle through {from} and {to}")]
    QuadratureStall { from: Complex64, to: Complex64 },
    #[error("integration path passes too close to a branch point near {at}")]
    PathThroughBranchPoint { at: Complex64 },
    #[error("lost the sheet of y while continuing to {at}")]
    SheetLoss { at: Complex64 },
    #[error("point ({x}, {y}) is not on the curve")]
    NotOnCurve { x: Complex64, y: Complex64 },
    #[error("divisor has {found} points, genus is {genus}")]
    WrongDegree { found: usize, genus: usize },
    #[error("divisor is special")]
    SpecialDivisor,
}

impl From<ExpansionError> for HyperError {
    fn from(e: ExpansionError) -> Self {
        HyperError::Series(e.to_string())
    }
}

fn c0() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Gauss–Legendre rule on [0, 1] with nodes in increasing order.
fn unit_rule(n: usize) -> Vec<(f64, f64)> {
    let gl = GaussLegendre::new(NonZeroUsize::new(n).expect("positive node count"));
    let mut pairs: Vec<(f64, f64)> = gl.iter().map(|&(x, w)| ((x + 1.0) / 2.0, w / 2.0)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

/// Picks the square root of `sq` closest to `prev`; fails on a jump.
fn continue_sqrt(sq: Complex64, prev: Complex64, at: Complex64) -> Result<Complex64, HyperError> {
    let s = sq.sqrt();
    let (d1, d2) = ((s - prev).norm(), (s + prev).norm());
    let (best, dist) = if d1 <= d2 { (s, d1) } else { (-s, d2) };
    if dist > 0.5 * prev.norm() {
        return Err(HyperError::SheetLoss { at });
    }
    Ok(best)
}

fn eval_series(s: &Series<BigRational>, lambda: &BTreeMap<u32, Complex64>) -> Result<Vec<Complex64>, HyperError> {
    (0..s.truncation_order())
        .map(|e| {
            let c = s.coeff(e).map_err(|err| HyperError::Series(err.to_string()))?;
            Ok(c.eval(|k| lambda.get(&k).copied().unwrap_or_default(), Complex64::from_rational))
        })
        .collect()
}

/// A numeric (2, 2g+1) curve with its data near infinity.
#[derive(Debug, Clone)]
pub struct HyperellipticCurve {
    pub fam: CurveFamily,
    pub genus: usize,
    /// P(x) = y², ascending, monic of degree 2g+1.
    pub poly: Vec<Complex64>,
    /// Branch points sorted by real part, then imaginary part.
    pub branch_points: Vec<Complex64>,
    /// Coefficients of ξ⁰.. in u_w(ξ), one row per gap.
    tail_u: Vec<Vec<Complex64>>,
    /// Coefficients of h(ξ) = ξ^{2g+1} y(ξ).
    tail_h: Vec<Complex64>,
}

impl HyperellipticCurve {
    pub fn new(fam: &CurveFamily) -> Result<Self, HyperError> {
        if fam.n != 2 || !(fam.genus == 1 || fam.genus == 2) {
            return Err(HyperError::UnsupportedCurve { n: fam.n, s: fam.s });
        }
        let g = fam.genus as usize;
        let lambda = fam.numeric_lambdas()?;
        let mut poly = vec![c0(); 2 * g + 2];
        poly[2 * g + 1] = Complex64::new(1.0, 0.0);
        for (k, &(j, i)) in fam.slots() {
            if let Some(v) = lambda.get(k) {
                debug_assert_eq!(j, 0);
                poly[i as usize] += v;
            }
        }
        let mut branch_points = poly_roots(&poly)?;
        branch_points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let scale = 1.0 + branch_points.iter().map(|e| e.norm()).fold(0.0, f64::max);
        let mut separation = f64::INFINITY;
        for (a, e) in branch_points.iter().enumerate() {
            for f in &branch_points[a + 1..] {
                separation = separation.min((e - f).norm());
            }
        }
        if separation < 1e-6 * scale {
            return Err(HyperError::BranchCollision { separation });
        }
        let symbolic = CurveFamily::symbolic_with_range(2, fam.s, fam.range)?;
        let chart = InfinityChart::<BigRational>::expand(&symbolic, TAIL_ORDER)?;
        let first = FirstKindBasis::new(&chart)?;
        let tail_u = first.u_series.iter().map(|s| eval_series(s, &lambda)).collect::<Result<_, _>>()?;
        let tail_h = eval_series(chart.h_series(), &lambda)?;
        Ok(HyperellipticCurve { fam: fam.clone(), genus: g, poly, branch_points, tail_u, tail_h })
    }

    /// Gap labels 1, 3, …, 2g−1.
    pub fn gaps(&self) -> Vec<u32> {
        (0..self.genus as u32).map(|i| 2 * i + 1).collect()
    }

    pub fn p(&self, x: Complex64) -> Complex64 {
        horner(&self.poly, x)
    }

    fn coeff(&self, k: usize) -> Complex64 {
        self.poly.get(k).copied().unwrap_or_default()
    }

    /// Numerators of du_w, w = 1, 3, …: x^{g−1}, x^{g−2}, …, 1.
    pub fn du_numerators(&self) -> Vec<Vec<Complex64>> {
        let g = self.genus;
        (1..=g)
            .map(|i| {
                let mut v = vec![c0(); g - i + 1];
                v[g - i] = Complex64::new(1.0, 0.0);
                v
            })
            .collect()
    }

    /// Numerators of dr_w (over ∂_y f): Σ_{k=j}^{2g+1−j} (k+1−j) c_{k+1+j} x^k, j = g−i+1.
    ///
    /// The principal parts are fixed by res u_v dr_w = δ_vw; the holomorphic
    /// parts are those of the symmetric fundamental bidifferential.
    pub fn dr_numerators(&self) -> Vec<Vec<Complex64>> {
        let g = self.genus;
        (1..=g)
            .map(|i| {
                let j = g - i + 1;
                let mut v = vec![c0(); 2 * g + 2 - j];
                for k in j..=2 * g + 1 - j {
                    v[k] = self.coeff(k + 1 + j) * (k + 1 - j) as f64;
                }
                v
            })
            .collect()
    }

    /// R(t) = t^{2(2g+1)} P(t⁻²) = h(t)².
    fn r_of_t(&self, t: Complex64) -> Complex64 {
        let d = 2 * self.genus + 1;
        let t2 = t * t;
        (0..=d).fold(c0(), |acc, i| acc + self.coeff(i) * t2.powu((d - i) as u32))
    }

    /// Zeros of R(t): ±e^{−1/2} for each nonzero branch point e.
    fn chart_branch_points(&self) -> Vec<Complex64> {
        self.branch_points
            .iter()
            .filter(|e| e.norm() > 0.0)
            .flat_map(|e| {
                let t = e.sqrt().inv();
                [t, -t]
            })
            .collect()
    }
}

/// Quasi-characteristic [δ′; δ″] with entries in {0, ½}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Characteristic {
    pub prime: Vec<f64>,
    pub second: Vec<f64>,
}

impl Characteristic {
    pub fn zero(g: usize) -> Self {
        Characteristic { prime: vec![0.0; g], second: vec![0.0; g] }
    }

    pub fn is_odd(&self) -> bool {
        let p: f64 = self.prime.iter().zip(&self.second).map(|(a, b)| 4.0 * a * b).sum();
        (p.round() as i64) % 2 == 1
    }

    /// All 2^{2g} characteristics.
    pub fn all(g: usize) -> Vec<Self> {
        (0..1usize << (2 * g))
            .map(|bits| Characteristic {
                prime: (0..g).map(|i| 0.5 * ((bits >> i) & 1) as f64).collect(),
                second: (0..g).map(|i| 0.5 * ((bits >> (g + i)) & 1) as f64).collect(),
            })
            .collect()
    }
}

/// Riemann matrix, characteristic and lattice cutoff for θ[δ](z; τ).
///
/// θ[δ](z) = Σ_{m ∈ ℤ^g} exp(iπ (m+δ′)ᵀτ(m+δ′) + 2πi (m+δ′)ᵀ(z+δ″)).
/// The sum runs over the box |m − m₀|_∞ ≤ radius around the lattice point
/// m₀ nearest the dominant term, which keeps the tail below 1e−12.
#[derive(Debug, Clone)]
pub struct ThetaContext {
    pub tau: CMat,
    pub characteristic: Characteristic,
    pub radius: usize,
    im_tau_inv: DMatrix<f64>,
}

impl ThetaContext {
    pub fn new(tau: CMat, characteristic: Characteristic) -> Result<Self, HyperError> {
        let asymmetry = (&tau - tau.transpose()).norm() / tau.norm();
        let im = tau.map(|z| z.im);
        let im_sym = (&im + im.transpose()) * 0.5;
        let lambda_min = im_sym.clone().symmetric_eigen().eigenvalues.min();
        if asymmetry > 1e-8 || !(lambda_min > 0.0) {
            return Err(HyperError::NonSymmetricTau { asymmetry });
        }
        let rho = ((THETA_DIGITS * std::f64::consts::LN_10 + 8.0) / PI).sqrt();
        let radius = (rho / lambda_min.sqrt()).ceil() as usize + 1;
        let im_tau_inv = im_sym.try_inverse().expect("positive definite");
        Ok(ThetaContext { tau, characteristic, radius, im_tau_inv })
    }

    pub fn genus(&self) -> usize {
        self.tau.nrows()
    }

    pub fn with_characteristic(&self, characteristic: Characteristic) -> Self {
        ThetaContext { characteristic, ..self.clone() }
    }

    pub fn with_radius(&self, radius: usize) -> Self {
        ThetaContext { radius, ..self.clone() }
    }
}

/// θ[δ](z; τ) and the sum of the moduli of its terms.
pub fn theta_with_scale(z: &[Complex64], ctx: &ThetaContext) -> (Complex64, f64) {
    let g = ctx.genus();
    let ch = &ctx.characteristic;
    let im_z = DVector::from_fn(g, |i, _| z[i].im);
    let center = -(&ctx.im_tau_inv * im_z);
    let m0: Vec<i64> = (0..g).map(|i| (center[i] - ch.prime[i]).round() as i64).collect();
    let r = ctx.radius as i64;
    let mut offset = vec![-r; g];
    let mut sum = c0();
    let mut scale = 0.0;
    let i_pi = Complex64::new(0.0, PI);
    loop {
        let v: Vec<f64> = (0..g).map(|i| (m0[i] + offset[i]) as f64 + ch.prime[i]).collect();
        let mut expo = c0();
        for a in 0..g {
            for b in 0..g {
                expo += i_pi * ctx.tau[(a, b)] * (v[a] * v[b]);
            }
            expo += i_pi * 2.0 * v[a] * (z[a] + ch.second[a]);
        }
        let term = expo.exp();
        sum += term;
        scale += term.norm();
        let mut k = 0;
        loop {
            if k == g {
                return (sum, scale);
            }
            offset[k] += 1;
            if offset[k] <= r {
                break;
            }
            offset[k] = -r;
            k += 1;
        }
    }
}

pub fn theta(z: &[Complex64], ctx: &ThetaContext) -> Complex64 {
    theta_with_scale(z, ctx).0
}

/// Periods of a hyperelliptic curve and the derived theta data.
///
/// Cycles: γ_i is the loop around the segment [e_i, e_{i+1}] of the sorted
/// branch points; a_k = γ_{2k−1}, b_k = γ_{2k} + γ_{2k+2} + … + γ_{2g}.
/// Orientations are fixed so that τ is symmetric with Im τ ≻ 0.
#[derive(Debug, Clone)]
pub struct PeriodData {
    pub genus: usize,
    pub branch_points: Vec<Complex64>,
    /// omega[(i, k)] = ∮_{a_k} du_{w_i}.
    pub omega: CMat,
    pub omega_prime: CMat,
    /// eta[(i, k)] = ∮_{a_k} dr_{w_i}.
    pub eta: CMat,
    pub eta_prime: CMat,
    pub tau: CMat,
    /// Quadratic form of σ(u) = exp(½uᵀκu) θ[δ](ω⁻¹u): κ = −ηω⁻¹.
    pub kappa: CMat,
    pub theta: ThetaContext,
    /// ‖τ − τᵀ‖/‖τ‖ before symmetrization.
    pub tau_asymmetry: f64,
    /// ‖ωη′ᵀ − ω′ηᵀ − cI‖/2π with c = ±2πi.
    pub legendre_defect: f64,
    /// Largest change of any period when the panel count doubled.
    pub quadrature_change: f64,
}

/// ∫_{e_a}^{e_b} num_k(x) dx/(−2y) for every numerator, on a consistent sheet.
///
/// x = m − d cos θ removes the square-root endpoints: dx/y = dθ/(i√Q(x)),
/// Q = P/((x − e_a)(x − e_b)).
fn segment_integrals(
    ea: Complex64,
    eb: Complex64,
    others: &[Complex64],
    nums: &[Vec<Complex64>],
    panels: usize,
    rule: &[(f64, f64)],
) -> Result<Vec<Complex64>, HyperError> {
    let m = (ea + eb) / 2.0;
    let d = (eb - ea) / 2.0;
    let mut acc = vec![c0(); nums.len()];
    let mut prev: Option<Complex64> = None;
    let width = PI / panels as f64;
    for p in 0..panels {
        for &(node, w) in rule {
            let th = (p as f64 + node) * width;
            let x = m - d * th.cos();
            let q: Complex64 = others.iter().map(|e| x - e).product();
            let s = match prev {
                None => q.sqrt(),
                Some(pv) => continue_sqrt(q, pv, x)?,
            };
            prev = Some(s);
            let factor = Complex64::new(0.0, -2.0) * s;
            for (a, num) in acc.iter_mut().zip(nums) {
                *a += horner(num, x) / factor * (w * width);
            }
        }
    }
    Ok(acc)
}

fn converged_segment(
    ea: Complex64,
    eb: Complex64,
    others: &[Complex64],
    nums: &[Vec<Complex64>],
    rule: &[(f64, f64)],
) -> Result<(Vec<Complex64>, f64), HyperError> {
    let mut panels = 1;
    let mut cur = segment_integrals(ea, eb, others, nums, panels, rule);
    while panels <= 512 {
        let next = segment_integrals(ea, eb, others, nums, 2 * panels, rule)?;
        if let Ok(c) = &cur {
            let size = 1.0 + next.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let change = c.iter().zip(&next).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            if change < 1e-14 * size {
                return Ok((next, change));
            }
        }
        cur = Ok(next);
        panels *= 2;
    }
    Err(HyperError::QuadratureStall { from: ea, to: eb })
}

fn split_rows(v: &[Vec<Complex64>], g: usize, col: usize, offset: usize) -> impl Iterator<Item = Complex64> + '_ {
    (0..g).map(move |i| v[col][offset + i])
}

pub fn compute_periods(curve: &HyperellipticCurve) -> Result<PeriodData, HyperError> {
    compute_periods_with(curve, PANEL_NODES)
}

/// `compute_periods` with `nodes` Gauss–Legendre nodes per panel.
pub fn compute_periods_with(curve: &HyperellipticCurve, nodes: usize) -> Result<PeriodData, HyperError> {
    let g = curve.genus;
    let e = &curve.branch_points;
    let rule = unit_rule(nodes);
    let mut nums = curve.du_numerators();
    nums.extend(curve.dr_numerators());
    let mut cycles = Vec::with_capacity(2 * g);
    let mut quadrature_change: f64 = 0.0;
    for i in 0..2 * g {
        let others: Vec<Complex64> = e.iter().enumerate().filter(|&(k, _)| k != i && k != i + 1).map(|(_, z)| *z).collect();
        let (seg, change) = converged_segment(e[i], e[i + 1], &others, &nums, &rule)?;
        quadrature_change = quadrature_change.max(2.0 * change);
        cycles.push(seg.into_iter().map(|z| 2.0 * z).collect::<Vec<_>>());
    }

    let mut best: Option<(f64, [CMat; 4])> = None;
    for signs in 0..1usize << (2 * g - 1) {
        let sign = |i: usize| if i > 0 && (signs >> (i - 1)) & 1 == 1 { -1.0 } else { 1.0 };
        let a: Vec<Vec<Complex64>> = (0..g).map(|k| cycles[2 * k].iter().map(|z| z * sign(2 * k)).collect()).collect();
        let b: Vec<Vec<Complex64>> = (0..g)
            .map(|k| {
                (0..2 * g).map(|c| (k..g).map(|j| cycles[2 * j + 1][c] * sign(2 * j + 1)).sum()).collect()
            })
            .collect();
        let omega = CMat::from_fn(g, g, |i, k| split_rows(&a, g, k, 0).nth(i).unwrap());
        let omega_p = CMat::from_fn(g, g, |i, k| split_rows(&b, g, k, 0).nth(i).unwrap());
        let eta = CMat::from_fn(g, g, |i, k| split_rows(&a, g, k, g).nth(i).unwrap());
        let eta_p = CMat::from_fn(g, g, |i, k| split_rows(&b, g, k, g).nth(i).unwrap());
        let Some(inv) = omega.clone().try_inverse() else { continue };
        let tau = &inv * &omega_p;
        let asym = (&tau - tau.transpose()).norm() / tau.norm();
        let im = tau.map(|z| z.im);
        let positive = ((&im + im.transpose()) * 0.5).symmetric_eigen().eigenvalues.min() > 0.0;
        if positive && best.as_ref().is_none_or(|(s, _)| asym < *s) {
            best = Some((asym, [omega, omega_p, eta, eta_p]));
        }
    }
    let Some((tau_asymmetry, [omega, omega_prime, eta, eta_prime])) = best else {
        return Err(HyperError::NonSymmetricTau { asymmetry: f64::INFINITY });
    };
    if tau_asymmetry > 1e-8 {
        return Err(HyperError::NonSymmetricTau { asymmetry: tau_asymmetry });
    }
    let omega_inv = omega.clone().try_inverse().expect("checked above");
    let tau_raw = &omega_inv * &omega_prime;
    let tau = (&tau_raw + tau_raw.transpose()) * Complex64::new(0.5, 0.0);
    let kappa = -(&eta * &omega_inv);
    let legendre = &omega * eta_prime.transpose() - &omega_prime * eta.transpose();
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let id = CMat::identity(g, g);
    let legendre_defect =
        (&legendre - &id * two_pi_i).norm().min((&legendre + &id * two_pi_i).norm()) / (2.0 * PI);
    let theta = ThetaContext::new(tau.clone(), Characteristic::zero(g))?;
    let mut periods = PeriodData {
        genus: g,
        branch_points: e.clone(),
        omega,
        omega_prime,
        eta,
        eta_prime,
        tau,
        kappa,
        theta,
        tau_asymmetry,
        legendre_defect,
        quadrature_change,
    };
    let delta = vanishing_characteristic(curve, &periods)?;
    periods.theta = periods.theta.with_characteristic(delta);
    Ok(periods)
}

impl PeriodData {
    pub fn omega_inverse(&self) -> CMat {
        self.omega.clone().try_inverse().expect("period matrix is invertible")
    }

    /// z = ω⁻¹u.
    pub fn normalize(&self, u: &[Complex64]) -> Vec<Complex64> {
        let z = self.omega_inverse() * DVector::from_column_slice(u);
        z.iter().copied().collect()
    }

    /// Real coordinates (a, b) with ω⁻¹u = a + τ b.
    pub fn lattice_coordinates(&self, u: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let g = self.genus;
        let z = self.normalize(u);
        let im = self.tau.map(|c| c.im);
        let b = im.try_inverse().expect("Im τ is invertible") * DVector::from_fn(g, |i, _| z[i].im);
        let a: Vec<f64> = (0..g).map(|i| z[i].re - (0..g).map(|j| self.tau[(i, j)].re * b[j]).sum::<f64>()).collect();
        (a, b.iter().copied().collect())
    }

    /// ω m + ω′ n.
    pub fn lattice_vector(&self, m: &[f64], n: &[f64]) -> Vec<Complex64> {
        let g = self.genus;
        (0..g)
            .map(|i| (0..g).map(|k| self.omega[(i, k)] * m[k] + self.omega_prime[(i, k)] * n[k]).sum())
            .collect()
    }

    /// u minus the nearest lattice vector.
    pub fn reduce(&self, u: &[Complex64]) -> Vec<Complex64> {
        let (a, b) = self.lattice_coordinates(u);
        let m: Vec<f64> = a.iter().map(|x| x.round()).collect();
        let n: Vec<f64> = b.iter().map(|x| x.round()).collect();
        let shift = self.lattice_vector(&m, &n);
        u.iter().zip(shift).map(|(x, s)| x - s).collect()
    }

    /// Shortest period length, the natural step unit in u.
    pub fn scale(&self) -> f64 {
        (0..self.genus)
            .flat_map(|k| [self.omega.column(k).norm(), self.omega_prime.column(k).norm()])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn symmetric_kappa(&self) -> CMat {
        (&self.kappa + self.kappa.transpose()) * Complex64::new(0.5, 0.0)
    }
}

/// Test points for the characteristic search, away from branch points.
fn probe_points(curve: &HyperellipticCurve) -> Result<Vec<CurvePoint>, HyperError> {
    let candidates = [
        Complex64::new(0.37, 0.21),
        Complex64::new(-0.43, 0.52),
        Complex64::new(0.81, -0.64),
        Complex64::new(-1.1, -0.3),
        Complex64::new(1.3, 0.9),
    ];
    let mut out = Vec::new();
    for x in candidates {
        if curve.branch_points.iter().all(|e| (x - e).norm() > 0.05) {
            let y = curve.p(x).sqrt();
            out.push(CurvePoint::new(x, y));
        }
        if out.len() == 2 {
            break;
        }
    }
    Ok(out)
}

/// The odd characteristic δ with θ[δ](ω⁻¹𝒜(P)) = 0 for every P on the curve.
///
/// In genus 1 this is [½; ½]. In genus 2 the theta divisor is the Abel image of the curve shifted by
/// the Riemann constants, a half period; the matching δ is found by testing
/// every odd characteristic on probe points.
fn vanishing_characteristic(curve: &HyperellipticCurve, periods: &PeriodData) -> Result<Characteristic, HyperError> {
    let g = curve.genus;
    if g == 1 {
        return Ok(Characteristic { prime: vec![0.5], second: vec![0.5] });
    }
    let probes = probe_points(curve)?;
    let zs: Vec<Vec<Complex64>> = probes
        .iter()
        .map(|p| abel_map(curve, p).map(|u| periods.normalize(&periods.reduce(&u))))
        .collect::<Result<_, _>>()?;
    let mut best: Option<(f64, Characteristic)> = None;
    for ch in Characteristic::all(g).into_iter().filter(Characteristic::is_odd) {
        let ctx = periods.theta.with_characteristic(ch.clone());
        let residual = zs
            .iter()
            .map(|z| {
                let (v, s) = theta_with_scale(z, &ctx);
                v.norm() / s
            })
            .fold(0.0, f64::max);
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, ch));
        }
    }
    let (residual, ch) = best.expect("odd characteristics exist");
    if residual > 1e-9 {
        return Err(HyperError::CharacteristicNotFound { residual });
    }
    Ok(ch)
}

/// ℘_{i,j} and ℘_{i,j,k} at one point, indexed by gap labels.
#[derive(Debug, Clone, PartialEq)]
pub struct WpValues {
    pub u: Vec<Complex64>,
    pub wp2: BTreeMap<(u32, u32), Complex64>,
    pub wp3: BTreeMap<(u32, u32, u32), Complex64>,
}

impl WpValues {
    pub fn wp2(&self, i: u32, j: u32) -> Complex64 {
        self.wp2[&(i.min(j), i.max(j))]
    }

    pub fn wp3(&self, i: u32, j: u32, k: u32) -> Complex64 {
        let mut v = [i, j, k];
        v.sort();
        self.wp3[&(v[0], v[1], v[2])]
    }
}

/// θ[δ](z) with its first, second and third z-derivatives, from the series.
#[derive(Debug, Clone)]
pub struct ThetaJet {
    pub value: Complex64,
    pub grad: Vec<Complex64>,
    pub hess: Vec<Vec<Complex64>>,
    pub third: Vec<Vec<Vec<Complex64>>>,
    /// Σ |terms|, the size against which cancellation is judged.
    pub scale: f64,
}

impl ThetaJet {
    /// ∂_a log θ.
    pub fn log_grad(&self, a: usize) -> Complex64 {
        self.grad[a] / self.value
    }

    /// ∂_a∂_b log θ.
    pub fn log_hess(&self, a: usize, b: usize) -> Complex64 {
        let t = self.value;
        self.hess[a][b] / t - self.grad[a] * self.grad[b] / (t * t)
    }

    /// ∂_a∂_b∂_c log θ.
    pub fn log_third(&self, a: usize, b: usize, c: usize) -> Complex64 {
        let (t, d) = (self.value, &self.grad);
        let h = &self.hess;
        self.third[a][b][c] / t - (h[a][b] * d[c] + h[a][c] * d[b] + h[b][c] * d[a]) / (t * t)
            + 2.0 * d[a] * d[b] * d[c] / (t * t * t)
    }
}

pub fn theta_jet(z: &[Complex64], ctx: &ThetaContext) -> ThetaJet {
    let g = ctx.genus();
    let ch = &ctx.characteristic;
    let im_z = DVector::from_fn(g, |i, _| z[i].im);
    let center = -(&ctx.im_tau_inv * im_z);
    let m0: Vec<i64> = (0..g).map(|i| (center[i] - ch.prime[i]).round() as i64).collect();
    let r = ctx.radius as i64;
    let mut offset = vec![-r; g];
    let mut jet = ThetaJet {
        value: c0(),
        grad: vec![c0(); g],
        hess: vec![vec![c0(); g]; g],
        third: vec![vec![vec![c0(); g]; g]; g],
        scale: 0.0,
    };
    let i_pi = Complex64::new(0.0, PI);
    loop {
        let v: Vec<f64> = (0..g).map(|i| (m0[i] + offset[i]) as f64 + ch.prime[i]).collect();
        let mut expo = c0();
        for a in 0..g {
            for b in 0..g {
                expo += i_pi * ctx.tau[(a, b)] * (v[a] * v[b]);
            }
            expo += i_pi * 2.0 * v[a] * (z[a] + ch.second[a]);
        }
        let term = expo.exp();
        let k: Vec<Complex64> = v.iter().map(|x| 2.0 * i_pi * x).collect();
        jet.value += term;
        jet.scale += term.norm();
        for a in 0..g {
            jet.grad[a] += k[a] * term;
            for b in 0..g {
                jet.hess[a][b] += k[a] * k[b] * term;
                for c in 0..g {
                    jet.third[a][b][c] += k[a] * k[b] * k[c] * term;
                }
            }
        }
        let mut idx = 0;
        loop {
            if idx == g {
                return jet;
            }
            offset[idx] += 1;
            if offset[idx] <= r {
                break;
            }
            offset[idx] = -r;
            idx += 1;
        }
    }
}

/// ℘_{i,j}(u) = −∂_i∂_j log σ(u) and ℘_{i,j,k}(u) = −∂_i∂_j∂_k log σ(u).
///
/// σ(u) = exp(½uᵀκu) θ[δ](ω⁻¹u). The derivatives of θ are summed term by
/// term from the series and pulled back to u through z = ω⁻¹u.
pub fn wp_from_theta(u: &[Complex64], periods: &PeriodData) -> Result<WpValues, HyperError> {
    let g = periods.genus;
    let u0 = periods.reduce(u);
    let w = periods.omega_inverse();
    let z = &w * DVector::from_column_slice(&u0);
    let jet = theta_jet(z.as_slice(), &periods.theta);
    let ratio = jet.value.norm() / jet.scale;
    if ratio < 1e-10 {
        return Err(HyperError::OnThetaDivisor { ratio });
    }
    let kappa = periods.symmetric_kappa();
    let gaps: Vec<u32> = (0..g as u32).map(|i| 2 * i + 1).collect();

    let mut wp2 = BTreeMap::new();
    for i in 0..g {
        for j in i..g {
            let mut d2 = c0();
            for a in 0..g {
                for b in 0..g {
                    d2 += w[(a, i)] * w[(b, j)] * jet.log_hess(a, b);
                }
            }
            wp2.insert((gaps[i], gaps[j]), -kappa[(i, j)] - d2);
        }
    }
    let mut wp3 = BTreeMap::new();
    for i in 0..g {
        for j in i..g {
            for k in j..g {
                let mut d3 = c0();
                for a in 0..g {
                    for b in 0..g {
                        for c in 0..g {
                            d3 += w[(a, i)] * w[(b, j)] * w[(c, k)] * jet.log_third(a, b, c);
                        }
                    }
                }
                wp3.insert((gaps[i], gaps[j], gaps[k]), -d3);
            }
        }
    }
    Ok(WpValues { u: u.to_vec(), wp2, wp3 })
}

/// Integrates t^{2i}/h(t), i < g, along straight legs through `waypoints`,
/// continuing h by continuity. Returns the increments and h at the end.
fn chart_legs(
    curve: &HyperellipticCurve,
    start: Complex64,
    h_start: Complex64,
    waypoints: &[Complex64],
) -> Result<(Vec<Complex64>, Complex64), HyperError> {
    let g = curve.genus;
    let branch = curve.chart_branch_points();
    let rule = unit_rule(PANEL_NODES);
    let mut acc = vec![c0(); g];
    let mut h = h_start;
    let mut from = start;
    for &to in waypoints {
        walk_segment(from, to, &branch, &rule, |t, w| {
            h = continue_sqrt(curve.r_of_t(t), h, t)?;
            for (i, a) in acc.iter_mut().enumerate() {
                *a += t.powu(2 * i as u32) / h * w;
            }
            Ok(())
        })?;
        h = continue_sqrt(curve.r_of_t(to), h, to)?;
        from = to;
    }
    Ok((acc, h))
}

/// Visits quadrature nodes along [from, to] in order, with panels no longer
/// than a quarter of the distance to the nearest singular point.
fn walk_segment(
    from: Complex64,
    to: Complex64,
    singular: &[Complex64],
    rule: &[(f64, f64)],
    mut visit: impl FnMut(Complex64, Complex64) -> Result<(), HyperError>,
) -> Result<(), HyperError> {
    let len = (to - from).norm();
    if len == 0.0 {
        return Ok(());
    }
    let dir = (to - from) / len;
    let clearance = 1e-6 * (1.0 + len);
    let mut s = 0.0;
    while s < len {
        let p = from + dir * s;
        let d = singular.iter().map(|b| (p - b).norm()).fold(f64::INFINITY, f64::min);
        if d < clearance {
            return Err(HyperError::PathThroughBranchPoint { at: p });
        }
        let step = (0.25 * d).min(len - s);
        for &(node, w) in rule {
            visit(from + dir * (s + node * step), dir * (w * step))?;
        }
        s += step;
    }
    Ok(())
}

/// Distance from `b` to the segment [p, q].
fn segment_distance(p: Complex64, q: Complex64, b: Complex64) -> f64 {
    let d = q - p;
    let t = if d.norm_sqr() == 0.0 { 0.0 } else { ((b - p) * d.conj()).re / d.norm_sqr() };
    (p + d * t.clamp(0.0, 1.0) - b).norm()
}

fn polyline_clearance(points: &[Complex64], singular: &[Complex64]) -> f64 {
    points
        .windows(2)
        .flat_map(|w| singular.iter().map(move |b| segment_distance(w[0], w[1], *b) / (1.0 + b.norm())))
        .fold(f64::INFINITY, f64::min)
}

/// Route from 0 to `target` in the ξ-plane: straight if it stays clear of
/// branch points, else through the best of a few side waypoints.
fn chart_route(target: Complex64, branch: &[Complex64]) -> Vec<Complex64> {
    let straight = vec![c0(), target];
    if polyline_clearance(&straight, branch) > 0.05 {
        return vec![target];
    }
    let mut best = (polyline_clearance(&straight, branch), vec![target]);
    for alpha in [0.4, -0.4, 0.8, -0.8, 1.5, -1.5] {
        let w = target * Complex64::new(0.5, alpha);
        let c = polyline_clearance(&[c0(), w, target], branch);
        if c > best.0 {
            best = (c, vec![w, target]);
        }
    }
    best.1
}

/// u(ξ) and h(ξ) from the series near infinity, valid for small |ξ|.
fn tail_at(curve: &HyperellipticCurve, xi: Complex64) -> (Vec<Complex64>, Complex64) {
    let u = curve.tail_u.iter().map(|c| horner(c, xi)).collect();
    (u, horner(&curve.tail_h, xi))
}

/// Abel image of the chart point ξ, continuing from infinity along `route`.
///
/// Returns u and y at the end of the path.
pub fn abel_map_chart(
    curve: &HyperellipticCurve,
    route: &[Complex64],
) -> Result<(Vec<Complex64>, Complex64), HyperError> {
    let g = curve.genus;
    let Some(&first) = route.first() else {
        return Ok((vec![c0(); g], c0()));
    };
    let branch = curve.chart_branch_points();
    let radius = branch.iter().map(|b| b.norm()).fold(f64::INFINITY, f64::min);
    let xi0 = if first.norm() == 0.0 { first } else { first * (0.1 * radius / first.norm()).min(1.0) };
    let (u0, h0) = tail_at(curve, xi0);
    let mut rest = route.to_vec();
    if rest.first() == Some(&xi0) {
        rest.remove(0);
    }
    let (du, h) = chart_legs(curve, xi0, h0, &rest)?;
    let end = *route.last().unwrap();
    let y = if end.norm() == 0.0 { c0() } else { h / end.powu(2 * g as u32 + 1) };
    Ok((u0.iter().zip(&du).map(|(a, b)| a + b).collect(), y))
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

/// Flips u when the path ended on the other sheet over x.
fn match_sheet(u: Vec<Complex64>, y_end: Complex64, p: &CurvePoint) -> Result<Vec<Complex64>, HyperError> {
    if close(y_end, p.y, 1e-6) {
        Ok(u)
    } else if close(-y_end, p.y, 1e-6) {
        Ok(u.into_iter().map(|z| -z).collect())
    } else {
        Err(HyperError::SheetLoss { at: p.x })
    }
}

fn check_on_curve(curve: &HyperellipticCurve, p: &CurvePoint) -> Result<(), HyperError> {
    let r = (p.y * p.y - curve.p(p.x)).norm();
    let scale = 1.0 + p.y.norm_sqr() + curve.poly.iter().enumerate().map(|(k, c)| c.norm() * p.x.norm().powi(k as i32)).sum::<f64>();
    if r > 1e-8 * scale {
        return Err(HyperError::NotOnCurve { x: p.x, y: p.y });
    }
    Ok(())
}

/// 𝒜(P) = ∫_∞^P du along the default route.
pub fn abel_map(curve: &HyperellipticCurve, p: &CurvePoint) -> Result<Vec<Complex64>, HyperError> {
    abel_map_with(curve, p, None)
}

/// 𝒜(P) with an optional extra waypoint in the ξ-plane (ξ² = 1/x).
pub fn abel_map_with(
    curve: &HyperellipticCurve,
    p: &CurvePoint,
    waypoint: Option<Complex64>,
) -> Result<Vec<Complex64>, HyperError> {
    check_on_curve(curve, p)?;
    let branch = curve.chart_branch_points();
    if p.x.norm() >= 0.05 {
        let target = p.x.sqrt().inv();
        let route = match waypoint {
            Some(w) => vec![w, target],
            None => chart_route(target, &branch),
        };
        let (u, y) = abel_map_chart(curve, &route)?;
        return match_sheet(u, y, p);
    }
    // Near x = 0 the chart coordinate blows up: stop at x₁ and finish in the x-plane.
    let mut best: Option<(f64, Complex64)> = None;
    for k in 0..8 {
        let x1 = p.x + Complex64::from_polar(0.3, k as f64 * PI / 4.0);
        let c = curve.branch_points.iter().map(|e| segment_distance(x1, p.x, *e)).fold(f64::INFINITY, f64::min);
        if best.is_none_or(|(b, _)| c > b) {
            best = Some((c, x1));
        }
    }
    let (_, x1) = best.expect("eight candidates");
    let target = x1.sqrt().inv();
    let route = match waypoint {
        Some(w) => vec![w, target],
        None => chart_route(target, &branch),
    };
    let (mut u, mut y) = abel_map_chart(curve, &route)?;
    let nums = curve.du_numerators();
    let rule = unit_rule(PANEL_NODES);
    walk_segment(x1, p.x, &curve.branch_points, &rule, |x, w| {
        y = continue_sqrt(curve.p(x), y, x)?;
        for (a, num) in u.iter_mut().zip(&nums) {
            *a += horner(num, x) / (-2.0 * y) * w;
        }
        Ok(())
    })?;
    y = continue_sqrt(curve.p(p.x), y, p.x)?;
    match_sheet(u, y, p)
}

/// Integer coordinates (m, n) with Δ = ωm + ω′n, and the distance to them.
pub fn lattice_residual(periods: &PeriodData, delta: &[Complex64]) -> (Vec<f64>, Vec<f64>, f64) {
    let (a, b) = periods.lattice_coordinates(delta);
    let err = a.iter().chain(&b).map(|x| (x - x.round()).abs()).fold(0.0, f64::max);
    (a.iter().map(|x| x.round()).collect(), b.iter().map(|x| x.round()).collect(), err)
}

/// One verified identity: lhs and rhs as [re, im].
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub lhs: [f64; 2],
    pub rhs: [f64; 2],
    pub abs_err: f64,
}

impl IdentityCheck {
    fn new(identity: impl Into<String>, lhs: Complex64, rhs: Complex64) -> Self {
        IdentityCheck { identity: identity.into(), lhs: [lhs.re, lhs.im], rhs: [rhs.re, rhs.im], abs_err: (lhs - rhs).norm() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InversionReport {
    pub genus: usize,
    pub u: Vec<[f64; 2]>,
    pub checks: Vec<IdentityCheck>,
    pub max_abs_err: f64,
}

/// Computes u = 𝒜(D) and checks the inversion formulas at u.
///
/// g = 1: x = ℘₁,₁ and y = −½℘₁,₁,₁.
/// g = 2: x₁ + x₂ = ℘₁,₁, x₁x₂ = −℘₁,₃, y_k = −½(x_k℘₁,₁,₁ + ℘₁,₁,₃).
pub fn verify_inversion(
    curve: &HyperellipticCurve,
    periods: &PeriodData,
    d: &Divisor,
) -> Result<InversionReport, HyperError> {
    let g = curve.genus;
    if d.points.len() != g {
        return Err(HyperError::WrongDegree { found: d.points.len(), genus: g });
    }
    if !d.non_special {
        return Err(HyperError::SpecialDivisor);
    }
    let mut u = vec![c0(); g];
    for p in &d.points {
        for (a, b) in u.iter_mut().zip(abel_map(curve, p)?) {
            *a += b;
        }
    }
    let wp = wp_from_theta(&u, periods)?;
    let pts = &d.points;
    let checks = if g == 1 {
        vec![
            IdentityCheck::new("x = wp11", pts[0].x, wp.wp2(1, 1)),
            IdentityCheck::new("y = -1/2 wp111", pts[0].y, -0.5 * wp.wp3(1, 1, 1)),
        ]
    } else {
        let mut v = vec![
            IdentityCheck::new("x1 + x2 = wp11", pts[0].x + pts[1].x, wp.wp2(1, 1)),
            IdentityCheck::new("x1 x2 = -wp13", pts[0].x * pts[1].x, -wp.wp2(1, 3)),
        ];
        for (k, p) in pts.iter().enumerate() {
            v.push(IdentityCheck::new(
                format!("y{} = -1/2 (x{} wp111 + wp113)", k + 1, k + 1),
                p.y,
                -0.5 * (p.x * wp.wp3(1, 1, 1) + wp.wp3(1, 1, 3)),
            ));
        }
        v
    };
    let max_abs_err = checks.iter().map(|c| c.abs_err).fold(0.0, f64::max);
    Ok(InversionReport { genus: g, u: u.iter().map(|z| [z.re, z.im]).collect(), checks, max_abs_err })
}

