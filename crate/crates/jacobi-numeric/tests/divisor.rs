use std::collections::BTreeMap;

use jacobi_core::curve::CurveError;
use jacobi_core::{CurveFamily, CurvePoint};
use jacobi_numeric::divisor::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn family(n: u32, s: u32, seed: u64) -> CurveFamily {
    seeded_family(n, s, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

/// det of the (N+1)×(N+1) matrix whose first row holds the monomials at `q`.
fn determinant_oracle(fam: &CurveFamily, rows: &[CurvePoint], q: CurvePoint) -> Complex64 {
    let monos = fam.monomial_basis(rows.len() + 1);
    let all: Vec<CurvePoint> = std::iter::once(q).chain(rows.iter().copied()).collect();
    DMatrix::from_fn(all.len(), monos.len(), |r, k| all[r].y.powu(monos[k].j) * all[r].x.powu(monos[k].i)).determinant()
}

#[test]
fn genus_one_gives_x_minus_xp() {
    let fam = family(2, 3, 1);
    let p = fam.lift_x_to_points(c(0.3, -0.2)).unwrap()[0];
    let d = Divisor::new(&fam, vec![p]).unwrap();
    let sys = rfunctions_from_divisor_seeded(&fam, &d, 9).unwrap();
    let r2 = &sys.rho[0][0];
    assert_eq!(r2.len(), 2);
    assert!((r2[0] / r2[1] + p.x).norm() < 1e-14);
    let back = solve_divisor(&sys).unwrap();
    assert!(divisor_distance(&d, &back) < 1e-12);
}

#[test]
fn trigonal_rows_match_the_determinant() {
    let fam = family(3, 4, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = seeded_divisor(&fam, &mut rng).unwrap();
    let extra = seeded_points(&fam, 1, &mut rng).unwrap();
    let sys = rfunctions_from_divisor(&fam, &d, &extra).unwrap();
    let probes = seeded_points(&fam, 4, &mut rng).unwrap();
    for l in 0..2 {
        let rows: Vec<CurvePoint> = d.points.iter().chain(&extra[..l]).copied().collect();
        for p in d.points.iter().chain(&extra[..l]) {
            assert!(sys.eval(l, p.x, p.y).norm() < 1e-10, "R_{} at a defining point", 6 + l);
        }
        let ratios: Vec<Complex64> =
            probes.iter().map(|q| sys.eval(l, q.x, q.y) / determinant_oracle(&fam, &rows, *q)).collect();
        for r in &ratios[1..] {
            assert!((r - ratios[0]).norm() < 1e-9 * ratios[0].norm(), "R_{} is not the determinant", 6 + l);
        }
    }
}

#[test]
fn full_fiber_is_special() {
    let fam = family(3, 4, 3);
    let fiber = fam.lift_x_to_points(c(0.4, 0.1)).unwrap();
    let d = Divisor::new(&fam, fiber).unwrap();
    assert!(!d.non_special);
    assert!(matches!(rfunctions_from_divisor_seeded(&fam, &d, 0), Err(DivisorError::SpecialDivisor { .. })));

    let fam = family(2, 5, 3);
    let pair = fam.lift_x_to_points(c(-0.2, 0.5)).unwrap();
    assert!(!Divisor::new(&fam, pair).unwrap().non_special);
}

#[test]
fn points_off_the_curve_are_refused() {
    let fam = family(3, 4, 4);
    let err = Divisor::new(&fam, vec![CurvePoint::new(c(0.1, 0.0), c(5.0, 0.0))]);
    assert!(matches!(err, Err(DivisorError::PointOffCurve { .. })));
}

#[test]
fn repeated_points_are_degenerate() {
    let fam = family(3, 4, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut pts = seeded_points(&fam, 2, &mut rng).unwrap();
    pts.push(pts[0]);
    let d = Divisor::new(&fam, pts).unwrap();
    assert!(matches!(rfunctions_from_divisor_seeded(&fam, &d, 0), Err(DivisorError::DegenerateDeterminant { .. })));
}

#[test]
fn genus_two_chi_is_the_x_polynomial() {
    let fam = family(2, 5, 7);
    let d = seeded_divisor(&fam, &mut ChaCha8Rng::seed_from_u64(8)).unwrap();
    let sys = rfunctions_from_divisor_seeded(&fam, &d, 1).unwrap();
    let chi = chi_polynomial(&sys).unwrap();
    assert_eq!(chi, sys.rho[0][0]);
    let (x1, x2) = (d.points[0].x, d.points[1].x);
    let monic: Vec<Complex64> = chi.iter().map(|v| v / chi[2]).collect();
    assert!((monic[1] + x1 + x2).norm() < 1e-12);
    assert!((monic[0] - x1 * x2).norm() < 1e-12);
}

#[test]
fn chi_roots_are_the_x_coordinates() {
    for (n, s) in [(3, 4), (3, 5), (4, 5)] {
        let fam = family(n, s, 11);
        let d = seeded_divisor(&fam, &mut ChaCha8Rng::seed_from_u64(12)).unwrap();
        let sys = rfunctions_from_divisor_seeded(&fam, &d, 13).unwrap();
        let chi = chi_polynomial(&sys).unwrap();
        assert_eq!(chi.len(), fam.genus as usize + 1);
        for p in &d.points {
            let v = jacobi_core::roots::horner(&chi, p.x);
            let scale: f64 = chi.iter().enumerate().map(|(k, a)| a.norm() * p.x.norm().powi(k as i32)).sum();
            assert!(v.norm() < 1e-10 * scale, "({n},{s}) 𝒳(x_k) = {v}");
        }
    }
}

#[test]
fn degree_bounds_follow_the_weights() {
    let fam = family(4, 5, 0);
    assert_eq!(degree_bound(&fam, 0, 0), Some(3));
    assert_eq!(degree_bound(&fam, 2, 1), Some(2));
    assert_eq!(degree_bound(&fam, 0, 3), None);
    let d = seeded_divisor(&fam, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    let sys = rfunctions_from_divisor_seeded(&fam, &d, 3).unwrap();
    sys.check_degree_bounds().unwrap();
    for (l, row) in sys.rho.iter().enumerate() {
        for (j, poly) in row.iter().enumerate() {
            assert!(poly.len() <= degree_bound(&fam, l as u32, j as u32).map_or(0, |b| b + 1));
        }
    }
}

#[test]
fn handcrafted_collapse_and_null_space_errors() {
    let fam = family(3, 4, 21);
    // ρ0^[6] = (x−1)(x−2), ρ1^[6] = 0, ρ0^[7] = 0, ρ1^[7] = x − 1: 𝒳 = (x−1)²(x−2) but 𝐑(1) = 0.
    let sys = NumericRSystem {
        fam: fam.clone(),
        rho: vec![vec![vec![c(2.0, 0.0), c(-3.0, 0.0), c(1.0, 0.0)], vec![]], vec![vec![], vec![c(-1.0, 0.0), c(1.0, 0.0)]]],
    };
    assert_eq!(chi_polynomial(&sys).unwrap().len(), 4);
    assert!(matches!(solve_divisor(&sys), Err(DivisorError::NullSpaceDimensionError { .. })));

    let collapsed = NumericRSystem {
        fam,
        rho: vec![vec![vec![c(2.0, 0.0), c(-3.0, 0.0), c(1e-13, 0.0)], vec![]], vec![vec![], vec![c(-1.0, 0.0), c(1.0, 0.0)]]],
    };
    assert!(matches!(chi_polynomial(&collapsed), Err(DivisorError::DegreeCollapse { .. })));
}

#[test]
fn cusp_curve_is_degenerate() {
    let lam: BTreeMap<u32, Complex64> = BTreeMap::new();
    let fam = CurveFamily::numeric(3, 4, &lam).unwrap();
    assert!(matches!(check_non_degenerate(&fam), Err(CurveError::Degenerate { .. })));
    check_non_degenerate(&family(3, 4, 0)).unwrap();
}

#[test]
fn discriminant_vanishes_at_branch_points() {
    let fam = family(3, 5, 14);
    let disc = y_discriminant(&fam).unwrap();
    assert_eq!(disc.len(), 11);
    for x in jacobi_core::roots::poly_roots(&disc).unwrap() {
        let ys: Vec<Complex64> = fam.lift_x_to_points(x).unwrap().iter().map(|p| p.y).collect();
        let min_gap = (0..3).flat_map(|a| (a + 1..3).map(move |b| (a, b))).map(|(a, b)| (ys[a] - ys[b]).norm()).fold(f64::MAX, f64::min);
        assert!(min_gap < 1e-5, "no coincident sheets at branch point {x}");
    }
}

#[test]
fn roundtrip_on_four_families() {
    for (n, s) in [(2, 5), (3, 4), (3, 5), (4, 5)] {
        let fam = family(n, s, 100 + n as u64 * 10 + s as u64);
        let report = roundtrip(&fam, 7, 20, 1e-6).unwrap();
        assert!(report.passed, "({n},{s}) {report:?}");
        assert!(report.trials.iter().all(|t| t.chi_degree == Some(fam.genus as usize)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scaling_a_row_keeps_the_divisor(seed in 0u64..1000, re in -3.0f64..3.0, im in -3.0f64..3.0, row in 0usize..2) {
        prop_assume!(re.abs() + im.abs() > 0.05);
        let fam = family(3, 5, seed);
        let d = seeded_divisor(&fam, &mut ChaCha8Rng::seed_from_u64(seed + 1)).unwrap();
        let sys = rfunctions_from_divisor_seeded(&fam, &d, seed + 2).unwrap();
        let mut scaled = sys.clone();
        scaled.scale_row(row, c(re, im));
        let a = solve_divisor(&sys).unwrap();
        let b = solve_divisor(&scaled).unwrap();
        prop_assert!(divisor_distance(&a, &b) < 1e-9);
    }
}
