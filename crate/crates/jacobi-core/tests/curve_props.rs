use std::collections::BTreeMap;

use jacobi_core::curve::gap_sequence;
use jacobi_core::{CurveFamily, ParameterRange};
use num_complex::Complex64;
use num_integer::Integer;
use proptest::prelude::*;

/// Gaps by brute force: w is a gap iff no a, b ≥ 0 give a·n + b·s = w.
fn gaps_by_search(n: u32, s: u32) -> Vec<u32> {
    let bound = n * s;
    (0..bound).filter(|&w| !(0..=w / s).any(|b| (w - b * s).is_multiple_of(n))).collect()
}

fn coprime_pairs() -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    for n in 2..=5u32 {
        for s in n + 1..=13 {
            if n.gcd(&s) == 1 {
                out.push((n, s));
            }
        }
    }
    out
}

#[test]
fn gap_counts_and_largest_gap() {
    for (n, s) in coprime_pairs() {
        let fam = CurveFamily::symbolic(n, s).unwrap();
        let g = (n - 1) * (s - 1) / 2;
        assert_eq!(fam.genus, g);
        assert_eq!(fam.gaps, gaps_by_search(n, s), "({n},{s})");
        assert_eq!(fam.gaps.len() as u32, g);
        assert_eq!(*fam.gaps.last().unwrap(), 2 * g - 1, "({n},{s})");
        assert_eq!(gap_sequence(n, s), fam.gaps);
    }
}

#[test]
fn first_monomials_carry_negative_gap_labels() {
    for (n, s) in coprime_pairs() {
        let fam = CurveFamily::symbolic(n, s).unwrap();
        let g = fam.genus as usize;
        let basis = fam.monomial_basis(g + n as usize);
        let mut labels: Vec<i64> = basis[..g].iter().map(|m| -m.label).collect();
        labels.sort();
        assert_eq!(labels, fam.gaps.iter().map(|&w| w as i64).collect::<Vec<_>>());
        assert_eq!(basis[g].label, 1, "({n},{s})");
        assert_eq!(basis[g].sato_weight, 2 * fam.genus);
        assert!(basis.windows(2).all(|w| w[0].sato_weight < w[1].sato_weight));
        assert!(basis.iter().all(|m| m.j < n));
    }
}

#[test]
fn parameters_match_the_weight_rule() {
    for (n, s) in coprime_pairs() {
        for (k, (j, i)) in CurveFamily::parameter_slots(n, s, ParameterRange::Strict) {
            assert!(j <= n - 2 && i <= s - 2);
            assert_eq!(k, n * s - i * n - j * s);
        }
    }
}

#[test]
fn non_coprime_pairs_are_refused() {
    for (n, s) in [(2, 4), (3, 6), (4, 6), (4, 10), (5, 10)] {
        assert!(CurveFamily::symbolic(n, s).is_err());
    }
}

fn unit_disk() -> impl Strategy<Value = Complex64> {
    (0.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn family_with_lambdas(n: u32, s: u32, values: &[Complex64]) -> CurveFamily {
    let slots = CurveFamily::parameter_slots(n, s, ParameterRange::Strict);
    let lambda: BTreeMap<u32, Complex64> = slots.keys().copied().zip(values.iter().copied()).collect();
    CurveFamily::numeric(n, s, &lambda).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lifted_points_lie_on_the_curve(
        pair in prop::sample::select(vec![(2u32, 5u32), (3, 4), (3, 5), (4, 5), (5, 6)]),
        values in proptest::collection::vec(unit_disk(), 30),
        x in unit_disk(),
    ) {
        let (n, s) = pair;
        let fam = family_with_lambdas(n, s, &values);
        let pts = fam.lift_x_to_points(x).unwrap();
        prop_assert_eq!(pts.len(), n as usize);
        for p in pts {
            let r = fam.eval_f(p.x, p.y).unwrap().norm();
            prop_assert!(r <= 1e-10 * (1.0 + x.norm().powi(s as i32)), "residual {r}");
        }
    }

    #[test]
    fn sum_of_lifted_y_matches_trace(values in proptest::collection::vec(unit_disk(), 30), x in unit_disk()) {
        // For n = 3: f = −y³ + c2 y² + c1 y + c0, so Σy = c2(x) = λ on y² (absent in the strict range).
        let fam = family_with_lambdas(3, 5, &values);
        let sum: Complex64 = fam.lift_x_to_points(x).unwrap().iter().map(|p| p.y).sum();
        prop_assert!(sum.norm() < 1e-9, "{sum}");
    }
}
