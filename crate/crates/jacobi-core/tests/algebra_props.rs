use jacobi_core::algebra::{rat, LambdaMonomial, LaurentSeries, WeightedPoly};
use jacobi_core::RationalPoly;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = BigRational> {
    (-6i64..=6, 1i64..=5).prop_map(|(p, q)| rat(p, q))
}

fn nonzero_rational() -> impl Strategy<Value = BigRational> {
    (prop_oneof![-6i64..=-1, 1i64..=6], 1i64..=5).prop_map(|(p, q)| rat(p, q))
}

fn lambda_monomial() -> impl Strategy<Value = LambdaMonomial> {
    proptest::collection::vec((1u32..=5, 0u32..=2), 0..3).prop_map(LambdaMonomial::from_pairs)
}

fn poly() -> impl Strategy<Value = RationalPoly> {
    proptest::collection::vec((lambda_monomial(), rational()), 0..5).prop_map(WeightedPoly::from_terms)
}

/// Homogeneous polynomial of weight `w`: λ_k^e λ_1^(w − ke) terms.
fn homogeneous(w: u32) -> impl Strategy<Value = RationalPoly> {
    proptest::collection::vec((1u32..=w.max(1), rational()), 0..4).prop_map(move |terms| {
        WeightedPoly::from_terms(terms.into_iter().map(|(k, c)| {
            let e = w / k;
            let rest = w - k * e;
            (LambdaMonomial::from_pairs([(k, e), (1, rest)]), c)
        }))
    })
}

/// Series of rational numbers with a nonzero leading coefficient.
fn unit_series(lowest: std::ops::Range<i32>) -> impl Strategy<Value = LaurentSeries<BigRational>> {
    (lowest, nonzero_rational(), proptest::collection::vec(rational(), 8)).prop_map(|(lo, lead, rest)| {
        let mut c = vec![lead];
        c.extend(rest);
        LaurentSeries::new(lo, c, lo + 9)
    })
}

/// Series whose ξ^k coefficient is homogeneous of weight k − lowest.
fn graded_series(lo: i32) -> impl Strategy<Value = LaurentSeries<RationalPoly>> {
    (nonzero_rational(), homogeneous(1), homogeneous(2), homogeneous(3), homogeneous(4)).prop_map(move |(c, a, b, d, e)| {
        LaurentSeries::new(lo, vec![WeightedPoly::constant(c), a, b, d, e], lo + 5)
    })
}

fn one_series(order: i32) -> LaurentSeries<BigRational> {
    LaurentSeries::monomial(BigRational::one(), 0, order)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poly_ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &WeightedPoly::one(), a.clone());
    }

    #[test]
    fn poly_weights_add(w1 in 1u32..6, w2 in 1u32..6) {
        let a = WeightedPoly::term(LambdaMonomial::from_pairs([(w1, 1)]), rat(2, 3));
        let b = WeightedPoly::term(LambdaMonomial::from_pairs([(w2, 2)]), rat(-1, 5));
        let p = &a * &b;
        prop_assert_eq!(p.weight(), Some(w1 + 2 * w2));
        prop_assert!(p.is_homogeneous_of(w1 + 2 * w2));
    }

    #[test]
    fn homogeneous_operations_keep_grading(a in homogeneous(3), b in homogeneous(3), c in homogeneous(2)) {
        prop_assert!((&a + &b).is_homogeneous_of(3));
        prop_assert!((&a - &b).is_homogeneous_of(3));
        prop_assert!((&a * &c).is_homogeneous_of(5));
    }

    #[test]
    fn inverse_times_series_is_one(a in unit_series(-3..4)) {
        let inv = a.invert().unwrap();
        let prod = a.mul(&inv);
        prop_assert_eq!(prod.truncation_order(), a.relative_precision());
        prop_assert_eq!(prod, one_series(a.relative_precision()));
    }

    #[test]
    fn root_to_the_n_is_identity(n in 1u32..=5, k in -3i32..=2, rest in proptest::collection::vec(rational(), 7)) {
        let mut c = vec![BigRational::one()];
        c.extend(rest);
        let lo = k * n as i32;
        let a = LaurentSeries::new(lo, c, lo + 8);
        let root = a.nth_root(n).unwrap();
        prop_assert_eq!(root.coeff(k).unwrap(), BigRational::one());
        prop_assert_eq!(root.pow(n), a);
    }

    #[test]
    fn derivative_undoes_integration(lo in -4i32..3, coeffs in proptest::collection::vec(rational(), 8)) {
        let mut a = LaurentSeries::new(lo, coeffs, lo + 8);
        if lo <= -1 && -1 < lo + 8 {
            let mut c: Vec<BigRational> = (lo..lo + 8).map(|e| a.coeff(e).unwrap()).collect();
            c[(-1 - lo) as usize] = BigRational::zero();
            a = LaurentSeries::new(lo, c, lo + 8);
        }
        let back = a.integrate().unwrap().derivative();
        prop_assert_eq!(back.truncation_order(), a.truncation_order());
        for e in lo..lo + 8 {
            prop_assert_eq!(back.coeff(e).unwrap(), a.coeff(e).unwrap());
        }
    }

    #[test]
    fn nonzero_residue_blocks_integration(r in nonzero_rational()) {
        let a = LaurentSeries::new(-2, vec![BigRational::one(), r], 3);
        prop_assert!(a.integrate().is_err());
    }

    #[test]
    fn series_product_commutes_and_distributes(a in unit_series(-2..2), b in unit_series(-2..2), c in unit_series(-2..2)) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        let lhs = a.mul(&b.add(&c));
        let rhs = a.mul(&b).add(&a.mul(&c));
        let order = lhs.truncation_order().min(rhs.truncation_order());
        prop_assert_eq!(lhs.truncate(order), rhs.truncate(order));
    }

    #[test]
    fn grading_survives_products_and_inverses(a in graded_series(-2), b in graded_series(1)) {
        let check = |s: &LaurentSeries<RationalPoly>, lo: i32| -> bool {
            (lo..s.truncation_order()).all(|e| s.coeff(e).unwrap().is_homogeneous_of((e - lo) as u32))
        };
        prop_assert!(check(&a.mul(&b), -1));
        let inv = a.invert().unwrap();
        prop_assert!(check(&inv, 2));
        prop_assert!(check(&b.integrate().unwrap(), 2));
    }

    #[test]
    fn residue_is_linear(a in unit_series(-3..0), b in unit_series(-3..0), q in rational()) {
        let lhs = a.add(&b.scale(&q)).residue().unwrap();
        let rhs = a.residue().unwrap() + b.residue().unwrap() * q;
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn polynomial_inverse_with_lambda_is_geometric() {
    // 1/(1 + λ2 ξ²) = Σ (−λ2)^k ξ^{2k}
    let lam = WeightedPoly::<BigRational>::lambda(2);
    let a = LaurentSeries::new(0, vec![WeightedPoly::one(), WeightedPoly::zero(), lam.clone()], 9);
    let inv = a.invert().unwrap();
    let mut power = WeightedPoly::one();
    for k in 0..5 {
        assert_eq!(inv.coeff(2 * k).unwrap(), power);
        assert!(inv.coeff(2 * k + 1).map_or(true, |c| c.is_zero()));
        power = &power * &(-lam.clone());
    }
}
