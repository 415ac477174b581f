use jacobi_core::expansions::{check_rcond, is_identity_columns};
use jacobi_core::sigma::{build_inversion_system, AbelianSymbol};
use jacobi_core::{CurveFamily, FirstKindBasis, InfinityChart, RationalPoly, SecondKindBasis};
use num_rational::BigRational;
use num_traits::{One, Zero};

const FAMILIES: &[(u32, u32)] = &[
    (2, 3),
    (2, 5),
    (2, 7),
    (2, 9),
    (3, 4),
    (3, 5),
    (3, 7),
    (3, 8),
    (4, 5),
    (4, 7),
    (5, 6),
    (5, 7),
];

fn family(n: u32, s: u32) -> CurveFamily {
    CurveFamily::symbolic(n, s).unwrap()
}

#[test]
fn chart_solves_the_curve_equation() {
    for &(n, s) in FAMILIES {
        let chart = InfinityChart::<BigRational>::expand(&family(n, s), 2 * n as i32 + 4).unwrap();
        assert!(chart.residual().is_zero(), "({n},{s})");
        let h = chart.h_series();
        for k in 0..chart.order() {
            assert!(h.coeff(k).unwrap().is_homogeneous_of(k as u32), "({n},{s}) h[{k}]");
        }
    }
}

#[test]
fn first_kind_integrals_start_at_their_weight() {
    for &(n, s) in FAMILIES {
        let chart = InfinityChart::<BigRational>::expand(&family(n, s), n as i32 + 3).unwrap();
        let first = FirstKindBasis::new(&chart).unwrap();
        for (i, &w) in first.gaps.iter().enumerate() {
            let du = &first.du_series[i];
            assert_eq!(du.valuation(), Some(w as i32 - 1), "({n},{s}) du{w}");
            assert!(du.residue().unwrap().is_zero());
            let u = &first.u_series[i];
            let lead = jacobi_core::algebra::rat(1, w as i64);
            assert_eq!(u.coeff(w as i32).unwrap(), RationalPoly::constant(lead), "({n},{s}) u{w}");
        }
    }
}

#[test]
fn residue_pairing_is_the_identity() {
    for &(n, s) in FAMILIES {
        let chart = InfinityChart::<BigRational>::expand(&family(n, s), n as i32 + 3).unwrap();
        let first = FirstKindBasis::new(&chart).unwrap();
        let second = SecondKindBasis::associated(&chart, &first).unwrap();
        let pairing = check_rcond(&first, &second).unwrap();
        assert!(is_identity_columns(&first.gaps, &pairing), "({n},{s})");
    }
}

#[test]
fn inversion_systems_are_graded_and_consistent() {
    for &(n, s) in FAMILIES {
        let fam = family(n, s);
        let g = fam.genus;
        let sys = build_inversion_system::<BigRational>(&fam).unwrap();
        for (idx, f) in sys.r_functions.iter().enumerate() {
            let l = sys.label(idx);
            let weight = 2 * g + l - 1;
            assert_eq!(f.weight, weight);
            for (m, e) in &f.terms {
                assert!(m.sato_weight <= weight);
                assert!(e.is_homogeneous_of(weight - m.sato_weight), "({n},{s}) R{weight} at {m:?}");
                assert!(e.zeta_indices().is_empty(), "ζ in R{weight}");
            }
            let lead = fam.monomial_with_label(l as i64).unwrap();
            assert_eq!(f.terms[&lead].constant_term(), &RationalPoly::constant(jacobi_core::algebra::rat(l as i64, 1)));

            let rel = &sys.zeta_relations[idx];
            let zetas = rel.zeta_indices();
            if fam.gaps.contains(&l) {
                assert_eq!(zetas, vec![l]);
                assert_eq!(rel.coefficient(&AbelianSymbol::Zeta(l)), -RationalPoly::one());
            } else {
                assert!(zetas.is_empty());
            }
            for &w in &fam.gaps {
                assert_eq!(sys.coefficients[&(l, w)], rel.derivative(w), "({n},{s}) A({l},{w})");
            }
        }
    }
}
