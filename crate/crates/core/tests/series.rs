mod common;

use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

use kummer_pf::algebra::MultiPoly;
use kummer_pf::series::{period_coefficient, series_arith, SeriesOp, TruncatedSeries};

fn poly() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(([0u32..4, 0u32..4, 0u32..4], -9i64..=9, 1i64..=5), 0..8).prop_map(|t| {
        MultiPoly::from_terms(t.into_iter().map(|(e, n, d)| (e, BigRational::new(n.into(), d.into()))))
    })
}

proptest! {
    #![proptest_config(common::config(64))]

    #[test]
    fn truncated_product_matches_full_product(a in poly(), b in poly(), cap in 0u32..8) {
        let sa = TruncatedSeries::from_poly(cap, &a);
        let sb = TruncatedSeries::from_poly(cap, &b);
        let prod = series_arith(&sa, &sb, SeriesOp::Mul).unwrap();
        prop_assert_eq!(prod, TruncatedSeries::from_poly(cap, &(&a * &b)));
    }

    #[test]
    fn sum_matches_polynomials(a in poly(), b in poly(), cap in 0u32..8) {
        let sa = TruncatedSeries::from_poly(cap, &a);
        let sb = TruncatedSeries::from_poly(cap, &b);
        prop_assert_eq!(series_arith(&sa, &sb, SeriesOp::Add).unwrap(), TruncatedSeries::from_poly(cap, &(&a + &b)));
        prop_assert_eq!(sa.sub(&sb).unwrap(), TruncatedSeries::from_poly(cap, &(&a - &b)));
    }

    #[test]
    fn period_coefficients_are_positive(l in 0u32..12, m in 0u32..12, n in 0u32..12) {
        prop_assert!(period_coefficient([l, m, n]).is_positive());
    }
}

#[test]
fn mismatched_caps_are_rejected() {
    let a = TruncatedSeries::one(3);
    let b = TruncatedSeries::one(4);
    assert!(series_arith(&a, &b, SeriesOp::Mul).is_err());
}
