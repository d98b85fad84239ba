mod common;

use num_rational::BigRational;
use proptest::prelude::*;

use kummer_pf::algebra::rational::{format_rational, parse_rational};
use kummer_pf::algebra::{default_var_names, parse_poly, parse_ratfunc, MultiPoly, RatFunc};

fn coeff() -> impl Strategy<Value = BigRational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| BigRational::new(n.into(), d.into()))
}

fn poly(max_terms: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec(([0u32..3, 0u32..3, 0u32..3], coeff()), 0..=max_terms).prop_map(MultiPoly::from_terms)
}

fn nonzero_poly(max_terms: usize) -> impl Strategy<Value = MultiPoly> {
    poly(max_terms).prop_filter("nonzero", |p| !p.is_zero())
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly(3), nonzero_poly(2)).prop_map(|(n, d)| RatFunc::new(n, d).expect("nonzero denominator"))
}

proptest! {
    #![proptest_config(common::config(64))]

    #[test]
    fn ring_axioms(a in poly(4), b in poly(4), c in poly(4)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &MultiPoly::one(), a.clone());
    }

    #[test]
    fn quotient_times_divisor(f in poly(4), g in nonzero_poly(3)) {
        let f = RatFunc::from_poly(f);
        let g = RatFunc::from_poly(g);
        let q = f.checked_div(&g).unwrap();
        prop_assert_eq!(&q * &g, f);
    }

    #[test]
    fn gcd_divides_both(a in nonzero_poly(3), b in nonzero_poly(3), h in nonzero_poly(2)) {
        let f = &a * &h;
        let g = &b * &h;
        let d = f.gcd(&g).unwrap();
        prop_assert!(f.div_exact(&d).is_some());
        prop_assert!(g.div_exact(&d).is_some());
        prop_assert!(d.div_exact(&h).is_some(), "common factor lost");
    }

    #[test]
    fn product_rule(f in ratfunc(), g in ratfunc(), var in 0usize..3) {
        let lhs = (&f * &g).derivative(var);
        let rhs = &(&f.derivative(var) * &g) + &(&f * &g.derivative(var));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn ratfunc_field_axioms(f in ratfunc(), g in ratfunc(), h in ratfunc()) {
        prop_assert_eq!(&f * &(&g + &h), &(&f * &g) + &(&f * &h));
        if !g.is_zero() {
            prop_assert_eq!(&f.checked_div(&g).unwrap() * &g, f.clone());
        }
    }

    #[test]
    fn serialization_round_trips(p in poly(5), f in ratfunc(), c in coeff()) {
        let names = default_var_names::<3>();
        prop_assert_eq!(parse_poly::<3>(&p.to_canonical_string(&names)).unwrap(), p);
        prop_assert_eq!(parse_ratfunc::<3>(&f.to_canonical_string(&names)).unwrap(), f.clone());
        prop_assert_eq!(parse_ratfunc::<3>(&f.to_pretty_string(&names)).unwrap(), f);
        prop_assert_eq!(parse_rational(&format_rational(&c)).unwrap(), c);
    }
}
