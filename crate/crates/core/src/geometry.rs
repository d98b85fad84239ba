//! Parameter maps and discriminant geometry of the family.

use std::collections::HashMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{parse_with, rational_to_f64, MultiPoly, Poly, RationalFunction};
use crate::pfaffian::FactorName;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("d_λ = (λ2 − 1) λ2 (λ1 − λ3) vanishes")]
    DegenerateLambda,
}

fn names<const N: usize>(v: [&str; N]) -> [String; N] {
    v.map(String::from)
}

fn parse_in<const N: usize>(s: &str, vars: [&str; N]) -> RationalFunction<N> {
    parse_with(s, &names(vars), &HashMap::new()).expect("built-in expression parses")
}

const LAMBDA_VARS: [&str; 3] = ["l1", "l2", "l3"];

/// `d_λ = (λ2 − 1) λ2 (λ1 − λ3)`.
pub fn lambda_discriminant() -> RationalFunction<3> {
    parse_in("(l2 - 1) l2 (l1 - l3)", LAMBDA_VARS)
}

/// `(p, q, r)` as rational functions of `(λ1, λ2, λ3)`.
pub fn lambda_map() -> [RationalFunction<3>; 3] {
    let d = "((l2 - 1) l2 (l1 - l3))";
    let p = format!(
        "-(l1 l2 - l1^2 l2 - l1 l3 + 2 l1^2 l3 - 3 l1 l2 l3 + 2 l1^2 l2 l3 + l2^2 l3 - l1 l2^2 l3 \
         + 2 l1 l3^2 - 3 l1^2 l3^2 - l2 l3^2 + 2 l1 l2 l3^2) / {d}"
    );
    let q = format!(
        "(l1 - 1) l1 (l1 - l2) (l2 - l3) (l3 - 1) l3 (l1 - l2 + l1 l2 + l3 - 3 l1 l3 + l2 l3) / {d}^2"
    );
    let r = format!("(l1 - 1)^2 l1^2 (l1 - l2)^2 (l2 - l3)^2 (l3 - 1)^2 l3^2 / {d}^3");
    [p, q, r].map(|s| parse_in(&s, LAMBDA_VARS))
}

/// Exact `(p, q, r)` for a rational `λ`.
pub fn lambda_to_pqr(lambda: &[BigRational; 3]) -> Result<[BigRational; 3], GeometryError> {
    if lambda_discriminant().eval(lambda).map_or(true, |d| d.is_zero()) {
        return Err(GeometryError::DegenerateLambda);
    }
    let m = lambda_map();
    Ok([0, 1, 2].map(|i| m[i].eval(lambda).expect("denominator is a power of d_λ")))
}

const T_VARS: [&str; 4] = ["p", "q", "r", "b"];

/// `(t4, t6, t10, t12)` as polynomials in `(p, q, r, b)`.
pub fn t_map() -> [Poly<4>; 4] {
    [
        "-b^2/3 + b p/3 - p^2/3 + q",
        "-(b - 2 p)(4 b^2 + 2 b p - 2 p^2 + 9 q)/54 - r",
        "b^2 r / 4",
        "b^2 (3 q^2 + 4 b r - 8 p r) / 48",
    ]
    .map(|s| parse_in(s, T_VARS).as_poly().expect("polynomial").clone())
}

pub fn pqrb_to_t(w: &[BigRational; 4]) -> [BigRational; 4] {
    t_map().map(|t| t.eval(w))
}

/// Weights of `(p, q, r, b)` and of `(t4, t6, t10, t12)`.
pub const PQRB_WEIGHTS: [u32; 4] = [2, 4, 6, 2];
pub const T_WEIGHTS: [u32; 4] = [4, 6, 10, 12];

/// Exact check of `t_k(λ²p, λ⁴q, λ⁶r, λ²b) = λ^{w_k} t_k(p, q, r, b)` with a
/// fifth variable standing for `λ`.
pub fn t_map_homogeneity() -> bool {
    let lam = Poly::<5>::var(4);
    let images: [Poly<5>; 4] = [0, 1, 2, 3].map(|i| &Poly::<5>::var(i) * &lam.pow(PQRB_WEIGHTS[i]));
    let embed = [0, 1, 2, 3].map(Poly::<5>::var);
    t_map().iter().zip(T_WEIGHTS).all(|(t, w)| t.substitute(&images) == &t.substitute(&embed) * &lam.pow(w))
}

/// Discriminant of the monic cubic `x³ + a x² + b x + c`.
pub fn monic_cubic_discriminant<const N: usize>(a: &Poly<N>, b: &Poly<N>, c: &Poly<N>) -> Poly<N> {
    let k = |n: i64| Poly::<N>::from_int(n);
    let ab = a * b;
    &(&(&(&(&ab * &ab) - &(&k(4) * &b.pow(3))) - &(&(&k(4) * &a.pow(3)) * c)) - &(&k(27) * &c.pow(2)))
        + &(&(&k(18) * &ab) * c)
}

/// `R3(t)` and `R2(t) = R3(t) − t²` in the variables `(p, q, r, t)`.
pub fn r3_r2() -> (Poly<4>, Poly<4>) {
    let v = ["p", "q", "r", "t"];
    let r3 = parse_in("t^3 + p t^2 + q t + r", v).as_poly().unwrap().clone();
    let r2 = parse_in("t^3 + (p - 1) t^2 + q t + r", v).as_poly().unwrap().clone();
    (r3, r2)
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscriminantReport {
    /// `d2 = −disc(R2)`.
    pub d2_is_negated_discriminant: bool,
    /// `d3 = −disc(R3)`.
    pub d3_is_negated_discriminant: bool,
    /// `R3 − t² = R2`.
    pub shift_identity: bool,
    /// `disc_x[x (x + t²)(x + R3)] = t⁴ R3² R2²`.
    pub fibration_discriminant: bool,
}

impl DiscriminantReport {
    pub fn holds(&self) -> bool {
        self.d2_is_negated_discriminant
            && self.d3_is_negated_discriminant
            && self.shift_identity
            && self.fibration_discriminant
    }
}

pub fn discriminant_factorization() -> DiscriminantReport {
    let (r3, r2) = r3_r2();
    let t = Poly::<4>::var(3);
    let shift_identity = &r3 - &t.pow(2) == r2;

    // Cubic coefficients of x (x + t²)(x + R3): a = t² + R3, b = t² R3, c = 0.
    let a = &t.pow(2) + &r3;
    let b = &t.pow(2) * &r3;
    let disc_x = monic_cubic_discriminant(&a, &b, &Poly::zero());
    let fibration_discriminant = disc_x == &(&t.pow(4) * &r3.pow(2)) * &r2.pow(2);

    // Coefficients in t live in Q[p, q, r].
    let pqr = |s: &str| s.parse::<MultiPoly>().unwrap();
    let disc3 = monic_cubic_discriminant(&pqr("p"), &pqr("q"), &pqr("r"));
    let disc2 = monic_cubic_discriminant(&pqr("p - 1"), &pqr("q"), &pqr("r"));
    DiscriminantReport {
        d2_is_negated_discriminant: -disc2 == FactorName::D2.polynomial(),
        d3_is_negated_discriminant: -disc3 == FactorName::D3.polynomial(),
        shift_identity,
        fibration_discriminant,
    }
}

/// The five divisors of the singular locus.
pub const DIVISORS: [FactorName; 5] = [FactorName::P, FactorName::Q, FactorName::R, FactorName::D2, FactorName::D3];

#[derive(Clone, Debug, Serialize)]
pub struct DivisorMembership {
    pub divisor: FactorName,
    pub on_divisor: bool,
    /// `|f(z)| / Σ|c_t z^t|`; zero in exact mode when on the divisor.
    pub relative_value: f64,
}

/// Exact membership of a rational point.
pub fn singular_divisor_membership(point: &[BigRational; 3]) -> Vec<DivisorMembership> {
    DIVISORS
        .iter()
        .map(|&d| {
            let f = d.polynomial();
            let v = f.eval(point);
            let mag: f64 = f
                .terms()
                .iter()
                .map(|(e, c)| {
                    let mono: BigRational = (0..3).map(|i| point[i].pow(e[i] as i32)).product();
                    rational_to_f64(&(c * mono)).abs()
                })
                .sum();
            DivisorMembership {
                divisor: d,
                on_divisor: v.is_zero(),
                relative_value: if mag > 0.0 { rational_to_f64(&v).abs() / mag } else { 0.0 },
            }
        })
        .collect()
}

/// Scale-free distance of `z` to a divisor: `|z_k| / ‖z‖∞` for the
/// coordinate hyperplanes and `|f(z)| / Σ|c_t z^t|` otherwise.
pub fn relative_divisor_value(divisor: FactorName, z: &[Complex64; 3]) -> f64 {
    let coord = match divisor {
        FactorName::P => Some(0),
        FactorName::Q => Some(1),
        FactorName::R => Some(2),
        _ => None,
    };
    if let Some(k) = coord {
        let inf = z.iter().map(|c| c.norm()).fold(0.0, f64::max);
        return if inf > 0.0 { z[k].norm() / inf } else { 0.0 };
    }
    let f = divisor.polynomial();
    let mag = f.magnitude_complex(z);
    if mag > 0.0 {
        f.eval_complex(z).norm() / mag
    } else {
        0.0
    }
}

/// Floating membership: on a divisor when the relative value is at most
/// `floor`.
pub fn singular_divisor_membership_complex(point: &[Complex64; 3], floor: f64) -> Vec<DivisorMembership> {
    DIVISORS
        .iter()
        .map(|&d| {
            let rel = relative_divisor_value(d, point);
            DivisorMembership {
                divisor: d,
                on_divisor: rel <= floor,
                relative_value: rel,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    #[test]
    fn t_map_at_origin_chart() {
        let t = pqrb_to_t(&[int(0), int(0), int(0), int(1)]);
        assert_eq!(t, [rat(-1, 3), rat(-2, 27), int(0), int(0)]);
    }

    #[test]
    fn t10_vanishes_with_r() {
        let t = pqrb_to_t(&[rat(3, 7), int(-2), int(0), rat(5, 3)]);
        assert!(t[2].is_zero());
    }

    #[test]
    fn homogeneity() {
        assert!(t_map_homogeneity());
    }

    #[test]
    fn discriminants() {
        let rep = discriminant_factorization();
        assert!(rep.holds(), "{rep:?}");
    }

    #[test]
    fn fibration_discriminant_at_origin() {
        // p = q = r = 0: t⁴·t⁶·(t³ − t²)² = t¹⁴ (t − 1)².
        let (r3, r2) = r3_r2();
        let zero = [0, 1, 2].map(|_| Poly::<1>::zero());
        let t = Poly::<1>::var(0);
        let sub = [zero[0].clone(), zero[1].clone(), zero[2].clone(), t.clone()];
        let lhs = &(&t.pow(4) * &r3.substitute(&sub).pow(2)) * &r2.substitute(&sub).pow(2);
        let rhs = &t.pow(14) * &(&t - &Poly::one()).pow(2);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn lambda_factor_vanishing() {
        let pqr = lambda_to_pqr(&[rat(2, 3), rat(2, 3), rat(5, 7)]).unwrap();
        assert!(pqr[1].is_zero() && pqr[2].is_zero());
        let pqr = lambda_to_pqr(&[rat(2, 3), rat(4, 5), int(1)]).unwrap();
        assert!(pqr[1].is_zero() && pqr[2].is_zero());
        assert_eq!(lambda_to_pqr(&[int(3), int(1), int(2)]), Err(GeometryError::DegenerateLambda));
        assert_eq!(lambda_to_pqr(&[int(3), int(2), int(3)]), Err(GeometryError::DegenerateLambda));
    }

    #[test]
    fn r_times_d_cubed_is_a_square() {
        let [_, _, r] = lambda_map();
        let d = lambda_discriminant();
        let prod = &r * &d.pow(3);
        let root = parse_in("(l1 - 1) l1 (l1 - l2) (l2 - l3) (l3 - 1) l3", LAMBDA_VARS);
        assert_eq!(prod, root.pow(2));
    }

    #[test]
    fn divisor_membership_examples() {
        let on = |pt: [BigRational; 3]| -> Vec<&'static str> {
            singular_divisor_membership(&pt)
                .into_iter()
                .filter(|m| m.on_divisor)
                .map(|m| m.divisor.as_str())
                .collect()
        };
        assert_eq!(on([int(0), int(1), int(1)]), vec!["p"]);
        assert_eq!(on([int(1), int(0), int(0)]), vec!["q", "r", "d2", "d3"]);
        assert!(on([rat(3, 7), rat(-5, 11), rat(2, 13)]).is_empty());
        let d = |f: FactorName, pt: [i64; 3]| f.polynomial().eval(&pt.map(int));
        assert_eq!(d(FactorName::D2, [0, 1, 1]), int(44));
        assert_eq!(d(FactorName::D3, [0, 1, 1]), int(31));
    }

    #[test]
    fn complex_membership_uses_relative_floor() {
        let z = [Complex64::new(1e-14, 0.0), Complex64::new(0.5, 0.1), Complex64::new(0.2, -0.3)];
        let m = singular_divisor_membership_complex(&z, 1e-10);
        assert!(m[0].on_divisor);
        assert!(m[1..].iter().all(|x| !x.on_divisor));
    }
}
