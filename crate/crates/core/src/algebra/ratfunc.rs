//! Rational functions in canonical reduced form.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::eval::CompiledPoly;
use super::gcd::int_gcd;
use super::intpoly::IntPoly;
use super::poly::{default_var_names, Poly};
use super::AlgebraError;

/// Default relative floor below which a denominator counts as vanishing.
pub const DEFAULT_EVAL_FLOOR: f64 = 1e-12;

/// `num / den` with `gcd(num, den) = 1`, `den` a primitive integer
/// polynomial with positive lex-leading coefficient. Every rational scalar
/// lives in `num`, so equal functions have equal representations.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalFunction<const N: usize> {
    num: Poly<N>,
    den: Poly<N>,
}

/// Rational functions in (p, q, r).
pub type RatFunc = RationalFunction<3>;

impl<const N: usize> Default for RationalFunction<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const N: usize> From<Poly<N>> for RationalFunction<N> {
    fn from(p: Poly<N>) -> Self {
        Self::from_poly(p)
    }
}

impl<const N: usize> RationalFunction<N> {
    pub fn zero() -> Self {
        Self {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_poly(Poly::from_int(c))
    }

    pub fn var(i: usize) -> Self {
        Self::from_poly(Poly::var(i))
    }

    pub fn from_poly(p: Poly<N>) -> Self {
        Self {
            num: p,
            den: Poly::one(),
        }
    }

    /// Reduces `num / den` to canonical form.
    pub fn new(num: Poly<N>, den: Poly<N>) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let (cn, n) = num.to_int();
        let (cd, d) = den.to_int();
        Ok(Self::from_int_parts(&n, &d, &(cn / cd)))
    }

    /// `scale * n / d` for integer polynomials `n` and nonzero `d`.
    pub fn from_int_parts(n: &IntPoly<N>, d: &IntPoly<N>, scale: &BigRational) -> Self {
        assert!(!d.is_zero(), "zero denominator");
        if n.is_zero() || scale.is_zero() {
            return Self::zero();
        }
        let g = int_gcd(n, d);
        let (n, d) = if g.is_one() {
            (n.clone(), d.clone())
        } else {
            (n.div_exact(&g).expect("gcd divides"), d.div_exact(&g).expect("gcd divides"))
        };
        let (cd, d) = d.primitive();
        Self {
            num: Poly::from_int_poly(&n, &(scale / BigRational::from_integer(cd))),
            den: Poly::from_int_poly(&d, &BigRational::one()),
        }
    }

    pub fn numer(&self) -> &Poly<N> {
        &self.num
    }

    pub fn denom(&self) -> &Poly<N> {
        &self.den
    }

    pub fn into_parts(self) -> (Poly<N>, Poly<N>) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_poly(&self) -> Option<&Poly<N>> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self {
            num: self.num.scale(k),
            den: if k.is_zero() { Poly::one() } else { self.den.clone() },
        }
    }

    pub fn inv(&self) -> Result<Self, AlgebraError> {
        if self.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let (c, n) = self.num.to_int();
        let (_, d) = self.den.to_int();
        // Already coprime; only the sign and content move.
        let (cn, n) = n.primitive();
        Ok(Self {
            num: Poly::from_int_poly(&d, &(BigRational::one() / (c * BigRational::from_integer(cn)))),
            den: Poly::from_int_poly(&n, &BigRational::one()),
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, AlgebraError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, k: u32) -> Self {
        Self {
            num: self.num.pow(k),
            den: self.den.pow(k),
        }
    }

    pub fn derivative(&self, var: usize) -> Self {
        if self.den.is_constant() {
            return Self::from_poly(self.num.derivative(var));
        }
        let n = &(&self.num.derivative(var) * &self.den) - &(&self.num * &self.den.derivative(var));
        let d = &self.den * &self.den;
        Self::new(n, d).expect("nonzero denominator")
    }

    pub fn eval(&self, point: &[BigRational; N]) -> Result<BigRational, AlgebraError> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        Ok(self.num.eval(point) / d)
    }

    /// Complex value; a denominator whose modulus falls below
    /// `floor` times its term-magnitude sum is an error.
    pub fn evaluate_complex(&self, point: &[Complex64; N], floor: f64) -> Result<Complex64, AlgebraError> {
        let n = CompiledPoly::compile(&self.num);
        let d = CompiledPoly::compile(&self.den);
        let (dv, dm) = d.eval_with_magnitude(point);
        if dv.norm() <= floor * dm {
            return Err(AlgebraError::NearSingular {
                modulus: dv.norm(),
                scale: dm,
            });
        }
        Ok(n.eval(point) / dv)
    }

    pub fn to_canonical_string(&self, names: &[String; N]) -> String {
        format!(
            "({})/({})",
            self.num.to_canonical_string(names),
            self.den.to_canonical_string(names)
        )
    }

    pub fn to_pretty_string(&self, names: &[String; N]) -> String {
        if self.den.is_one() {
            self.num.to_pretty_string(names)
        } else {
            format!(
                "({})/({})",
                self.num.to_pretty_string(names),
                self.den.to_pretty_string(names)
            )
        }
    }
}

impl<const N: usize> fmt::Display for RationalFunction<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string(&default_var_names::<N>()))
    }
}

impl<const N: usize> Add for &RationalFunction<N> {
    type Output = RationalFunction<N>;
    fn add(self, rhs: &RationalFunction<N>) -> RationalFunction<N> {
        add_impl(self, rhs, false)
    }
}

impl<const N: usize> Sub for &RationalFunction<N> {
    type Output = RationalFunction<N>;
    fn sub(self, rhs: &RationalFunction<N>) -> RationalFunction<N> {
        add_impl(self, rhs, true)
    }
}

fn add_impl<const N: usize>(a: &RationalFunction<N>, b: &RationalFunction<N>, negate: bool) -> RationalFunction<N> {
    let bn = if negate { -&b.num } else { b.num.clone() };
    if a.is_zero() {
        return RationalFunction { num: bn, den: b.den.clone() };
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.den == b.den {
        let n = &a.num + &bn;
        if a.den.is_one() {
            return RationalFunction::from_poly(n);
        }
        return RationalFunction::new(n, a.den.clone()).expect("nonzero denominator");
    }
    if a.den.is_one() {
        return RationalFunction {
            num: &(&a.num * &b.den) + &bn,
            den: b.den.clone(),
        };
    }
    if b.den.is_one() {
        return RationalFunction {
            num: &a.num + &(&bn * &a.den),
            den: a.den.clone(),
        };
    }
    let (_, ad) = a.den.to_int();
    let (_, bd) = b.den.to_int();
    let g = int_gcd(&ad, &bd);
    if g.is_one() {
        // gcd(num, den) = 1 is preserved when the denominators are coprime.
        let n = &(&a.num * &b.den) + &(&bn * &a.den);
        if n.is_zero() {
            return RationalFunction::zero();
        }
        return RationalFunction {
            num: n,
            den: &a.den * &b.den,
        };
    }
    let ad1i = ad.div_exact(&g).expect("gcd divides");
    let bd1i = bd.div_exact(&g).expect("gcd divides");
    let ad1 = Poly::from_int_poly(&ad1i, &BigRational::one());
    let bd1 = Poly::from_int_poly(&bd1i, &BigRational::one());
    let t = &(&a.num * &bd1) + &(&bn * &ad1);
    if t.is_zero() {
        return RationalFunction::zero();
    }
    let (ct, ti) = t.to_int();
    let g2 = int_gcd(&ti, &g);
    let (num, rest) = if g2.is_one() {
        (ti, g)
    } else {
        (ti.div_exact(&g2).expect("gcd divides"), g.div_exact(&g2).expect("gcd divides"))
    };
    let (c, den) = ad1i.mul(&bd1i).mul(&rest).primitive();
    RationalFunction {
        num: Poly::from_int_poly(&num, &(ct / BigRational::from_integer(c))),
        den: Poly::from_int_poly(&den, &BigRational::one()),
    }
}

impl<const N: usize> Mul for &RationalFunction<N> {
    type Output = RationalFunction<N>;
    fn mul(self, rhs: &RationalFunction<N>) -> RationalFunction<N> {
        if self.is_zero() || rhs.is_zero() {
            return RationalFunction::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RationalFunction::from_poly(&self.num * &rhs.num);
        }
        let (ca, a) = self.num.to_int();
        let (_, b) = self.den.to_int();
        let (cc, c) = rhs.num.to_int();
        let (_, d) = rhs.den.to_int();
        let g1 = int_gcd(&a, &d);
        let g2 = int_gcd(&c, &b);
        let div = |x: &IntPoly<N>, g: &IntPoly<N>| {
            if g.is_one() {
                x.clone()
            } else {
                x.div_exact(g).expect("gcd divides")
            }
        };
        let n = div(&a, &g1).mul(&div(&c, &g2));
        let (k, den) = div(&b, &g2).mul(&div(&d, &g1)).primitive();
        RationalFunction {
            num: Poly::from_int_poly(&n, &(ca * cc / BigRational::from_integer(k))),
            den: Poly::from_int_poly(&den, &BigRational::one()),
        }
    }
}

impl<const N: usize> Neg for &RationalFunction<N> {
    type Output = RationalFunction<N>;
    fn neg(self) -> RationalFunction<N> {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl<const N: usize> Neg for RationalFunction<N> {
    type Output = RationalFunction<N>;
    fn neg(self) -> RationalFunction<N> {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<const N: usize> $tr for RationalFunction<N> {
            type Output = RationalFunction<N>;
            fn $m(self, rhs: RationalFunction<N>) -> RationalFunction<N> {
                (&self).$m(&rhs)
            }
        }
        impl<const N: usize> $tr<&RationalFunction<N>> for RationalFunction<N> {
            type Output = RationalFunction<N>;
            fn $m(self, rhs: &RationalFunction<N>) -> RationalFunction<N> {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<const N: usize> Zero for RationalFunction<N> {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn p() -> RatFunc {
        RatFunc::var(0)
    }
    fn q() -> RatFunc {
        RatFunc::var(1)
    }
    fn r() -> RatFunc {
        RatFunc::var(2)
    }

    #[test]
    fn common_denominator() {
        let s = &p().inv().unwrap() + &q().inv().unwrap();
        let expected = RatFunc::new((&p() + &q()).numer().clone(), (&p() * &q()).numer().clone()).unwrap();
        assert_eq!(s, expected);
    }

    #[test]
    fn self_division_is_one() {
        let x = (&(&p() * &p()) - &q()).checked_div(&(&r() + &RatFunc::one())).unwrap();
        assert!(x.checked_div(&x).unwrap().is_one());
    }

    #[test]
    fn division_by_zero_rejected() {
        assert!(p().checked_div(&RatFunc::zero()).is_err());
    }

    #[test]
    fn denominator_sign_and_content_move_to_numerator() {
        let f = RatFunc::new(Poly::var(0), Poly::var(1).scale(&int(-6))).unwrap();
        assert!(!f.denom().is_one());
        assert_eq!(f.denom(), &Poly::var(1));
        assert_eq!(f.numer(), &Poly::var(0).scale(&crate::algebra::rational::rat(-1, 6)));
    }

    #[test]
    fn reciprocal_rule() {
        let d = q().inv().unwrap().derivative(1);
        assert_eq!(d, (-&(&q() * &q())).inv().unwrap());
    }

    #[test]
    fn power_rule() {
        let f = &(&p() * &p()) * &q();
        assert_eq!(f.derivative(0), (&p() * &q()).scale(&int(2)));
    }

    #[test]
    fn complex_evaluation() {
        let f = p().checked_div(&(&q() + &RatFunc::one())).unwrap();
        let z = [Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(5.0, 0.0)];
        assert!((f.evaluate_complex(&z, DEFAULT_EVAL_FLOOR).unwrap() - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        let g = RatFunc::one().checked_div(&(&p() - &q())).unwrap();
        let w = [Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(g.evaluate_complex(&w, DEFAULT_EVAL_FLOOR).is_err());
    }

    #[test]
    fn subtraction_to_zero() {
        let f = (&p() + &q()).checked_div(&(&p() * &r())).unwrap();
        assert!((&f - &f).is_zero());
    }
}
