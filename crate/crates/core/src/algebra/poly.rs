//! Sparse multivariate polynomials with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::gcd::int_gcd;
use super::intpoly::IntPoly;
use super::rational::format_rational;
use super::AlgebraError;

/// Names used when printing a polynomial with `N` variables.
pub fn default_var_names<const N: usize>() -> [String; N] {
    if N == 3 {
        let names = ["p", "q", "r"];
        std::array::from_fn(|i| names[i].to_string())
    } else {
        std::array::from_fn(|i| format!("x{i}"))
    }
}

/// A polynomial in `N` variables over the rationals.
///
/// Terms are sorted ascending in lex order on the exponent array and no
/// stored coefficient is zero, so structural equality is mathematical
/// equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly<const N: usize> {
    terms: Vec<([u32; N], BigRational)>,
}

/// Polynomials in (p, q, r).
pub type MultiPoly = Poly<3>;

impl<const N: usize> Default for Poly<N> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<const N: usize> Poly<N> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial([0; N], c)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(c)))
    }

    pub fn monomial(exp: [u32; N], c: BigRational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Self { terms: vec![(exp, c)] }
        }
    }

    /// The variable with index `i`.
    pub fn var(i: usize) -> Self {
        let mut e = [0; N];
        e[i] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = ([u32; N], BigRational)>>(iter: I) -> Self {
        let mut map = std::collections::BTreeMap::new();
        for (e, c) in iter {
            if c.is_zero() {
                continue;
            }
            *map.entry(e).or_insert_with(BigRational::zero) += c;
        }
        Self {
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Shorthand for tests and tables: integer coefficients.
    pub fn from_int_terms(terms: &[([u32; N], i64)]) -> Self {
        Self::from_terms(
            terms
                .iter()
                .map(|(e, c)| (*e, BigRational::from_integer(BigInt::from(*c)))),
        )
    }

    pub fn terms(&self) -> &[([u32; N], BigRational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0 == [0; N])
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == [0; N] && self.terms[0].1.is_one()
    }

    /// Value of a constant polynomial; `None` if it is not constant.
    pub fn constant_value(&self) -> Option<BigRational> {
        match self.terms.as_slice() {
            [] => Some(BigRational::zero()),
            [(e, c)] if *e == [0; N] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn coeff(&self, exp: &[u32; N]) -> BigRational {
        match self.terms.binary_search_by(|t| t.0.cmp(exp)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => BigRational::zero(),
        }
    }

    /// Lex-leading term (largest exponent array).
    pub fn leading(&self) -> Option<&([u32; N], BigRational)> {
        self.terms.last()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(e, _)| e[var]).max().unwrap_or(0)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    /// Multiplies by the monomial `x^shift`.
    pub fn shift(&self, shift: &[u32; N]) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = *e;
                    for i in 0..N {
                        f[i] += shift[i];
                    }
                    (f, c.clone())
                })
                .collect(),
        }
    }

    /// Keeps only the terms selected by `keep`.
    pub fn filter_terms(&self, keep: impl Fn(&[u32; N]) -> bool) -> Self {
        Self {
            terms: self.terms.iter().filter(|(e, _)| keep(e)).cloned().collect(),
        }
    }

    pub fn map_coeffs(&self, f: impl Fn(&[u32; N], &BigRational) -> BigRational) -> Self {
        Self::from_terms(self.terms.iter().map(|(e, c)| (*e, f(e, c))))
    }

    pub fn pow(&self, k: u32) -> Self {
        let (c, p) = self.to_int();
        let ck = num_traits::pow::Pow::pow(&c, k);
        Self::from_int_poly(&p.pow(k), &ck)
    }

    pub fn derivative(&self, var: usize) -> Self {
        Self::from_terms(self.terms.iter().filter(|(e, _)| e[var] > 0).map(|(e, c)| {
            let mut f = *e;
            f[var] -= 1;
            (f, c * BigRational::from_integer(BigInt::from(e[var])))
        }))
    }

    /// Splits into rational content and a primitive integer polynomial with
    /// positive leading coefficient: `self = content * prim`.
    pub fn to_int(&self) -> (BigRational, IntPoly<N>) {
        if self.is_zero() {
            return (BigRational::zero(), IntPoly::zero());
        }
        let mut lcm = BigInt::one();
        for (_, c) in &self.terms {
            lcm = lcm.lcm(c.denom());
        }
        let ints = IntPoly::from_sorted_unchecked(
            self.terms
                .iter()
                .map(|(e, c)| (*e, c.numer() * (&lcm / c.denom())))
                .collect(),
        );
        let (content, prim) = ints.primitive();
        (BigRational::new(content, lcm), prim)
    }

    pub fn from_int_poly(p: &IntPoly<N>, scale: &BigRational) -> Self {
        if scale.is_zero() {
            return Self::zero();
        }
        Self {
            terms: p
                .terms()
                .iter()
                .map(|(e, c)| (*e, BigRational::from_integer(c.clone()) * scale))
                .collect(),
        }
    }

    /// Primitive integer polynomial with positive leading coefficient, as a
    /// `Poly`. Zero maps to zero.
    pub fn primitive_part(&self) -> Self {
        let (_, p) = self.to_int();
        Self::from_int_poly(&p, &BigRational::one())
    }

    /// Exact quotient, or `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        let (ca, a) = self.to_int();
        let (cb, b) = divisor.to_int();
        let q = a.div_exact(&b)?;
        Some(Self::from_int_poly(&q, &(ca / cb)))
    }

    /// Greatest common divisor, normalized to a primitive integer polynomial
    /// with positive lex-leading coefficient.
    pub fn gcd(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.is_zero() && other.is_zero() {
            return Err(AlgebraError::GcdOfZeros);
        }
        let (_, a) = self.to_int();
        let (_, b) = other.to_int();
        Ok(Self::from_int_poly(&int_gcd(&a, &b), &BigRational::one()))
    }

    pub fn eval(&self, point: &[BigRational; N]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for i in 0..N {
                if e[i] > 0 {
                    t *= num_traits::pow::Pow::pow(&point[i], e[i]);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_complex(&self, point: &[Complex64; N]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = Complex64::new(rational_to_f64(c), 0.0);
                for i in 0..N {
                    if e[i] > 0 {
                        t *= point[i].powu(e[i]);
                    }
                }
                t
            })
            .sum()
    }

    /// Sum of absolute term magnitudes at `point`; the scale against which a
    /// value is judged to be numerically zero.
    pub fn magnitude_complex(&self, point: &[Complex64; N]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = rational_to_f64(c).abs();
                for i in 0..N {
                    if e[i] > 0 {
                        t *= point[i].norm().powi(e[i] as i32);
                    }
                }
                t
            })
            .sum()
    }

    /// Substitutes polynomials in `M` variables for the `N` variables.
    pub fn substitute<const M: usize>(&self, images: &[Poly<M>; N]) -> Poly<M> {
        let mut powers: Vec<Vec<Poly<M>>> = Vec::with_capacity(N);
        for i in 0..N {
            let d = self.degree_in(i) as usize;
            let mut v = vec![Poly::<M>::one()];
            for k in 1..=d {
                let next = &v[k - 1] * &images[i];
                v.push(next);
            }
            powers.push(v);
        }
        let mut acc = Poly::<M>::zero();
        for (e, c) in &self.terms {
            let mut t = Poly::<M>::constant(c.clone());
            for i in 0..N {
                if e[i] > 0 {
                    t = &t * &powers[i][e[i] as usize];
                }
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Canonical text: `c * x^a y^b ...` terms in ascending lex order joined
    /// by ` + `, coefficients written `n/d`; the zero polynomial is `0`.
    pub fn to_canonical_string(&self, names: &[String; N]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                out.push_str(" + ");
            }
            out.push_str(&format_rational(c));
            out.push_str(" *");
            for i in 0..N {
                out.push(' ');
                out.push_str(&names[i]);
                out.push('^');
                out.push_str(&e[i].to_string());
            }
        }
        out
    }

    /// Human-oriented rendering (`-3/2*p^2*q + 1`), descending lex order.
    pub fn to_pretty_string(&self, names: &[String; N]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = (0..N)
                .filter(|&i| e[i] > 0)
                .map(|i| {
                    if e[i] == 1 {
                        names[i].clone()
                    } else {
                        format!("{}^{}", names[i], e[i])
                    }
                })
                .collect();
            let coeff = if a.is_integer() {
                a.numer().to_string()
            } else {
                format!("{}/{}", a.numer(), a.denom())
            };
            if mono.is_empty() {
                out.push_str(&coeff);
            } else if a.is_one() {
                out.push_str(&mono.join("*"));
            } else {
                out.push_str(&coeff);
                out.push('*');
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

pub fn rational_to_f64(c: &BigRational) -> f64 {
    match (c.numer().to_f64(), c.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Fall back to a scaled division for very large parts.
            let shift = c.numer().bits().max(c.denom().bits()).saturating_sub(1000);
            let n = (c.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (c.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

impl<const N: usize> fmt::Display for Poly<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string(&default_var_names::<N>()))
    }
}

fn merge<const N: usize>(a: &Poly<N>, b: &Poly<N>, negate: bool) -> Poly<N> {
    let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
    let (mut i, mut j) = (0, 0);
    while i < a.terms.len() && j < b.terms.len() {
        let (ea, ca) = &a.terms[i];
        let (eb, cb) = &b.terms[j];
        match ea.cmp(eb) {
            std::cmp::Ordering::Less => {
                out.push((*ea, ca.clone()));
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push((*eb, if negate { -cb } else { cb.clone() }));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let c = if negate { ca - cb } else { ca + cb };
                if !c.is_zero() {
                    out.push((*ea, c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(a.terms[i..].iter().cloned());
    for (e, c) in &b.terms[j..] {
        out.push((*e, if negate { -c } else { c.clone() }));
    }
    Poly { terms: out }
}

impl<const N: usize> Add for &Poly<N> {
    type Output = Poly<N>;
    fn add(self, rhs: &Poly<N>) -> Poly<N> {
        merge(self, rhs, false)
    }
}

impl<const N: usize> Sub for &Poly<N> {
    type Output = Poly<N>;
    fn sub(self, rhs: &Poly<N>) -> Poly<N> {
        merge(self, rhs, true)
    }
}

impl<const N: usize> Mul for &Poly<N> {
    type Output = Poly<N>;
    fn mul(self, rhs: &Poly<N>) -> Poly<N> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if self.terms.len() == 1 {
            let (e, c) = &self.terms[0];
            return rhs.shift(e).scale(c);
        }
        if rhs.terms.len() == 1 {
            let (e, c) = &rhs.terms[0];
            return self.shift(e).scale(c);
        }
        let (ca, a) = self.to_int();
        let (cb, b) = rhs.to_int();
        Poly::from_int_poly(&a.mul(&b), &(ca * cb))
    }
}

impl<const N: usize> Neg for &Poly<N> {
    type Output = Poly<N>;
    fn neg(self) -> Poly<N> {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<const N: usize> $tr for Poly<N> {
            type Output = Poly<N>;
            fn $m(self, rhs: Poly<N>) -> Poly<N> {
                (&self).$m(&rhs)
            }
        }
        impl<const N: usize> $tr<&Poly<N>> for Poly<N> {
            type Output = Poly<N>;
            fn $m(self, rhs: &Poly<N>) -> Poly<N> {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<const N: usize> Neg for Poly<N> {
    type Output = Poly<N>;
    fn neg(self) -> Poly<N> {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> MultiPoly {
        MultiPoly::var(0)
    }
    fn q() -> MultiPoly {
        MultiPoly::var(1)
    }

    #[test]
    fn cancellation_in_sum() {
        let a = &p() + &q();
        let b = &p() - &q();
        assert_eq!(&a + &b, p().scale(&BigRational::from_integer(2.into())));
    }

    #[test]
    fn zero_absorbs() {
        assert!((&p() * &MultiPoly::zero()).is_zero());
    }

    #[test]
    fn product_matches_schoolbook() {
        // (p+q)(p-q) computed term by term without the integer kernel
        let a = &p() + &q();
        let b = &p() - &q();
        let mut naive = Vec::new();
        for (ea, ca) in a.terms() {
            for (eb, cb) in b.terms() {
                naive.push(([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], ca * cb));
            }
        }
        let expected = MultiPoly::from_int_terms(&[([2, 0, 0], 1), ([0, 2, 0], -1)]);
        assert_eq!(MultiPoly::from_terms(naive), expected);
        assert_eq!(&a * &b, expected);
    }

    #[test]
    fn gcd_of_two_zeros_is_rejected() {
        assert!(MultiPoly::zero().gcd(&MultiPoly::zero()).is_err());
    }

    #[test]
    fn canonical_string_is_lex_ascending() {
        let f = MultiPoly::from_int_terms(&[([0, 1, 0], -3), ([1, 0, 0], 2), ([0, 0, 0], 1)]);
        assert_eq!(
            f.to_string(),
            "1/1 * p^0 q^0 r^0 + -3/1 * p^0 q^1 r^0 + 2/1 * p^1 q^0 r^0"
        );
    }

    #[test]
    fn exact_division_detects_remainder() {
        let f = &(&p() * &p()) - &(&q() * &q());
        assert_eq!(f.div_exact(&(&p() - &q())), Some(&p() + &q()));
        assert_eq!(f.div_exact(&(&p() + &MultiPoly::one())), None);
    }
}
