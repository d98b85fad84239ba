//! Sparse multivariate polynomials over the integers.
//!
//! This is the workhorse behind [`Poly`](super::Poly): products, exact
//! division and gcd all run on integer coefficients after the rational
//! content has been pulled out.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Terms are kept sorted ascending in lex order on the exponent array, with
/// no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPoly<const N: usize> {
    terms: Vec<([u32; N], BigInt)>,
}

impl<const N: usize> IntPoly<N> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Self { terms: vec![([0; N], c)] }
        }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    /// Builds a polynomial from arbitrary (possibly repeated, unsorted) terms.
    pub fn from_terms<I: IntoIterator<Item = ([u32; N], BigInt)>>(iter: I) -> Self {
        let mut map: BTreeMap<[u32; N], BigInt> = BTreeMap::new();
        for (e, c) in iter {
            if c.is_zero() {
                continue;
            }
            *map.entry(e).or_insert_with(BigInt::zero) += c;
        }
        Self::from_sorted_map(map)
    }

    fn from_sorted_map(map: BTreeMap<[u32; N], BigInt>) -> Self {
        Self {
            terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Caller guarantees sorted, unique, nonzero terms.
    pub(crate) fn from_sorted_unchecked(terms: Vec<([u32; N], BigInt)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Self { terms }
    }

    pub fn terms(&self) -> &[([u32; N], BigInt)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<([u32; N], BigInt)> {
        self.terms
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

    /// Lex-leading term.
    pub fn leading(&self) -> Option<&([u32; N], BigInt)> {
        self.terms.last()
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.terms.last().map(|t| t.1.clone()).unwrap_or_else(BigInt::zero)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(e, _)| e[var]).max().unwrap_or(0)
    }

    pub fn degrees(&self) -> [u32; N] {
        let mut d = [0; N];
        for (e, _) in &self.terms {
            for i in 0..N {
                d[i] = d[i].max(e[i]);
            }
        }
        d
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn max_norm(&self) -> BigInt {
        self.terms
            .iter()
            .map(|(_, c)| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Gcd of all coefficients, nonnegative.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect(),
        }
    }

    /// Divides every coefficient by `k`; caller guarantees exactness.
    pub fn div_exact_scalar(&self, k: &BigInt) -> Self {
        if k.is_one() {
            return self.clone();
        }
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c / k)).collect(),
        }
    }

    /// Primitive part with positive leading coefficient, and the signed
    /// content that was removed.
    pub fn primitive(&self) -> (BigInt, Self) {
        if self.is_zero() {
            return (BigInt::zero(), Self::zero());
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        (c.clone(), self.div_exact_scalar(&c))
    }

    pub fn shift(&self, mono: &[u32; N]) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut f = *e;
                    for i in 0..N {
                        f[i] += mono[i];
                    }
                    (f, c.clone())
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.merge(other, true)
    }

    fn merge(&self, other: &Self, negate: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -&t.1 } else { t.1.clone() };
            out.push((t.0, c));
        }
        Self { terms: out }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.terms.len() == 1 {
            let (e, c) = &self.terms[0];
            return other.shift(e).scale(c);
        }
        if other.terms.len() == 1 {
            let (e, c) = &other.terms[0];
            return self.shift(e).scale(c);
        }
        let mut acc: HashMap<[u32; N], BigInt> =
            HashMap::with_capacity(self.terms.len().max(other.terms.len()) * 4);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut e = *ea;
                for i in 0..N {
                    e[i] += eb[i];
                }
                let prod = ca * cb;
                match acc.get_mut(&e) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(e, prod);
                    }
                }
            }
        }
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by_key(|t| t.0);
        Self { terms }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Exact division; `None` when `divisor` does not divide `self` over the
    /// integers.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if divisor.terms.len() == 1 {
            let (de, dc) = &divisor.terms[0];
            let mut out = Vec::with_capacity(self.terms.len());
            for (e, c) in &self.terms {
                let mut f = *e;
                for i in 0..N {
                    if f[i] < de[i] {
                        return None;
                    }
                    f[i] -= de[i];
                }
                let (q, r) = c.div_rem(dc);
                if !r.is_zero() {
                    return None;
                }
                out.push((f, q));
            }
            return Some(Self { terms: out });
        }
        let sd = self.degrees();
        let dd = divisor.degrees();
        let mut bound = [0u32; N];
        for i in 0..N {
            if sd[i] < dd[i] {
                return None;
            }
            bound[i] = sd[i] - dd[i];
        }
        if self.total_degree() < divisor.total_degree() {
            return None;
        }
        let (lt_e, lt_c) = divisor.terms.last().unwrap().clone();
        let mut rem: BTreeMap<[u32; N], BigInt> = self.terms.iter().cloned().collect();
        let mut quot: Vec<([u32; N], BigInt)> = Vec::new();
        while let Some((re, rc)) = rem.pop_last() {
            let mut qe = re;
            for i in 0..N {
                if re[i] < lt_e[i] {
                    return None;
                }
                qe[i] = re[i] - lt_e[i];
                if qe[i] > bound[i] {
                    return None;
                }
            }
            let (qc, r) = rc.div_rem(&lt_c);
            if !r.is_zero() {
                return None;
            }
            // subtract qc * x^qe * divisor (excluding its leading term)
            for (de, dc) in divisor.terms.iter().rev().skip(1) {
                let mut e = *de;
                for i in 0..N {
                    e[i] += qe[i];
                }
                let delta = &qc * dc;
                match rem.get_mut(&e) {
                    Some(v) => {
                        *v -= delta;
                        if v.is_zero() {
                            rem.remove(&e);
                        }
                    }
                    None => {
                        rem.insert(e, -delta);
                    }
                }
            }
            quot.push((qe, qc));
        }
        quot.reverse();
        Some(Self { terms: quot })
    }

    /// Substitutes the integer `x` for variable `var`.
    pub fn eval_var(&self, var: usize, x: &BigInt) -> Self {
        let maxd = self.degree_in(var) as usize;
        let mut powers = Vec::with_capacity(maxd + 1);
        powers.push(BigInt::one());
        for i in 1..=maxd {
            let next = &powers[i - 1] * x;
            powers.push(next);
        }
        let mut acc: BTreeMap<[u32; N], BigInt> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut f = *e;
            let d = f[var] as usize;
            f[var] = 0;
            *acc.entry(f).or_insert_with(BigInt::zero) += c * &powers[d];
        }
        Self::from_sorted_map(acc)
    }

    pub fn derivative(&self, var: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] > 0)
            .map(|(e, c)| {
                let mut f = *e;
                f[var] -= 1;
                (f, c * BigInt::from(e[var]))
            });
        Self::from_terms(terms)
    }

    /// Splits by powers of `var`: index `k` holds the coefficient of `var^k`
    /// (with `var` removed from the exponents).
    pub fn coefficients_in(&self, var: usize) -> Vec<Self> {
        let d = self.degree_in(var) as usize;
        let mut buckets: Vec<Vec<([u32; N], BigInt)>> = vec![Vec::new(); d + 1];
        for (e, c) in &self.terms {
            let mut f = *e;
            let k = f[var] as usize;
            f[var] = 0;
            buckets[k].push((f, c.clone()));
        }
        buckets.into_iter().map(Self::from_terms).collect()
    }

    pub fn from_coefficients_in(var: usize, coeffs: &[Self]) -> Self {
        let mut terms = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            for (e, v) in &c.terms {
                let mut f = *e;
                f[var] += k as u32;
                terms.push((f, v.clone()));
            }
        }
        Self::from_terms(terms)
    }
}
