//! Exact truncated power series in (p, q, r) and the period coefficients.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::rational::format_rational;
use crate::algebra::{rational_to_f64, MultiPoly};

pub type Index = [u32; 3];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("degree caps differ: {0} vs {1}")]
    CapMismatch(u32, u32),
    #[error("truncation tail {tail:e} exceeds tolerance {tol:e}")]
    TailTooLarge { tail: f64, tol: f64 },
}

/// Terms of total degree at most `cap`; absent keys are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    cap: u32,
    terms: BTreeMap<Index, BigRational>,
}

fn degree(e: &Index) -> u32 {
    e[0] + e[1] + e[2]
}

impl TruncatedSeries {
    pub fn zero(cap: u32) -> Self {
        Self {
            cap,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(cap: u32) -> Self {
        Self::from_terms(cap, [([0, 0, 0], BigRational::one())])
    }

    /// Drops zero coefficients and everything above `cap`.
    pub fn from_terms<I: IntoIterator<Item = (Index, BigRational)>>(cap: u32, iter: I) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in iter {
            if degree(&e) > cap || c.is_zero() {
                continue;
            }
            let slot = terms.entry(e).or_insert_with(BigRational::zero);
            *slot += c;
            if slot.is_zero() {
                terms.remove(&e);
            }
        }
        Self { cap, terms }
    }

    pub fn from_poly(cap: u32, p: &MultiPoly) -> Self {
        Self::from_terms(cap, p.terms().iter().cloned())
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn terms(&self) -> &BTreeMap<Index, BigRational> {
        &self.terms
    }

    pub fn coeff(&self, e: &Index) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest total degree carrying a nonzero term.
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(degree).min()
    }

    /// Restriction to total degree at most `d`.
    pub fn truncate(&self, d: u32) -> Self {
        Self {
            cap: self.cap.min(d),
            terms: self.terms.iter().filter(|(e, _)| degree(e) <= d).map(|(e, c)| (*e, c.clone())).collect(),
        }
    }

    pub fn to_poly(&self) -> MultiPoly {
        MultiPoly::from_terms(self.terms.iter().map(|(e, c)| (*e, c.clone())))
    }

    fn check_cap(&self, other: &Self) -> Result<(), SeriesError> {
        if self.cap != other.cap {
            Err(SeriesError::CapMismatch(self.cap, other.cap))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_cap(other)?;
        Ok(Self::from_terms(
            self.cap,
            self.terms.iter().chain(other.terms.iter()).map(|(e, c)| (*e, c.clone())),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_cap(other)?;
        Ok(Self::from_terms(
            self.cap,
            self.terms
                .iter()
                .map(|(e, c)| (*e, c.clone()))
                .chain(other.terms.iter().map(|(e, c)| (*e, -c))),
        ))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_cap(other)?;
        let mut acc: HashMap<Index, BigRational> = HashMap::new();
        for (ea, ca) in &self.terms {
            let da = degree(ea);
            for (eb, cb) in &other.terms {
                if da + degree(eb) > self.cap {
                    continue;
                }
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                *acc.entry(e).or_insert_with(BigRational::zero) += ca * cb;
            }
        }
        Ok(Self::from_terms(self.cap, acc))
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::from_terms(self.cap, self.terms.iter().map(|(e, c)| (*e, c * k)))
    }

    /// Multiplies by `c * p^a q^b r^c`, discarding terms pushed past the cap.
    pub fn scale_by_monomial(&self, mono: &Index, c: &BigRational) -> Self {
        Self::from_terms(
            self.cap,
            self.terms
                .iter()
                .map(|(e, v)| ([e[0] + mono[0], e[1] + mono[1], e[2] + mono[2]], v * c)),
        )
    }

    /// Multiplies by a polynomial, truncating at the cap.
    pub fn mul_poly(&self, p: &MultiPoly) -> Self {
        let mut acc: HashMap<Index, BigRational> = HashMap::new();
        for (ep, cp) in p.terms() {
            for (e, c) in &self.terms {
                let f = [e[0] + ep[0], e[1] + ep[1], e[2] + ep[2]];
                if degree(&f) <= self.cap {
                    *acc.entry(f).or_insert_with(BigRational::zero) += c * cp;
                }
            }
        }
        Self::from_terms(self.cap, acc)
    }

    /// JSON-friendly listing in lex order: `(index, "n/d")`.
    pub fn to_listing(&self) -> Vec<(Index, String)> {
        self.terms.iter().map(|(e, c)| (*e, format_rational(c))).collect()
    }
}

/// Series binary operations exposed to the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Mul,
    ScaleByMonomial(Index),
}

pub fn series_arith(a: &TruncatedSeries, b: &TruncatedSeries, op: SeriesOp) -> Result<TruncatedSeries, SeriesError> {
    match op {
        SeriesOp::Add => a.add(b),
        SeriesOp::Mul => a.mul(b),
        SeriesOp::ScaleByMonomial(m) => Ok(a.scale_by_monomial(&m, &BigRational::one())),
    }
}

fn fact(n: u32) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `(1/2^{4s}) ((2s)!)^2 / (s!)^3 / (l! m! n! (m+2n)!)`, `s = l + 2m + 3n`.
pub fn period_coefficient(index: Index) -> BigRational {
    let [l, m, n] = index;
    let s = l + 2 * m + 3 * n;
    let f2s = fact(2 * s);
    let fs = fact(s);
    let num = &f2s * &f2s;
    let den = (BigInt::one() << (4 * s as usize)) * &fs * &fs * &fs * fact(l) * fact(m) * fact(n) * fact(m + 2 * n);
    BigRational::new(num, den)
}

/// All period coefficients with `l + m + n <= cap`.
pub fn period_series(cap: u32) -> TruncatedSeries {
    let indices: Vec<Index> = (0..=cap)
        .flat_map(|l| (0..=cap - l).flat_map(move |m| (0..=cap - l - m).map(move |n| [l, m, n])))
        .collect();
    let terms: Vec<(Index, BigRational)> = indices.into_par_iter().map(|e| (e, period_coefficient(e))).collect();
    TruncatedSeries::from_terms(cap, terms)
}

/// Coefficient of `p^l q^m r^n` computed as the constant term in `t` of
/// `sum_N ((1/2)_N)^2 / (N!)^2 (t + p + q/t + r/t^2)^N` by explicit Laurent
/// expansion.
pub fn residue_oracle(index: Index) -> BigRational {
    let [l, m, n] = index;
    let top = l + 2 * m + 3 * n;
    // keys: (t exponent, p, q, r); exponents above the target are pruned
    type Laurent = HashMap<(i64, u32, u32, u32), BigInt>;
    let factors: [(i64, u32, u32, u32); 4] = [(1, 0, 0, 0), (0, 1, 0, 0), (-1, 0, 1, 0), (-2, 0, 0, 1)];
    let mut power: Laurent = HashMap::from([((0, 0, 0, 0), BigInt::one())]);
    let mut total = BigRational::zero();
    let mut weight = BigRational::one();
    for big_n in 0..=top {
        if big_n > 0 {
            let mut next: Laurent = HashMap::new();
            for ((t, a, b, c), v) in &power {
                for (dt, da, db, dc) in factors {
                    let key = (t + dt, a + da, b + db, c + dc);
                    if key.1 > l || key.2 > m || key.3 > n {
                        continue;
                    }
                    *next.entry(key).or_insert_with(BigInt::zero) += v;
                }
            }
            power = next;
            // ((1/2)_N / N!)^2 from its predecessor
            let ratio = BigRational::new(BigInt::from(2 * big_n - 1), BigInt::from(2 * big_n));
            weight = &weight * &ratio * &ratio;
        }
        if let Some(v) = power.get(&(0, l, m, n)) {
            total += &weight * BigRational::from_integer(v.clone());
        }
    }
    total
}

/// Evaluation by total-degree layers; the returned tail is the summed term
/// magnitude of the top layer.
pub fn evaluate_series(s: &TruncatedSeries, point: &[Complex64; 3], tol: f64) -> Result<(Complex64, f64), SeriesError> {
    let mut layers = vec![(Complex64::new(0.0, 0.0), 0.0f64); s.cap as usize + 1];
    let max_deg = s.terms.keys().map(|e| e[0].max(e[1]).max(e[2])).max().unwrap_or(0) as usize;
    let pows: Vec<Vec<Complex64>> = point
        .iter()
        .map(|z| {
            let mut v = vec![Complex64::new(1.0, 0.0)];
            for k in 1..=max_deg {
                let prev = v[k - 1];
                v.push(prev * z);
            }
            v
        })
        .collect();
    for (e, c) in &s.terms {
        let cf = rational_to_f64(c);
        let t = pows[0][e[0] as usize] * pows[1][e[1] as usize] * pows[2][e[2] as usize] * cf;
        let layer = &mut layers[degree(e) as usize];
        layer.0 += t;
        layer.1 += t.norm();
    }
    let value = layers.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, l| acc + l.0);
    let tail = if s.cap == 0 { 0.0 } else { layers[s.cap as usize].1 };
    if tail > tol {
        return Err(SeriesError::TailTooLarge { tail, tol });
    }
    Ok((value, tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    #[test]
    fn closed_form_values() {
        assert_eq!(period_coefficient([0, 0, 0]), rat(1, 1));
        assert_eq!(period_coefficient([1, 0, 0]), rat(1, 4));
        assert_eq!(period_coefficient([0, 1, 0]), rat(9, 32));
        assert_eq!(period_coefficient([0, 0, 1]), rat(75, 256));
        assert_eq!(period_coefficient([2, 0, 0]), rat(9, 64));
    }

    #[test]
    fn oracle_values() {
        assert_eq!(residue_oracle([0, 0, 0]), rat(1, 1));
        assert_eq!(residue_oracle([1, 0, 0]), rat(1, 4));
        assert_eq!(residue_oracle([0, 1, 0]), rat(9, 32));
        assert_eq!(residue_oracle([1, 1, 1]), period_coefficient([1, 1, 1]));
    }

    #[test]
    fn small_caps() {
        assert_eq!(period_series(0), TruncatedSeries::one(0));
        let s2 = period_series(2);
        assert_eq!(s2.terms().len(), 10);
        assert_eq!(s2.coeff(&[2, 0, 0]), rat(9, 64));
        let s1 = period_series(1);
        let expected = TruncatedSeries::from_terms(
            1,
            [([0, 0, 0], rat(1, 1)), ([1, 0, 0], rat(1, 4)), ([0, 1, 0], rat(9, 32)), ([0, 0, 1], rat(75, 256))],
        );
        assert_eq!(s1, expected);
    }

    #[test]
    fn monomial_shift_truncates() {
        let one = TruncatedSeries::one(3);
        let s = series_arith(&one, &one, SeriesOp::ScaleByMonomial([1, 2, 0])).unwrap();
        assert_eq!(s.coeff(&[1, 2, 0]), rat(1, 1));
        let t = TruncatedSeries::one(2).scale_by_monomial(&[1, 2, 0], &rat(1, 1));
        assert!(t.is_zero());
    }

    #[test]
    fn convolution() {
        let a = TruncatedSeries::from_terms(2, [([0, 0, 0], rat(1, 1)), ([1, 0, 0], rat(1, 1))]);
        let b = TruncatedSeries::from_terms(2, [([0, 0, 0], rat(1, 1)), ([1, 0, 0], rat(-1, 1))]);
        let expected = TruncatedSeries::from_terms(2, [([0, 0, 0], rat(1, 1)), ([2, 0, 0], rat(-1, 1))]);
        assert_eq!(a.mul(&b).unwrap(), expected);
        assert!(a.add(&TruncatedSeries::zero(3)).is_err());
        assert_eq!(a.add(&TruncatedSeries::zero(2)).unwrap(), a);
    }

    #[test]
    fn evaluation_with_tail() {
        let s = TruncatedSeries::from_terms(1, [([0, 0, 0], rat(1, 1)), ([1, 0, 0], rat(1, 4))]);
        let z = [Complex64::new(0.01, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        let (v, tail) = evaluate_series(&s, &z, 1.0).unwrap();
        assert!((v.re - 1.0025).abs() < 1e-15);
        assert!((tail - 0.0025).abs() < 1e-15);
        assert!(evaluate_series(&s, &z, 1e-3).is_err());
        let (c, t0) = evaluate_series(&TruncatedSeries::one(0), &z, 0.0).unwrap();
        assert_eq!((c.re, t0), (1.0, 0.0));
    }
}
