//! Normal-ordered Euler-operator calculus in (p, q, r).
//!
//! An operator is `sum_a c_a(p,q,r) θ^a` with every coefficient to the left
//! of every θ. Composition uses `θ^α ∘ c = Σ_{γ≤α} C(α,γ) (θ^γ c) θ^{α-γ}`
//! where θ acts diagonally on monomials.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::rational::rat;
use crate::algebra::{rational::int, MultiPoly};
use crate::series::{Index, TruncatedSeries};

/// θ-exponents `(a, b, c)` for `θp^a θq^b θr^c`.
pub type ThetaMono = [u32; 3];

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ThetaOperator {
    terms: BTreeMap<ThetaMono, MultiPoly>,
}

fn binom(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// `θ^γ` applied to a polynomial: each monomial scaled by `e^γ`.
pub fn theta_power_on_poly(gamma: &ThetaMono, c: &MultiPoly) -> MultiPoly {
    if *gamma == [0, 0, 0] {
        return c.clone();
    }
    c.map_coeffs(|e, v| v * BigRational::from_integer(eigenvalue(e, gamma)))
}

fn eigenvalue(e: &[u32; 3], gamma: &ThetaMono) -> BigInt {
    let mut k = BigInt::one();
    for i in 0..3 {
        for _ in 0..gamma[i] {
            k *= BigInt::from(e[i]);
        }
    }
    k
}

impl ThetaOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::from_terms([([0, 0, 0], MultiPoly::one())])
    }

    /// The generator θ_x for `x` in 0..3.
    pub fn theta(x: usize) -> Self {
        let mut m = [0; 3];
        m[x] = 1;
        Self::from_terms([(m, MultiPoly::one())])
    }

    /// Multiplication by a polynomial.
    pub fn coeff(c: MultiPoly) -> Self {
        Self::from_terms([([0, 0, 0], c)])
    }

    pub fn monomial(m: ThetaMono, c: MultiPoly) -> Self {
        Self::from_terms([(m, c)])
    }

    pub fn from_terms<I: IntoIterator<Item = (ThetaMono, MultiPoly)>>(iter: I) -> Self {
        let mut terms: BTreeMap<ThetaMono, MultiPoly> = BTreeMap::new();
        for (m, c) in iter {
            let slot = terms.entry(m).or_default();
            *slot = &*slot + &c;
        }
        terms.retain(|_, c| !c.is_zero());
        Self { terms }
    }

    pub fn terms(&self) -> &BTreeMap<ThetaMono, MultiPoly> {
        &self.terms
    }

    pub fn coefficient(&self, m: &ThetaMono) -> MultiPoly {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn order(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.terms.iter().chain(other.terms.iter()).map(|(m, c)| (*m, c.clone())))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (*m, c.scale(k))))
    }

    /// Left multiplication by a polynomial.
    pub fn mul_poly(&self, c: &MultiPoly) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, v)| (*m, c * v)))
    }

    /// Normal-ordered product `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut out: Vec<(ThetaMono, MultiPoly)> = Vec::new();
        for (alpha, a) in &self.terms {
            for (beta, b) in &other.terms {
                for g0 in 0..=alpha[0] {
                    for g1 in 0..=alpha[1] {
                        for g2 in 0..=alpha[2] {
                            let gamma = [g0, g1, g2];
                            let k = binom(alpha[0], g0) * binom(alpha[1], g1) * binom(alpha[2], g2);
                            let shifted = theta_power_on_poly(&gamma, b);
                            if shifted.is_zero() {
                                continue;
                            }
                            let coeff = (a * &shifted).scale(&BigRational::from_integer(k));
                            let m = [alpha[0] - g0 + beta[0], alpha[1] - g1 + beta[1], alpha[2] - g2 + beta[2]];
                            out.push((m, coeff));
                        }
                    }
                }
            }
        }
        Self::from_terms(out)
    }

    /// Exact image of a truncated series, truncated at its cap.
    pub fn apply(&self, s: &TruncatedSeries) -> TruncatedSeries {
        let mut acc = TruncatedSeries::zero(s.cap());
        for (m, c) in &self.terms {
            let diag = TruncatedSeries::from_terms(
                s.cap(),
                s.terms().iter().map(|(e, v)| (*e, v * BigRational::from_integer(eigenvalue(e, m)))),
            );
            acc = acc.add(&diag.mul_poly(c)).expect("equal caps");
        }
        acc
    }

    /// Rendering such as `q^2*θpθr - p*r*θq^2 + p*r*θq`.
    pub fn to_pretty_string(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let names = crate::algebra::default_var_names::<3>();
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let th: String = ["θp", "θq", "θr"]
                    .iter()
                    .zip(m)
                    .filter(|(_, k)| **k > 0)
                    .map(|(n, k)| if *k == 1 { n.to_string() } else { format!("{n}^{k}") })
                    .collect();
                let cs = c.to_pretty_string(&names);
                match (th.is_empty(), c.len() > 1) {
                    (true, _) => cs,
                    (false, true) => format!("({cs})*{th}"),
                    (false, false) if c.is_one() => th,
                    (false, false) => format!("{cs}*{th}"),
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for ThetaOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_pretty_string())
    }
}

fn p() -> MultiPoly {
    MultiPoly::var(0)
}
fn q() -> MultiPoly {
    MultiPoly::var(1)
}
fn r() -> MultiPoly {
    MultiPoly::var(2)
}
fn th(x: usize) -> ThetaOperator {
    ThetaOperator::theta(x)
}
fn lin(a: i64, b: i64, c: i64, k: BigRational) -> ThetaOperator {
    ThetaOperator::from_terms([
        ([1, 0, 0], MultiPoly::from_int(a)),
        ([0, 1, 0], MultiPoly::from_int(b)),
        ([0, 0, 1], MultiPoly::from_int(c)),
        ([0, 0, 0], MultiPoly::constant(k)),
    ])
}

/// The five annihilators, each written as LHS − RHS: the four reduced GKZ
/// operators followed by the additional second-order operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalSystem {
    pub operators: Vec<ThetaOperator>,
}

pub fn gkz_operators() -> Vec<ThetaOperator> {
    let zero = BigRational::zero();
    let one = ThetaOperator::identity();
    // q²θpθr − pr θq(θq−1)
    let op1 = th(0).compose(&th(2)).mul_poly(&(&q() * &q())).sub(
        &th(1).compose(&th(1).sub(&one)).mul_poly(&(&p() * &r())),
    );
    // p²θq(θq+2θr) − q θp(θp−1)
    let op2 = th(1)
        .compose(&lin(0, 1, 2, zero.clone()))
        .mul_poly(&(&p() * &p()))
        .sub(&th(0).compose(&th(0).sub(&one)).mul_poly(&q()));
    // θp(θp+2θq+3θr) − p(θp+2θq+3θr+1/2)²
    let e = lin(1, 2, 3, rat(1, 2));
    let op3 = th(0).compose(&lin(1, 2, 3, zero.clone())).sub(&e.compose(&e).mul_poly(&p()));
    // pq θr(θq+2θr) − r θpθq
    let op4 = th(2)
        .compose(&lin(0, 1, 2, zero))
        .mul_poly(&(&p() * &q()))
        .sub(&th(0).compose(&th(1)).mul_poly(&r()));
    vec![op1, op2, op3, op4]
}

pub fn extra_operator() -> ThetaOperator {
    let c = |k: i64, m: MultiPoly| m.scale(&int(k));
    let t1 = th(0).compose(&lin(0, 0, 2, int(1))).mul_poly(&c(9, &q() * &r()));
    let t2 = th(1).compose(&lin(0, 2, 3, int(0))).mul_poly(&c(-4, &p() * &r()));
    let t3 = th(2).compose(&lin(0, 1, 2, int(0))).mul_poly(&c(-4, &(&p() * &p()) * &q()));
    let t4 = th(1).compose(&lin(1, 4, 6, int(0))).mul_poly(&c(4, &(&p() * &p()) * &r()));
    let t5 = th(2).compose(&lin(0, 16, 30, int(1))).mul_poly(&(&p() * &(&q() * &q())));
    t1.add(&t2).add(&t3).add(&t4).add(&t5)
}

pub fn build_canonical_system() -> CanonicalSystem {
    let mut operators = gkz_operators();
    operators.push(extra_operator());
    CanonicalSystem { operators }
}

impl CanonicalSystem {
    /// The four reduced GKZ operators only.
    pub fn gkz_only() -> Self {
        Self {
            operators: gkz_operators(),
        }
    }

    /// Images of the series under every operator, computed in parallel.
    pub fn apply_all(&self, s: &TruncatedSeries) -> Vec<TruncatedSeries> {
        self.operators.par_iter().map(|op| op.apply(s)).collect()
    }
}

/// Largest monomial-multiplier degree across the canonical operators.
pub const DEGREE_MARGIN: u32 = 3;

/// Per-operator annihilation result: the degree checked through and
/// whether every coefficient up to that degree vanished.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnihilationCheck {
    pub checked_through: Option<u32>,
    pub vanishes: bool,
}

/// Checks `op(series) = 0` through total degree `cap − DEGREE_MARGIN`.
pub fn annihilation_check(op: &ThetaOperator, series: &TruncatedSeries) -> AnnihilationCheck {
    let Some(top) = series.cap().checked_sub(DEGREE_MARGIN) else {
        return AnnihilationCheck {
            checked_through: None,
            vanishes: true,
        };
    };
    let image = op.apply(series).truncate(top);
    AnnihilationCheck {
        checked_through: Some(top),
        vanishes: image.is_zero(),
    }
}

/// The quintic in (ℓ, m, n) whose vanishing makes the period series a
/// solution of the extra operator; returns its expansion.
pub fn identity_polynomial() -> MultiPoly {
    let l = MultiPoly::var(0);
    let m = MultiPoly::var(1);
    let n = MultiPoly::var(2);
    let k = |c: i64| MultiPoly::from_int(c);
    let lin = |a: i64, b: i64, c: i64, d: i64| &(&(&l.scale(&int(a)) + &m.scale(&int(b))) + &n.scale(&int(c))) + &k(d);
    let s4 = lin(1, 2, 3, -4);
    let w = lin(2, 4, 6, -9);
    let w2 = &w * &w;
    let t1 = (&(&lin(0, 0, 2, -1) * &lin(0, 1, 2, -2)) * &s4).scale(&int(9));
    let t2 = &w2 * &lin(0, 2, 3, -3);
    let t3 = &w2 * &lin(1, 0, 0, -1);
    let t4 = (&(&lin(1, 0, 0, -1) * &s4) * &lin(1, 4, 6, -8)).scale(&int(4));
    let t5 = &(&lin(0, 1, 0, -1) * &s4) * &lin(0, 16, 30, -31);
    &(&(&(&t1 - &t2) - &t3) + &t4) + &t5
}

/// Returns the expansion as a witness: `Ok` iff it is the zero polynomial.
pub fn identity_check() -> Result<MultiPoly, MultiPoly> {
    let f = identity_polynomial();
    if f.is_zero() {
        Ok(f)
    } else {
        Err(f)
    }
}

/// Coefficient of `p^e` in `op(Σ_k a(k) p^k)`, for any coefficient oracle.
pub fn image_coefficient(op: &ThetaOperator, e: &Index, a: impl Fn(Index) -> BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for (gamma, c) in &op.terms {
        for (shift, coeff) in c.terms() {
            if (0..3).all(|i| e[i] >= shift[i]) {
                let k = [e[0] - shift[0], e[1] - shift[1], e[2] - shift[2]];
                acc += coeff * BigRational::from_integer(eigenvalue(&k, gamma)) * a(k);
            }
        }
    }
    acc
}

/// Index helper shared with tests: eigenvalue of θ^m on p^e.
pub fn theta_eigenvalue(e: &Index, m: &ThetaMono) -> BigInt {
    eigenvalue(e, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::period_series;

    #[test]
    fn commutation_rule() {
        let lhs = th(0).compose(&ThetaOperator::coeff(p()));
        let rhs = ThetaOperator::from_terms([([1, 0, 0], p()), ([0, 0, 0], p())]);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn thetas_commute() {
        assert_eq!(th(0).compose(&th(1)), th(1).compose(&th(0)));
    }

    #[test]
    fn composition_with_shifted_coefficient() {
        let c = &(&p() * &p()) * &q();
        let lhs = th(0).compose(&ThetaOperator::monomial([0, 0, 1], c.clone()));
        let expected = ThetaOperator::from_terms([([1, 0, 1], c.clone()), ([0, 0, 1], c.scale(&int(2)))]);
        assert_eq!(lhs, expected);
        // cross-check on monomials p^i q^j r^k
        for e in [[0u32, 0, 1], [1, 2, 3], [2, 0, 5]] {
            let s = TruncatedSeries::from_terms(20, [(e, int(1))]);
            let direct = th(0).apply(&ThetaOperator::monomial([0, 0, 1], c.clone()).apply(&s));
            assert_eq!(lhs.apply(&s), direct);
        }
    }

    #[test]
    fn diagonal_action() {
        assert!(th(0).apply(&TruncatedSeries::one(4)).is_zero());
        let s = TruncatedSeries::from_terms(4, [([0, 1, 0], int(1))]);
        assert_eq!(th(1).apply(&s), s);
        let op = ThetaOperator::monomial([1, 0, 1], &q() * &q());
        let pr = TruncatedSeries::from_terms(4, [([1, 0, 1], int(1))]);
        assert_eq!(op.apply(&pr), TruncatedSeries::from_terms(4, [([1, 2, 1], int(1))]));
    }

    #[test]
    fn canonical_operators_annihilate() {
        let s = period_series(10);
        for op in build_canonical_system().operators {
            let check = annihilation_check(&op, &s);
            assert_eq!(check.checked_through, Some(7));
            assert!(check.vanishes, "{op}");
        }
    }

    #[test]
    fn constants_are_not_solutions() {
        let op3 = &gkz_operators()[2];
        let image = op3.apply(&TruncatedSeries::one(3));
        assert_eq!(image, TruncatedSeries::from_terms(3, [([1, 0, 0], rat(-1, 4))]));
    }

    fn identity_terms(l: i64, m: i64, n: i64) -> [i64; 5] {
        let s4 = l + 2 * m + 3 * n - 4;
        let w = 2 * l + 4 * m + 6 * n - 9;
        [
            9 * (2 * n - 1) * (m + 2 * n - 2) * s4,
            -w * w * (2 * m + 3 * n - 3),
            -w * w * (l - 1),
            4 * (l - 1) * s4 * (l + 4 * m + 6 * n - 8),
            (m - 1) * s4 * (16 * m + 30 * n - 31),
        ]
    }

    #[test]
    fn identity_spot_values() {
        assert_eq!(identity_terms(0, 0, 0), [-72, 243, 81, -128, -124]);
        assert_eq!(identity_terms(1, 1, 1).iter().sum::<i64>(), 0);
        assert!(identity_check().is_ok());
    }

    #[test]
    fn pretty_printing() {
        let s = gkz_operators()[0].to_string();
        assert!(s.contains("θpθr"), "{s}");
    }
}
