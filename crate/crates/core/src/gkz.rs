//! GKZ data, integer kernels and reduction of box operators to (p, q, r).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::algebra::rational::{int, rat};
use crate::algebra::MultiPoly;
use crate::operator::ThetaOperator;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GkzError {
    #[error("matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("vector {0:?} is not in the kernel")]
    NotInKernel(Vec<i64>),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// An integer matrix `A` (k × n) with parameter vector `γ` of length k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GkzData {
    pub a: Vec<Vec<i64>>,
    pub gamma: Vec<BigRational>,
}

impl GkzData {
    /// The 4 × 7 data of the Kummer family.
    pub fn kummer() -> Self {
        Self {
            a: vec![
                vec![1, 1, 0, 0, 0, 0, 0],
                vec![0, 0, 1, 1, 1, 1, 1],
                vec![1, 0, 1, 0, 0, 0, 0],
                vec![0, 2, 0, 3, 2, 1, 0],
            ],
            gamma: vec![rat(-1, 2), rat(-1, 2), rat(-1, 2), int(-1)],
        }
    }

    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn cols(&self) -> usize {
        self.a.first().map_or(0, Vec::len)
    }

    pub fn apply(&self, b: &[i64]) -> Vec<i64> {
        self.a.iter().map(|row| row.iter().zip(b).map(|(x, y)| x * y).sum()).collect()
    }

    pub fn in_kernel(&self, b: &[i64]) -> bool {
        b.len() == self.cols() && self.apply(b).iter().all(|&x| x == 0)
    }
}

/// The four kernel vectors defining the reduced GKZ operators, in order.
pub fn reference_kernel_vectors() -> Vec<Vec<i64>> {
    vec![
        vec![0, 0, 0, 0, 1, -2, 1],
        vec![0, 0, 0, 1, -2, 1, 0],
        vec![1, -1, -1, 0, 1, 0, 0],
        vec![0, 0, 0, 1, -1, -1, 1],
    ]
}

/// Row-reduces `[Aᵀ | I]` over ℤ; rows whose `Aᵀ` part vanishes form a
/// basis of `ker(A) ∩ ℤⁿ`.
pub fn kernel_basis(data: &GkzData) -> Result<Vec<Vec<i64>>, GkzError> {
    let (k, n) = (data.rows(), data.cols());
    if data.a.iter().any(|r| r.len() != n) {
        return Err(GkzError::Dimension("ragged matrix".into()));
    }
    let mut m: Vec<Vec<BigInt>> = (0..n)
        .map(|j| {
            let mut row: Vec<BigInt> = (0..k).map(|i| BigInt::from(data.a[i][j])).collect();
            row.extend((0..n).map(|i| BigInt::from((i == j) as i64)));
            row
        })
        .collect();
    let mut rank = 0;
    for col in 0..k {
        // Euclid on the column below `rank` until a single nonzero remains.
        loop {
            let nonzero: Vec<usize> = (rank..n).filter(|&i| !m[i][col].is_zero()).collect();
            if nonzero.is_empty() {
                break;
            }
            let piv = *nonzero.iter().min_by_key(|&&i| m[i][col].abs()).expect("nonempty");
            m.swap(rank, piv);
            let mut done = true;
            for i in rank + 1..n {
                if m[i][col].is_zero() {
                    continue;
                }
                let f = m[i][col].div_floor(&m[rank][col]);
                let pivot_row = m[rank].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
                if !m[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                rank += 1;
                break;
            }
        }
    }
    if rank != k {
        return Err(GkzError::RankDeficient { rank, expected: k });
    }
    Ok(m[rank..]
        .iter()
        .map(|row| row[k..].iter().map(|x| i64::try_from(x).expect("small kernel entries")).collect())
        .collect())
}

/// Integer coefficients expressing `target` in the lattice spanned by
/// `basis`, or `None` if it is not a member.
pub fn lattice_coordinates(basis: &[Vec<i64>], target: &[i64]) -> Option<Vec<BigInt>> {
    let n = target.len();
    let k = basis.len();
    // Solve basisᵀ x = target by Gaussian elimination over ℚ.
    let mut rows: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            let mut r: Vec<BigRational> = basis.iter().map(|b| int(b[i])).collect();
            r.push(int(target[i]));
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..k {
        let Some(p) = (row..n).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(row, p);
        let inv = BigRational::one() / &rows[row][col];
        for x in rows[row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != row && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                let pr = rows[row].clone();
                for (x, y) in rows[i].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if rows[row..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    let mut x = vec![BigInt::zero(); k];
    for (i, &c) in pivots.iter().enumerate() {
        let v = &rows[i][k];
        if !v.is_integer() {
            return None;
        }
        x[c] = v.to_integer();
    }
    Some(x)
}

/// Polynomial in seven commuting θ's with rational coefficients.
pub type Theta7 = BTreeMap<Vec<u32>, BigRational>;

fn theta7_mul(a: &Theta7, b: &Theta7) -> Theta7 {
    let mut out = Theta7::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(BigRational::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `θ_j (θ_j − 1) ⋯ (θ_j − k + 1)`.
fn falling_factorial(n: usize, j: usize, k: u32) -> Theta7 {
    let mut acc = Theta7::from([(vec![0; n], BigRational::one())]);
    for i in 0..k {
        let mut e = vec![0; n];
        e[j] = 1;
        let mut factor = Theta7::from([(e, BigRational::one())]);
        if i > 0 {
            factor.insert(vec![0; n], int(-(i as i64)));
        }
        acc = theta7_mul(&acc, &factor);
    }
    acc
}

/// The box equation for `b` in the cleared form
/// `c^{b−} ∏[θ_j]_{b_j⁺} u = c^{b⁺} ∏[θ_j]_{b_j⁻} u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoxOperator {
    pub b: Vec<i64>,
    pub plus: Vec<u32>,
    pub minus: Vec<u32>,
    /// `c^{b−} ∂^{b+}` written in θ's.
    pub lhs: Theta7,
    /// `c^{b+} ∂^{b−}` written in θ's.
    pub rhs: Theta7,
}

pub fn box_operator(b: &[i64]) -> BoxOperator {
    let n = b.len();
    let plus: Vec<u32> = b.iter().map(|&x| x.max(0) as u32).collect();
    let minus: Vec<u32> = b.iter().map(|&x| (-x).max(0) as u32).collect();
    let product = |ks: &[u32]| {
        ks.iter()
            .enumerate()
            .fold(Theta7::from([(vec![0; n], BigRational::one())]), |acc, (j, &k)| {
                theta7_mul(&acc, &falling_factorial(n, j, k))
            })
    };
    BoxOperator {
        b: b.to_vec(),
        lhs: product(&plus),
        rhs: product(&minus),
        plus,
        minus,
    }
}

/// Exponents of p, q, r as Laurent monomials in c, and each θ_j in terms of
/// θp, θq, θr.
#[derive(Clone, Debug)]
pub struct SubstitutionTable {
    pub pqr_in_c: [Vec<i64>; 3],
    pub theta: Vec<ThetaOperator>,
}

fn affine(a: i64, b: i64, c: i64, k: BigRational) -> ThetaOperator {
    ThetaOperator::from_terms([
        ([1, 0, 0], MultiPoly::from_int(a)),
        ([0, 1, 0], MultiPoly::from_int(b)),
        ([0, 0, 1], MultiPoly::from_int(c)),
        ([0, 0, 0], MultiPoly::constant(k)),
    ])
}

impl SubstitutionTable {
    pub fn kummer() -> Self {
        Self {
            pqr_in_c: [
                vec![1, -1, -1, 0, 1, 0, 0],
                vec![2, -2, -2, 1, 0, 1, 0],
                vec![3, -3, -3, 2, 0, 0, 1],
            ],
            theta: vec![
                affine(1, 2, 3, int(0)),
                affine(-1, -2, -3, rat(-1, 2)),
                affine(-1, -2, -3, rat(-1, 2)),
                affine(0, 1, 2, int(0)),
                affine(1, 0, 0, int(0)),
                affine(0, 1, 0, int(0)),
                affine(0, 0, 1, int(0)),
            ],
        }
    }

    /// Exponents `(x, y, z)` with `c^b = p^x q^y r^z`.
    pub fn c_monomial_to_pqr(&self, b: &[i64]) -> Result<[i64; 3], GkzError> {
        let n = b.len();
        let rows: Vec<Vec<i64>> = self.pqr_in_c.to_vec();
        // Requires columns where the exponent matrix is the identity.
        let cols: Vec<usize> = (0..3)
            .map(|i| {
                (0..n)
                    .find(|&j| (0..3).all(|k| rows[k][j] == (k == i) as i64))
                    .ok_or_else(|| GkzError::Dimension("no unit column".into()))
            })
            .collect::<Result<_, _>>()?;
        let x = [b[cols[0]], b[cols[1]], b[cols[2]]];
        let recon: Vec<i64> = (0..n).map(|j| (0..3).map(|k| x[k] * rows[k][j]).sum()).collect();
        if recon != b {
            return Err(GkzError::NotInKernel(b.to_vec()));
        }
        Ok(x)
    }

    pub fn exponent_rank(&self) -> usize {
        let m: Vec<Vec<i64>> = self.pqr_in_c.to_vec();
        integer_rank(&m)
    }

    fn substitute(&self, t: &Theta7) -> ThetaOperator {
        let mut acc = ThetaOperator::zero();
        for (e, c) in t {
            let mut term = ThetaOperator::coeff(MultiPoly::constant(c.clone()));
            for (j, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    term = term.compose(&self.theta[j]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }
}

fn integer_rank(m: &[Vec<i64>]) -> usize {
    let mut rows: Vec<Vec<BigRational>> = m.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        for i in rank + 1..rows.len() {
            let f = &rows[i][c] / &rows[rank][c];
            let pr = rows[rank].clone();
            for (x, y) in rows[i].iter_mut().zip(&pr) {
                *x -= &f * y;
            }
        }
        rank += 1;
    }
    rank
}

/// Rewrites the box equation of `b` as an annihilator in θp, θq, θr with
/// polynomial coefficients: `x^{neg} (L − p^x q^y r^z R)` where `x^{neg}`
/// clears negative exponents.
pub fn reduce_to_pqr(b: &[i64], table: &SubstitutionTable) -> Result<ThetaOperator, GkzError> {
    let exps = table.c_monomial_to_pqr(b)?;
    let bx = box_operator(b);
    let lhs = table.substitute(&bx.lhs);
    let rhs = table.substitute(&bx.rhs);
    let mut left = [0u32; 3];
    let mut right = [0u32; 3];
    for i in 0..3 {
        if exps[i] < 0 {
            left[i] = (-exps[i]) as u32;
        } else {
            right[i] = exps[i] as u32;
        }
    }
    let lm = MultiPoly::monomial(left, BigRational::one());
    let rm = MultiPoly::monomial(right, BigRational::one());
    Ok(lhs.mul_poly(&lm).sub(&rhs.mul_poly(&rm)))
}

/// Substitutes the θ_j into each Euler relation `Σ_j a_{κj} θ_j − γ_κ`;
/// returns the residual operators, all zero on success.
pub fn verify_euler_elimination(data: &GkzData, table: &SubstitutionTable) -> Vec<ThetaOperator> {
    data.a
        .iter()
        .zip(&data.gamma)
        .map(|(row, g)| {
            let mut acc = ThetaOperator::coeff(MultiPoly::constant(-g));
            for (j, &a) in row.iter().enumerate() {
                acc = acc.add(&table.theta[j].scale(&int(a)));
            }
            acc
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::gkz_operators;

    #[test]
    fn reference_vectors_are_kernel_vectors() {
        let d = GkzData::kummer();
        for b in reference_kernel_vectors() {
            assert!(d.in_kernel(&b), "{b:?}");
        }
    }

    #[test]
    fn kernel_has_rank_three_and_spans_reference_vectors() {
        let d = GkzData::kummer();
        let basis = kernel_basis(&d).unwrap();
        assert_eq!(basis.len(), 3);
        for b in &basis {
            assert!(d.in_kernel(b));
        }
        for v in reference_kernel_vectors() {
            let x = lattice_coordinates(&basis, &v).expect("lattice member");
            let recon: Vec<BigInt> = (0..7)
                .map(|i| basis.iter().zip(&x).map(|(b, c)| c * BigInt::from(b[i])).sum())
                .collect();
            assert_eq!(recon, v.iter().map(|&t| BigInt::from(t)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn rank_deficient_rejected() {
        let d = GkzData {
            a: vec![vec![1, 1, 0], vec![2, 2, 0]],
            gamma: vec![int(0), int(0)],
        };
        assert!(matches!(kernel_basis(&d), Err(GkzError::RankDeficient { .. })));
    }

    #[test]
    fn non_member_detected() {
        let basis = vec![vec![2, 0], vec![0, 1]];
        assert!(lattice_coordinates(&basis, &[1, 0]).is_none());
        assert!(lattice_coordinates(&basis, &[4, 3]).is_some());
    }

    #[test]
    fn second_box_equation_cleared_form() {
        let bx = box_operator(&[0, 0, 0, 1, -2, 1, 0]);
        let th = |j: usize| {
            let mut e = vec![0; 7];
            e[j] = 1;
            e
        };
        let mut e46 = vec![0; 7];
        e46[3] = 1;
        e46[5] = 1;
        assert_eq!(bx.lhs, Theta7::from([(e46, int(1))]));
        let mut e55 = vec![0; 7];
        e55[4] = 2;
        assert_eq!(bx.rhs, Theta7::from([(e55, int(1)), (th(4), int(-1))]));
        assert_eq!(bx.minus, vec![0, 0, 0, 0, 2, 0, 0]);
        assert_eq!(bx.plus, vec![0, 0, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn multiplicity_one_has_no_falling_factorial() {
        let bx = box_operator(&[1, -1, -1, 0, 1, 0, 0]);
        assert_eq!(bx.lhs.len(), 1);
        assert_eq!(bx.rhs.len(), 1);
    }

    #[test]
    fn reductions_match_canonical_operators() {
        let table = SubstitutionTable::kummer();
        assert_eq!(table.exponent_rank(), 3);
        for (b, op) in reference_kernel_vectors().iter().zip(gkz_operators()) {
            assert_eq!(reduce_to_pqr(b, &table).unwrap(), op, "{b:?}");
        }
    }

    #[test]
    fn euler_relations_vanish() {
        let res = verify_euler_elimination(&GkzData::kummer(), &SubstitutionTable::kummer());
        assert_eq!(res.len(), 4);
        assert!(res.iter().all(ThetaOperator::is_zero));
    }

    #[test]
    fn non_kernel_vector_rejected() {
        let table = SubstitutionTable::kummer();
        assert!(matches!(
            reduce_to_pqr(&[1, 0, 0, 0, 0, 0, 0], &table),
            Err(GkzError::NotInKernel(_))
        ));
    }
}
