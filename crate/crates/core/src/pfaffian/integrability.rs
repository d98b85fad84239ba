use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::PfaffianSystem;
use crate::algebra::{int_gcd, IntPoly, MultiPoly, RatFunc};

/// Nonzero entries of `∂_a M_b − ∂_b M_a − [M_a, M_b]`.
#[derive(Clone, Debug, Serialize)]
pub struct PairResidual {
    pub pair: (String, String),
    pub nonzero_entries: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegrabilityReport {
    pub pairs: Vec<PairResidual>,
    /// Max number of nonzero entries over the three pairs.
    pub residual: usize,
}

impl IntegrabilityReport {
    pub fn holds(&self) -> bool {
        self.residual == 0
    }
}

/// Signed terms `n / d` whose sum is tested for zero over a common
/// denominator; products are never canonicalized.
struct Terms(Vec<(MultiPoly, MultiPoly)>);

impl Terms {
    fn push(&mut self, f: &RatFunc, sign: bool) {
        if f.is_zero() {
            return;
        }
        let n = if sign { f.numer().clone() } else { -f.numer() };
        self.0.push((n, f.denom().clone()));
    }

    fn push_product(&mut self, a: &RatFunc, b: &RatFunc, sign: bool) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let n = a.numer() * b.numer();
        self.0.push((if sign { n } else { -n }, a.denom() * b.denom()));
    }

    fn sum_is_zero(&self) -> bool {
        let ints: Vec<(IntPoly<3>, BigRational, IntPoly<3>)> = self
            .0
            .iter()
            .map(|(n, d)| {
                let (cn, n) = n.to_int();
                let (cd, d) = d.to_int();
                (n, cn / cd, d)
            })
            .collect();
        let mut lcm = IntPoly::<3>::one();
        for (_, _, d) in &ints {
            let g = int_gcd(&lcm, d);
            lcm = lcm.mul(&d.div_exact(&g).expect("gcd divides"));
        }
        let mut total = MultiPoly::zero();
        for (n, c, d) in &ints {
            let cof = lcm.div_exact(d).expect("lcm is a multiple");
            total = &total + &MultiPoly::from_int_poly(&n.mul(&cof), c);
        }
        total.is_zero()
    }
}

const NAMES: [&str; 3] = ["p", "q", "r"];

/// Checks `∂_a M_b − ∂_b M_a = [M_a, M_b]` for `(a, b)` in `(p,q)`, `(q,r)`,
/// `(r,p)` as exact identities.
pub fn check_integrability(sys: &PfaffianSystem) -> IntegrabilityReport {
    let n = sys.rank();
    let pairs: Vec<PairResidual> = [(0usize, 1usize), (1, 2), (2, 0)]
        .par_iter()
        .map(|&(a, b)| {
            let (ma, mb) = (&sys.m[a], &sys.m[b]);
            let cells: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
            let nonzero_entries: Vec<(usize, usize)> = cells
                .into_par_iter()
                .filter(|&(i, j)| {
                    let mut t = Terms(Vec::new());
                    t.push(&mb[i][j].derivative(a), true);
                    t.push(&ma[i][j].derivative(b), false);
                    for k in 0..n {
                        t.push_product(&ma[i][k], &mb[k][j], false);
                        t.push_product(&mb[i][k], &ma[k][j], true);
                    }
                    !t.sum_is_zero()
                })
                .collect();
            PairResidual {
                pair: (NAMES[a].into(), NAMES[b].into()),
                nonzero_entries,
            }
        })
        .collect();
    let residual = pairs.iter().map(|p| p.nonzero_entries.len()).max().unwrap_or(0);
    IntegrabilityReport { pairs, residual }
}
