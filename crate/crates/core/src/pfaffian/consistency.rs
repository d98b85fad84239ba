use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use super::PfaffianSystem;
use crate::algebra::{int_gcd, IntPoly, MultiPoly};
use crate::operator::ThetaOperator;
use crate::series::TruncatedSeries;

#[derive(Clone, Debug, Serialize)]
pub struct SeriesConsistency {
    /// Failing `(x, j)` pairs.
    pub failures: Vec<(usize, usize)>,
    /// Smallest `cap − val(L)` over all rows; a discrepancy of lowest degree
    /// at most this is always detected. Negative means no coverage.
    pub checked_through: i64,
}

/// Checks `L·θ_x(θ^{w_j} u) = Σ_k (L·F_{jk})·θ^{w_k} u` on the truncated
/// series `u`, where `F = x·M_x` and `L` clears the row's denominators.
/// Polynomial multipliers never lower degree, so both sides are exact
/// through the cap.
pub fn series_consistency(sys: &PfaffianSystem, u: &TruncatedSeries) -> SeriesConsistency {
    let images: Vec<TruncatedSeries> = sys
        .basis
        .par_iter()
        .map(|w| ThetaOperator::monomial(*w, MultiPoly::one()).apply(u))
        .collect();
    let cells: Vec<(usize, usize)> = (0..3).flat_map(|x| (0..sys.rank()).map(move |j| (x, j))).collect();
    let results: Vec<((usize, usize), bool, u32)> = cells
        .into_par_iter()
        .map(|(x, j)| {
            let row = &sys.theta_form(x)[j];
            let mut lcm = IntPoly::<3>::one();
            for f in row.iter().filter(|f| !f.is_zero()) {
                let (_, d) = f.denom().to_int();
                let g = int_gcd(&lcm, &d);
                lcm = lcm.mul(&d.div_exact(&g).expect("gcd divides"));
            }
            let l = MultiPoly::from_int_poly(&lcm, &BigRational::one());
            let lhs = ThetaOperator::theta(x).apply(&images[j]).mul_poly(&l);
            let mut rhs = TruncatedSeries::zero(u.cap());
            for (f, img) in row.iter().zip(&images) {
                if !f.is_zero() {
                    let c = (f.numer() * &l).div_exact(f.denom()).expect("lcm clears denominator");
                    rhs = rhs.add(&img.mul_poly(&c)).expect("equal caps");
                }
            }
            let val = l.terms().iter().map(|(e, _)| e.iter().sum::<u32>()).min().unwrap_or(0);
            ((x, j), lhs != rhs, val)
        })
        .collect();
    SeriesConsistency {
        failures: results.iter().filter(|r| r.1).map(|r| r.0).collect(),
        checked_through: results
            .iter()
            .map(|r| i64::from(u.cap()) - i64::from(r.2))
            .min()
            .unwrap_or(i64::from(u.cap())),
    }
}
