use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::{PfaffianError, PfaffianSystem};
use crate::algebra::{default_var_names, IntPoly, MultiPoly};

pub const D1: &str = "-q^4 + 2 p q^4 - 4 q^2 r + 15 p q^2 r - 15 p^2 q^2 r + 6 q^3 r + 12 p r^2 - 36 p^2 r^2 + 24 p^3 r^2 - 81 r^3";
pub const D2: &str = "-q^2 + 2 p q^2 - p^2 q^2 + 4 q^3 - 4 r + 12 p r - 12 p^2 r + 4 p^3 r + 18 q r - 18 p q r + 27 r^2";
pub const D3: &str = "-p^2 q^2 + 4 q^3 + 4 p^3 r - 18 p q r + 27 r^2";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorName {
    P,
    Q,
    R,
    D1,
    D2,
    D3,
}

impl FactorName {
    pub const ALL: [FactorName; 6] = [Self::P, Self::Q, Self::R, Self::D1, Self::D2, Self::D3];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::P => "p",
            Self::Q => "q",
            Self::R => "r",
            Self::D1 => "d1",
            Self::D2 => "d2",
            Self::D3 => "d3",
        }
    }

    pub fn polynomial(self) -> MultiPoly {
        let s = match self {
            Self::P => "p",
            Self::Q => "q",
            Self::R => "r",
            Self::D1 => D1,
            Self::D2 => D2,
            Self::D3 => D3,
        };
        s.parse().expect("candidate factor parses")
    }
}

impl std::fmt::Display for FactorName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SingularReport {
    pub occurring: BTreeSet<FactorName>,
    /// Primitive non-constant cofactors left after removing all candidates.
    pub unexpected: Vec<String>,
}

impl SingularReport {
    pub fn occurring_names(&self) -> Vec<&'static str> {
        self.occurring.iter().map(|f| f.as_str()).collect()
    }
}

/// Trial-divides every denominator by `p, q, r, d1, d2, d3` and collects
/// the leftovers.
pub fn singular_factor_analysis(sys: &PfaffianSystem) -> SingularReport {
    let candidates: Vec<(FactorName, IntPoly<3>)> =
        FactorName::ALL.iter().map(|&f| (f, f.polynomial().to_int().1)).collect();
    let names = default_var_names::<3>();
    let mut occurring = BTreeSet::new();
    let mut unexpected = BTreeSet::new();
    for f in sys.m.iter().flatten().flatten() {
        let (_, mut cof) = f.denom().to_int();
        for (name, c) in &candidates {
            while let Some(q) = cof.div_exact(c) {
                occurring.insert(*name);
                cof = q;
            }
        }
        if !cof.is_constant() {
            let (_, prim) = cof.primitive();
            unexpected.insert(MultiPoly::from_int_poly(&prim, &BigRational::one()).to_pretty_string(&names));
        }
    }
    SingularReport {
        occurring,
        unexpected: unexpected.into_iter().collect(),
    }
}

/// Like [`singular_factor_analysis`], but a non-constant cofactor is an
/// error.
pub fn singular_factors(sys: &PfaffianSystem) -> Result<SingularReport, PfaffianError> {
    let rep = singular_factor_analysis(sys);
    if rep.unexpected.is_empty() {
        Ok(rep)
    } else {
        Err(PfaffianError::UnexpectedFactors(rep.unexpected))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::RatFunc;

    fn sys_with(entries: &[&str]) -> PfaffianSystem {
        let row: Vec<RatFunc> = entries.iter().map(|s| s.parse().unwrap()).collect();
        let n = row.len();
        let mut m = vec![vec![RatFunc::zero(); n]; n];
        m[0] = row;
        let z = vec![vec![RatFunc::zero(); n]; n];
        PfaffianSystem {
            basis: (0..n as u32).map(|i| [i, 0, 0]).collect(),
            m: [m, z.clone(), z],
        }
    }

    #[test]
    fn finds_candidates_with_multiplicity() {
        let d3 = FactorName::D3.polynomial().to_pretty_string(&default_var_names());
        let s = sys_with(&["1/(p^2 q)", &format!("r/(({d3})^2)")]);
        let rep = singular_factors(&s).unwrap();
        assert_eq!(rep.occurring_names(), vec!["p", "q", "d3"]);
    }

    #[test]
    fn extra_factor_is_a_hard_failure() {
        let s = sys_with(&["1/(p (1 + p + q))"]);
        assert!(matches!(singular_factors(&s), Err(PfaffianError::UnexpectedFactors(_))));
        let rep = singular_factor_analysis(&s);
        assert_eq!(rep.unexpected.len(), 1);
        assert!(rep.occurring.contains(&FactorName::P));
    }
}
