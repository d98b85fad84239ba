//! Pfaffian (first-order) form of the period system.
//!
//! Matrices are stored in the ∂/∂x convention: `∂_x φ = M_x φ` with
//! `φ_j = θ^{w_j} u`. The θ-form `θ_x φ = x·M_x φ` is available through
//! [`PfaffianSystem::theta_form`].

mod consistency;
mod derive;
mod fixture;
mod integrability;
pub mod linsolve;
mod singular;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{default_var_names, parse_ratfunc, AlgebraError, RatFunc};
use crate::operator::ThetaMono;

pub use consistency::{series_consistency, SeriesConsistency};
pub use derive::{
    build_rewrite_table, derive_pfaffian, extend_to_order_three, monomials_of_order, theta_action, RewriteTable,
};
pub use fixture::{compare_fixture, EntryDiff, FixtureDiff, PfaffianFixture, REFERENCE_JSON, REFERENCE_RAW};
pub use integrability::{check_integrability, IntegrabilityReport, PairResidual};
pub use singular::{singular_factor_analysis, singular_factors, FactorName, SingularReport};

pub type Matrix = Vec<Vec<RatFunc>>;

pub const VARS: [&str; 3] = ["p", "q", "r"];

#[derive(Debug, Error)]
pub enum DeriveError {
    #[error("underdetermined at order {order}: no rule for {missing:?}")]
    Underdetermined { order: u32, missing: Vec<ThetaMono> },
    #[error("inconsistent relations at order {order}: {rows} nonzero residual rows")]
    Inconsistent { order: u32, rows: usize },
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
}

#[derive(Debug, Error)]
pub enum PfaffianError {
    #[error(transparent)]
    Derive(#[from] DeriveError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed system: {0}")]
    Malformed(String),
    #[error("unexpected singular factor(s): {0:?}")]
    UnexpectedFactors(Vec<String>),
}

/// Named choices of basis monomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `1, θp, θq, θr, θp²`.
    P2,
    /// `1, θp, θq, θr, θq²`.
    Q2,
    /// `1, θp, θq, θr, θp², θq²`.
    Rank6,
}

impl Basis {
    pub fn monomials(self) -> Vec<ThetaMono> {
        let mut m = vec![[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]];
        match self {
            Basis::P2 => m.push([2, 0, 0]),
            Basis::Q2 => m.push([0, 2, 0]),
            Basis::Rank6 => m.extend([[2, 0, 0], [0, 2, 0]]),
        }
        m
    }

    pub fn name(self) -> &'static str {
        match self {
            Basis::P2 => "p2",
            Basis::Q2 => "q2",
            Basis::Rank6 => "rank6",
        }
    }
}

impl FromStr for Basis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "p2" => Ok(Basis::P2),
            "q2" => Ok(Basis::Q2),
            "rank6" => Ok(Basis::Rank6),
            _ => Err(format!("unknown basis `{s}` (expected p2, q2 or rank6)")),
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `"1"`, `"θp"`, `"θp^2"`, `"θpθq"`, ...
pub fn mono_name(m: &ThetaMono) -> String {
    if m.iter().all(|&e| e == 0) {
        return "1".into();
    }
    let mut s = String::new();
    for (e, v) in m.iter().zip(VARS) {
        match e {
            0 => {}
            1 => s.push_str(&format!("θ{v}")),
            _ => s.push_str(&format!("θ{v}^{e}")),
        }
    }
    s
}

pub fn parse_mono_name(s: &str) -> Option<ThetaMono> {
    let s = s.trim();
    if s == "1" {
        return Some([0, 0, 0]);
    }
    let mut m = [0u32; 3];
    let mut rest = s;
    while !rest.is_empty() {
        rest = rest.strip_prefix('θ')?;
        let v = rest.chars().next()?;
        let i = VARS.iter().position(|n| n.starts_with(v))?;
        rest = &rest[v.len_utf8()..];
        let mut e = 1;
        if let Some(r) = rest.strip_prefix('^') {
            let end = r.find(|c: char| !c.is_ascii_digit()).unwrap_or(r.len());
            e = r[..end].parse().ok()?;
            rest = &r[end..];
        }
        m[i] += e;
    }
    Some(m)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PfaffianSystem {
    pub basis: Vec<ThetaMono>,
    /// `[M_p, M_q, M_r]`, ∂/∂x convention.
    pub m: [Matrix; 3],
}

#[derive(Serialize, Deserialize)]
struct PfaffianJson {
    basis: Vec<String>,
    #[serde(rename = "Mp")]
    mp: Vec<Vec<String>>,
    #[serde(rename = "Mq")]
    mq: Vec<Vec<String>>,
    #[serde(rename = "Mr")]
    mr: Vec<Vec<String>>,
}

fn matrix_to_strings(m: &Matrix) -> Vec<Vec<String>> {
    let names = default_var_names::<3>();
    m.iter()
        .map(|row| row.iter().map(|f| f.to_canonical_string(&names)).collect())
        .collect()
}

fn matrix_from_strings(m: &[Vec<String>], n: usize) -> Result<Matrix, PfaffianError> {
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(PfaffianError::Malformed(format!("expected a {n}x{n} matrix")));
    }
    m.iter()
        .map(|row| row.iter().map(|s| parse_ratfunc(s).map_err(PfaffianError::from)).collect())
        .collect()
}

impl PfaffianSystem {
    /// Builds the system from θ-action matrices `A_x` by `M_x = A_x / x`.
    pub fn from_theta_form(basis: Vec<ThetaMono>, theta: [Matrix; 3]) -> Self {
        let m = theta.map(|a| a);
        let m: Vec<Matrix> = m
            .into_iter()
            .enumerate()
            .map(|(x, a)| {
                let inv_x = RatFunc::var(x).inv().expect("variable is nonzero");
                a.into_iter()
                    .map(|row| row.into_iter().map(|f| &f * &inv_x).collect())
                    .collect()
            })
            .collect();
        Self {
            basis,
            m: m.try_into().expect("three matrices"),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// `x·M_x`, the matrix of `θ_x` acting on the basis.
    pub fn theta_form(&self, x: usize) -> Matrix {
        let v = RatFunc::var(x);
        self.m[x]
            .iter()
            .map(|row| row.iter().map(|f| f * &v).collect())
            .collect()
    }

    pub fn basis_names(&self) -> Vec<String> {
        self.basis.iter().map(mono_name).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PfaffianJson {
            basis: self.basis_names(),
            mp: matrix_to_strings(&self.m[0]),
            mq: matrix_to_strings(&self.m[1]),
            mr: matrix_to_strings(&self.m[2]),
        })
        .expect("serializable")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self, PfaffianError> {
        let j: PfaffianJson = serde_json::from_str(s)?;
        let basis = j
            .basis
            .iter()
            .map(|b| parse_mono_name(b).ok_or_else(|| PfaffianError::Malformed(format!("basis element `{b}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let n = basis.len();
        Ok(Self {
            basis,
            m: [
                matrix_from_strings(&j.mp, n)?,
                matrix_from_strings(&j.mq, n)?,
                matrix_from_strings(&j.mr, n)?,
            ],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mono_names_round_trip() {
        for k in 0..4 {
            for m in monomials_of_order(k) {
                assert_eq!(parse_mono_name(&mono_name(&m)), Some(m));
            }
        }
        assert_eq!(mono_name(&[2, 0, 0]), "θp^2");
        assert_eq!(mono_name(&[1, 1, 0]), "θpθq");
    }

    #[test]
    fn theta_form_inverts_division() {
        let a: Matrix = vec![vec!["p q".parse().unwrap()]];
        let z: Matrix = vec![vec![RatFunc::zero()]];
        let s = PfaffianSystem::from_theta_form(vec![[0, 0, 0]], [a.clone(), z.clone(), z]);
        assert_eq!(s.m[0][0][0], "q".parse().unwrap());
        assert_eq!(s.theta_form(0), a);
    }

    #[test]
    fn json_round_trip() {
        let a: Matrix = vec![vec!["1/(1 - p)".parse().unwrap(), "q".parse().unwrap()], vec![RatFunc::zero(), RatFunc::one()]];
        let s = PfaffianSystem {
            basis: vec![[0, 0, 0], [1, 0, 0]],
            m: [a.clone(), a.clone(), a],
        };
        let back = PfaffianSystem::from_json_str(&s.to_json_string()).unwrap();
        assert_eq!(back, s);
    }
}
