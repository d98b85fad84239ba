//! Reference matrices and the comparator against derived ones.
//!
//! The reference entries act as `θ_x φ = F_x φ`, so a derived system is
//! compared through `F_x = x·M_x`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{mono_name, Basis, Matrix, PfaffianError, PfaffianSystem, VARS};
use crate::algebra::{default_var_names, parse_poly, parse_ratfunc, parse_with, MultiPoly, RatFunc};

pub const REFERENCE_RAW: &str = include_str!("../../fixtures/reference_raw.txt");
pub const REFERENCE_JSON: &str = include_str!("../../fixtures/reference.json");

pub const CONVENTION: &str = "fixture_x = x * M_x (theta form, rows indexed by the basis)";

#[derive(Clone, Debug, PartialEq)]
pub struct PfaffianFixture {
    pub d: [MultiPoly; 3],
    /// θ-form matrices for `p`, `q`, `r` in the rank-5 `θp²` basis.
    pub entries: [Matrix; 3],
}

#[derive(Serialize, Deserialize)]
struct FixtureJson {
    convention: String,
    basis: Vec<String>,
    d1: String,
    d2: String,
    d3: String,
    p: Vec<Vec<String>>,
    q: Vec<Vec<String>>,
    r: Vec<Vec<String>>,
}

fn malformed(s: impl Into<String>) -> PfaffianError {
    PfaffianError::Malformed(s.into())
}

impl PfaffianFixture {
    /// Parses `name = expression` lines; `d1`, `d2`, `d3` are defined first
    /// and may be used as symbols in the entries `p11` .. `r55`.
    pub fn from_raw(text: &str) -> Result<Self, PfaffianError> {
        let names = default_var_names::<3>();
        let mut symbols: HashMap<String, RatFunc> = HashMap::new();
        let mut cells: HashMap<String, RatFunc> = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, expr) = line
                .split_once('=')
                .ok_or_else(|| malformed(format!("line {}: expected `name = expression`", lineno + 1)))?;
            let name = name.trim().to_string();
            let value = parse_with(expr, &names, &symbols)
                .map_err(|e| malformed(format!("line {} ({name}): {e}", lineno + 1)))?;
            if name.starts_with('d') {
                symbols.insert(name, value);
            } else {
                cells.insert(name, value);
            }
        }
        let d = ["d1", "d2", "d3"].map(|k| {
            symbols
                .get(k)
                .and_then(|f| f.as_poly().cloned())
                .ok_or_else(|| malformed(format!("missing polynomial {k}")))
        });
        let [d1, d2, d3] = d;
        let entries = VARS.map(|v| {
            (1..=5)
                .map(|j| {
                    (1..=5)
                        .map(|k| {
                            cells
                                .get(&format!("{v}{j}{k}"))
                                .cloned()
                                .ok_or_else(|| malformed(format!("missing entry {v}{j}{k}")))
                        })
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Matrix, _>>()
        });
        let [ep, eq, er] = entries;
        Ok(Self {
            d: [d1?, d2?, d3?],
            entries: [ep?, eq?, er?],
        })
    }

    pub fn bundled() -> Self {
        Self::from_json_str(REFERENCE_JSON).expect("bundled fixture is valid")
    }

    pub fn to_json_string(&self) -> String {
        let names = default_var_names::<3>();
        let m = |x: usize| -> Vec<Vec<String>> {
            self.entries[x]
                .iter()
                .map(|row| row.iter().map(|f| f.to_canonical_string(&names)).collect())
                .collect()
        };
        let j = FixtureJson {
            convention: CONVENTION.into(),
            basis: Basis::P2.monomials().iter().map(mono_name).collect(),
            d1: self.d[0].to_canonical_string(&names),
            d2: self.d[1].to_canonical_string(&names),
            d3: self.d[2].to_canonical_string(&names),
            p: m(0),
            q: m(1),
            r: m(2),
        };
        serde_json::to_string_pretty(&j).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self, PfaffianError> {
        let j: FixtureJson = serde_json::from_str(s)?;
        let mat = |m: &[Vec<String>]| -> Result<Matrix, PfaffianError> {
            if m.len() != 5 || m.iter().any(|r| r.len() != 5) {
                return Err(malformed("fixture matrices must be 5x5"));
            }
            m.iter()
                .map(|row| row.iter().map(|s| parse_ratfunc(s).map_err(PfaffianError::from)).collect())
                .collect()
        };
        Ok(Self {
            d: [parse_poly(&j.d1)?, parse_poly(&j.d2)?, parse_poly(&j.d3)?],
            entries: [mat(&j.p)?, mat(&j.q)?, mat(&j.r)?],
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryDiff {
    /// `"p11"` style name, indices 1-based.
    pub name: String,
    pub matches: bool,
    /// `derived / fixture` when it is a constant other than one.
    pub constant_ratio: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixtureDiff {
    pub convention: String,
    pub entries: Vec<EntryDiff>,
    pub mismatches_rows_1_to_4: Vec<String>,
    pub mismatches_row_5: Vec<String>,
}

impl FixtureDiff {
    pub fn rows_1_to_4_match(&self) -> bool {
        self.mismatches_rows_1_to_4.is_empty()
    }
}

/// Entry-by-entry comparison of `x·M_x` with the fixture.
pub fn compare_fixture(sys: &PfaffianSystem, fixture: &PfaffianFixture) -> Result<FixtureDiff, PfaffianError> {
    if sys.basis != Basis::P2.monomials() {
        return Err(malformed("comparison requires the p2 basis (1, θp, θq, θr, θp^2)"));
    }
    let names = default_var_names::<3>();
    let mut entries = Vec::new();
    for (x, v) in VARS.iter().enumerate() {
        let derived = sys.theta_form(x);
        for j in 0..5 {
            for k in 0..5 {
                let (a, b) = (&derived[j][k], &fixture.entries[x][j][k]);
                let matches = a == b;
                let constant_ratio = if matches || a.is_zero() || b.is_zero() {
                    None
                } else {
                    a.checked_div(b)
                        .ok()
                        .and_then(|q| q.as_poly().and_then(|p| p.constant_value()).map(|_| q.to_pretty_string(&names)))
                };
                entries.push(EntryDiff {
                    name: format!("{v}{}{}", j + 1, k + 1),
                    matches,
                    constant_ratio,
                });
            }
        }
    }
    let mismatched = |row5: bool| -> Vec<String> {
        entries
            .iter()
            .filter(|e| !e.matches && (e.name.as_bytes()[1] == b'5') == row5)
            .map(|e| e.name.clone())
            .collect()
    };
    Ok(FixtureDiff {
        convention: CONVENTION.into(),
        mismatches_rows_1_to_4: mismatched(false),
        mismatches_row_5: mismatched(true),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pfaffian::singular::{D1, D2, D3};

    #[test]
    fn raw_text_parses_and_matches_bundled_json() {
        let raw = PfaffianFixture::from_raw(REFERENCE_RAW).unwrap();
        assert_eq!(raw, PfaffianFixture::bundled());
    }

    #[test]
    fn divisor_polynomials_are_term_for_term() {
        let f = PfaffianFixture::bundled();
        for (d, s) in f.d.iter().zip([D1, D2, D3]) {
            assert_eq!(*d, s.parse::<MultiPoly>().unwrap());
        }
    }

    #[test]
    fn structural_entries() {
        let f = PfaffianFixture::bundled();
        let one = RatFunc::one();
        assert_eq!(f.entries[0][0][1], one);
        assert_eq!(f.entries[0][1][4], one);
        assert_eq!(f.entries[1][0][2], one);
        assert_eq!(f.entries[2][0][3], one);
        assert_eq!(&f.entries[0][0][1] * &f.entries[1][0][2], one);
    }

    #[test]
    #[ignore = "regenerates fixtures/reference.json from the raw text"]
    fn write_bundled_json() {
        let raw = PfaffianFixture::from_raw(REFERENCE_RAW).unwrap();
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/reference.json");
        std::fs::write(path, raw.to_json_string() + "\n").unwrap();
    }
}
