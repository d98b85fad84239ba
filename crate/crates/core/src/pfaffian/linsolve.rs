//! Fraction-free Gauss-Jordan elimination over ℤ[p, q, r].

use rayon::prelude::*;

use crate::algebra::{int_gcd, IntPoly};

pub type Row = Vec<IntPoly<3>>;

/// Outcome of eliminating the leading `unknowns` columns.
#[derive(Clone, Debug)]
pub struct Elimination {
    /// `(column, row)` for every pivoted unknown column; the row has a
    /// nonzero entry at `column` and zeros in every other unknown column.
    pub pivots: Vec<(usize, Row)>,
    /// Unknown columns without a pivot.
    pub free: Vec<usize>,
    /// Rows left after elimination whose remaining entries are not all zero.
    pub inconsistent: Vec<Row>,
}

/// Divides a row by the gcd of its entries.
pub fn primitive_row(row: &Row) -> Row {
    let mut g: Option<IntPoly<3>> = None;
    for x in row.iter().filter(|x| !x.is_zero()) {
        g = Some(match g {
            None => x.clone(),
            Some(g) => int_gcd(&g, x),
        });
        if g.as_ref().is_some_and(|g| g.is_one()) {
            break;
        }
    }
    match g {
        Some(g) if !g.is_one() => row
            .iter()
            .map(|x| if x.is_zero() { x.clone() } else { x.div_exact(&g).expect("row gcd divides") })
            .collect(),
        _ => row.clone(),
    }
}

fn size_key(x: &IntPoly<3>) -> (u32, usize) {
    (x.total_degree(), x.len())
}

/// `a·row − b·pivot` scaled by `1/gcd(a, b)`, where `a` is the pivot entry
/// and `b` the row entry in `col`.
fn eliminate(row: &Row, pivot: &Row, col: usize) -> Row {
    let a = &pivot[col];
    let b = &row[col];
    let g = int_gcd(a, b);
    let (a1, b1) = if g.is_one() {
        (a.clone(), b.clone())
    } else {
        (a.div_exact(&g).expect("gcd divides"), b.div_exact(&g).expect("gcd divides"))
    };
    let out: Row = row
        .iter()
        .zip(pivot)
        .map(|(x, y)| {
            let left = if x.is_zero() { IntPoly::zero() } else { a1.mul(x) };
            let right = if y.is_zero() { IntPoly::zero() } else { b1.mul(y) };
            left.sub(&right)
        })
        .collect();
    debug_assert!(out[col].is_zero());
    primitive_row(&out)
}

/// Eliminates columns `0..unknowns` of `rows`. Pivots are chosen as the
/// smallest entry (total degree, then term count) in each column.
pub fn solve(rows: Vec<Row>, unknowns: usize) -> Elimination {
    let mut rows: Vec<Row> = rows.par_iter().map(primitive_row).collect();
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    let mut pivots: Vec<(usize, Row)> = Vec::new();
    let mut free = Vec::new();
    for col in 0..unknowns {
        let best = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| !r[col].is_zero())
            .min_by_key(|(_, r)| size_key(&r[col]))
            .map(|(i, _)| i);
        let Some(bi) = best else {
            free.push(col);
            continue;
        };
        let pivot = rows.swap_remove(bi);
        rows = rows
            .into_par_iter()
            .map(|r| if r[col].is_zero() { r } else { eliminate(&r, &pivot, col) })
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect();
        pivots = pivots
            .into_par_iter()
            .map(|(c, r)| if r[col].is_zero() { (c, r) } else { (c, eliminate(&r, &pivot, col)) })
            .collect();
        pivots.push((col, pivot));
    }
    pivots.sort_by_key(|(c, _)| *c);
    Elimination {
        pivots,
        free,
        inconsistent: rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn ip(s: &str) -> IntPoly<3> {
        let p: crate::algebra::MultiPoly = s.parse().unwrap();
        let (c, i) = p.to_int();
        assert!(c.is_integer());
        i.scale(&c.to_integer())
    }

    #[test]
    fn solves_two_by_two() {
        // p x + q y = 1, x - y = r  ⇒  x = (1 + q r)/(p + q)
        let rows = vec![
            vec![ip("p"), ip("q"), ip("-1")],
            vec![ip("1"), ip("-1"), ip("-r")],
        ];
        let e = solve(rows, 2);
        assert!(e.free.is_empty() && e.inconsistent.is_empty());
        let (c, r) = &e.pivots[0];
        assert_eq!(*c, 0);
        assert!(r[1].is_zero());
        // r[0] x + r[2] = 0 with x = (1 + q r)/(p + q)
        let lhs = r[0].mul(&ip("1 + q r")).add(&r[2].mul(&ip("p + q")));
        assert!(lhs.is_zero());
    }

    #[test]
    fn detects_free_columns_and_inconsistency() {
        let rows = vec![vec![ip("p"), ip("p"), ip("1")], vec![ip("q"), ip("q"), ip("1")]];
        let e = solve(rows, 2);
        assert_eq!(e.free, vec![1]);
        assert_eq!(e.inconsistent.len(), 1);
    }

    #[test]
    fn primitive_row_removes_common_factor() {
        let row = vec![ip("2 p^2 + 2 p q"), ip("4 p"), IntPoly::zero()];
        let r = primitive_row(&row);
        assert_eq!(r[1], IntPoly::constant(BigInt::from(2)));
    }
}
