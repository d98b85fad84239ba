//! Multivariate gcd over the integers.
//!
//! The fast path is the heuristic gcd (evaluate one variable at a large
//! integer, recurse, and reconstruct by balanced digit expansion), with every
//! candidate confirmed by exact division. When the heuristic gives up, a
//! recursive primitive pseudo-remainder sequence takes over.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::intpoly::IntPoly;

const HEU_ATTEMPTS: usize = 6;

/// Gcd with positive leading coefficient. `gcd(0, 0) = 0`.
pub fn int_gcd<const N: usize>(f: &IntPoly<N>, g: &IntPoly<N>) -> IntPoly<N> {
    if f.is_zero() {
        return g.primitive_signed();
    }
    if g.is_zero() {
        return f.primitive_signed();
    }
    if f.is_constant() || g.is_constant() {
        let c = f.content().gcd(&g.content());
        return IntPoly::constant(c);
    }
    // Common monomial factor is removed before the heuristic.
    let mf = min_exponents(f);
    let mg = min_exponents(g);
    let mut common = [0u32; N];
    for i in 0..N {
        common[i] = mf[i].min(mg[i]);
    }
    let f = unshift(f, &mf);
    let g = unshift(g, &mg);
    let h = if f.is_constant() || g.is_constant() {
        IntPoly::constant(f.content().gcd(&g.content()))
    } else if f == g {
        f.primitive_signed()
    } else {
        let vars: Vec<usize> = (0..N).collect();
        match heu_gcd(&f, &g, &vars) {
            Some((h, _, _)) => h,
            None => prs_gcd(&f, &g, &vars),
        }
    };
    h.shift(&common).primitive_signed()
}

/// Gcd via the primitive pseudo-remainder sequence only. Exposed so the
/// fallback can be checked against the heuristic path.
pub fn int_gcd_prs<const N: usize>(f: &IntPoly<N>, g: &IntPoly<N>) -> IntPoly<N> {
    let vars: Vec<usize> = (0..N).collect();
    prs_gcd(f, g, &vars).primitive_signed()
}

/// Gcd via the heuristic only; `None` when it gives up.
pub fn int_gcd_heuristic<const N: usize>(f: &IntPoly<N>, g: &IntPoly<N>) -> Option<IntPoly<N>> {
    let vars: Vec<usize> = (0..N).collect();
    heu_gcd(f, g, &vars).map(|(h, _, _)| h.primitive_signed())
}

impl<const N: usize> IntPoly<N> {
    /// Content-preserving sign normalization: positive leading coefficient.
    pub(crate) fn primitive_signed(&self) -> Self {
        if self.leading_coeff().is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }
}

fn min_exponents<const N: usize>(f: &IntPoly<N>) -> [u32; N] {
    let mut m = [u32::MAX; N];
    for (e, _) in f.terms() {
        for i in 0..N {
            m[i] = m[i].min(e[i]);
        }
    }
    if f.is_zero() {
        [0; N]
    } else {
        m
    }
}

fn unshift<const N: usize>(f: &IntPoly<N>, m: &[u32; N]) -> IntPoly<N> {
    if m.iter().all(|&x| x == 0) {
        return f.clone();
    }
    let terms = f
        .terms()
        .iter()
        .map(|(e, c)| {
            let mut g = *e;
            for i in 0..N {
                g[i] -= m[i];
            }
            (g, c.clone())
        })
        .collect();
    IntPoly::from_sorted_unchecked(terms)
}

type GcdTriple<const N: usize> = (IntPoly<N>, IntPoly<N>, IntPoly<N>);

fn heu_gcd<const N: usize>(
    f: &IntPoly<N>,
    g: &IntPoly<N>,
    vars: &[usize],
) -> Option<GcdTriple<N>> {
    if f.is_zero() && g.is_zero() {
        return Some((IntPoly::zero(), IntPoly::zero(), IntPoly::zero()));
    }
    if f.is_zero() {
        let (s, h) = sign_normalize(g);
        return Some((h, IntPoly::zero(), IntPoly::constant(s)));
    }
    if g.is_zero() {
        let (s, h) = sign_normalize(f);
        return Some((h, IntPoly::constant(s), IntPoly::zero()));
    }
    if vars.is_empty() || (f.is_constant() && g.is_constant()) {
        let a = f.leading_coeff();
        let b = g.leading_coeff();
        if f.is_constant() && g.is_constant() {
            let h = a.gcd(&b);
            return Some((
                IntPoly::constant(h.clone()),
                IntPoly::constant(&a / &h),
                IntPoly::constant(&b / &h),
            ));
        }
    }
    if vars.is_empty() {
        // Both must be constants once every variable is evaluated.
        return None;
    }

    let common = f.content().gcd(&g.content());
    let f = f.div_exact_scalar(&common);
    let g = g.div_exact_scalar(&common);

    let f_norm = f.max_norm();
    let g_norm = g.max_norm();
    let b = BigInt::from(2) * (&f_norm).min(&g_norm) + BigInt::from(29);
    let lf = f.leading_coeff().abs();
    let lg = g.leading_coeff().abs();
    let ratio = (&f_norm / &lf).min(&g_norm / &lg);
    let mut x = (&b)
        .min(&(BigInt::from(99) * b.sqrt()))
        .clone()
        .max(BigInt::from(2) * ratio + BigInt::from(4));

    let v = vars[0];
    let rest = &vars[1..];
    for _ in 0..HEU_ATTEMPTS {
        let ff = f.eval_var(v, &x);
        let gg = g.eval_var(v, &x);
        if !ff.is_zero() && !gg.is_zero() {
            if let Some((h, cff, cfg)) = heu_gcd(&ff, &gg, rest) {
                let h = interpolate(&h, &x, v);
                let h = h.primitive().1;
                if let Some(cff_) = f.div_exact(&h) {
                    if let Some(cfg_) = g.div_exact(&h) {
                        return Some((h.scale(&common), cff_, cfg_));
                    }
                }
                let cff = interpolate(&cff, &x, v);
                if let Some(h) = f.div_exact(&cff) {
                    if let Some(cfg_) = g.div_exact(&h) {
                        return Some((h.scale(&common), cff, cfg_));
                    }
                }
                let cfg = interpolate(&cfg, &x, v);
                if let Some(h) = g.div_exact(&cfg) {
                    if let Some(cff_) = f.div_exact(&h) {
                        return Some((h.scale(&common), cff_, cfg));
                    }
                }
            }
        }
        let fourth_root = x.sqrt().sqrt();
        x = BigInt::from(73794) * &x * fourth_root / BigInt::from(27011);
    }
    None
}

fn sign_normalize<const N: usize>(f: &IntPoly<N>) -> (BigInt, IntPoly<N>) {
    if f.leading_coeff().is_negative() {
        (-BigInt::one(), f.neg())
    } else {
        (BigInt::one(), f.clone())
    }
}

/// Balanced base-`x` digit expansion of `h` into powers of `var`.
fn interpolate<const N: usize>(h: &IntPoly<N>, x: &BigInt, var: usize) -> IntPoly<N> {
    let half = x / 2;
    let mut digits: Vec<IntPoly<N>> = Vec::new();
    let mut h = h.clone();
    while !h.is_zero() {
        let g = IntPoly::from_terms(h.terms().iter().map(|(e, c)| {
            let mut r = c.mod_floor(x);
            if r > half {
                r -= x;
            }
            (*e, r)
        }));
        h = h.sub(&g).div_exact_scalar(x);
        digits.push(g);
    }
    let f = IntPoly::from_coefficients_in(var, &digits);
    if f.leading_coeff().is_negative() {
        f.neg()
    } else {
        f
    }
}

/// Recursive primitive PRS gcd. Result is not sign-normalized.
fn prs_gcd<const N: usize>(f: &IntPoly<N>, g: &IntPoly<N>, vars: &[usize]) -> IntPoly<N> {
    if f.is_zero() {
        return g.clone();
    }
    if g.is_zero() {
        return f.clone();
    }
    // Skip variables that occur in neither input.
    let mut vars = vars;
    while let Some(&v) = vars.first() {
        if f.degree_in(v) == 0 && g.degree_in(v) == 0 {
            vars = &vars[1..];
        } else {
            break;
        }
    }
    if vars.is_empty() {
        return IntPoly::constant(f.content().gcd(&g.content()));
    }
    let v = vars[0];
    let rest = &vars[1..];

    let (cf, pf) = content_in(f, v, rest);
    let (cg, pg) = content_in(g, v, rest);
    let c = prs_gcd(&cf, &cg, rest);

    let (mut a, mut b) = if pf.degree_in(v) >= pg.degree_in(v) {
        (pf, pg)
    } else {
        (pg, pf)
    };
    loop {
        if b.degree_in(v) == 0 {
            // b is a nonzero element of the coefficient ring; primitive => unit.
            return c;
        }
        let r = pseudo_rem(&a, &b, v);
        if r.is_zero() {
            break;
        }
        let (_, pr) = content_in(&r, v, rest);
        a = b;
        b = pr;
    }
    c.mul(&b)
}

/// Content with respect to `v` (a polynomial in the remaining variables) and
/// the primitive part.
fn content_in<const N: usize>(f: &IntPoly<N>, v: usize, rest: &[usize]) -> (IntPoly<N>, IntPoly<N>) {
    let coeffs = f.coefficients_in(v);
    let mut c = IntPoly::zero();
    for k in coeffs.iter().filter(|k| !k.is_zero()) {
        c = if c.is_zero() { k.clone() } else { prs_gcd(&c, k, rest) };
        if c.is_one() {
            break;
        }
    }
    if f.leading_coeff().is_negative() != c.leading_coeff().is_negative() {
        c = c.neg();
    }
    let p = f.div_exact(&c).expect("content divides its polynomial");
    (c, p)
}

fn pseudo_rem<const N: usize>(a: &IntPoly<N>, b: &IntPoly<N>, v: usize) -> IntPoly<N> {
    let mut r = a.coefficients_in(v);
    let bc = b.coefficients_in(v);
    let db = bc.len() - 1;
    let lb = bc[db].clone();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        if lr.is_zero() {
            r.pop();
            continue;
        }
        let shift = dr - db;
        for (k, rk) in r.iter_mut().enumerate() {
            *rk = rk.mul(&lb);
            if k >= shift && k - shift < bc.len() {
                *rk = rk.sub(&lr.mul(&bc[k - shift]));
            }
        }
        r.pop();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    IntPoly::from_coefficients_in(v, &r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p3(terms: &[([u32; 3], i64)]) -> IntPoly<3> {
        IntPoly::from_terms(terms.iter().map(|(e, c)| (*e, BigInt::from(*c))))
    }

    #[test]
    fn difference_of_squares() {
        let a = p3(&[([2, 0, 0], 1), ([0, 2, 0], -1)]);
        let b = p3(&[([1, 0, 0], 1), ([0, 1, 0], -1)]);
        assert_eq!(int_gcd(&a, &b), b);
        assert_eq!(int_gcd_prs(&a, &b), b);
    }

    #[test]
    fn coprime_variables() {
        let a = p3(&[([1, 0, 0], 1)]);
        let b = p3(&[([0, 1, 0], 1)]);
        assert!(int_gcd(&a, &b).is_one());
    }

    #[test]
    fn prs_and_heuristic_agree_on_shared_factor() {
        let common = p3(&[([1, 1, 0], 3), ([0, 0, 2], -2), ([0, 0, 0], 7)]);
        let u = p3(&[([2, 0, 1], 1), ([0, 1, 0], 5), ([0, 0, 0], -1)]);
        let w = p3(&[([0, 3, 0], 2), ([1, 0, 1], -4), ([0, 0, 0], 3)]);
        let f = common.mul(&u);
        let g = common.mul(&w);
        let h1 = int_gcd_heuristic(&f, &g).unwrap();
        let h2 = int_gcd_prs(&f, &g);
        assert_eq!(h1, common.primitive_signed());
        assert_eq!(h2, common.primitive_signed());
    }

    #[test]
    fn pseudo_remainder_of_multiple_is_zero() {
        let b = p3(&[([1, 0, 0], 2), ([0, 1, 0], 1)]);
        let a = b.mul(&p3(&[([2, 0, 0], 1), ([0, 0, 1], 3)]));
        assert!(pseudo_rem(&a, &b, 0).is_zero());
    }
}
