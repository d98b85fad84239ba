//! Floating-point Horner evaluation of exact polynomials.

use num_complex::Complex64;

use super::poly::{rational_to_f64, Poly};

/// Nested Horner scheme: a polynomial in the first remaining variable whose
/// coefficients are compiled polynomials in the later variables.
#[derive(Clone, Debug)]
pub enum CompiledPoly {
    Const(f64),
    Horner {
        var: usize,
        /// `coeffs[k]` multiplies `x_var^k`; trailing entries are nonzero.
        coeffs: Vec<CompiledPoly>,
    },
}

impl CompiledPoly {
    pub fn compile<const N: usize>(p: &Poly<N>) -> Self {
        let terms: Vec<([u32; N], f64)> = p.terms().iter().map(|(e, c)| (*e, rational_to_f64(c))).collect();
        Self::build(&terms, 0)
    }

    fn build<const N: usize>(terms: &[([u32; N], f64)], var: usize) -> Self {
        if terms.is_empty() {
            return CompiledPoly::Const(0.0);
        }
        if var == N {
            return CompiledPoly::Const(terms.iter().map(|t| t.1).sum());
        }
        let deg = terms.iter().map(|(e, _)| e[var]).max().unwrap_or(0) as usize;
        if deg == 0 {
            return Self::build(terms, var + 1);
        }
        let mut buckets: Vec<Vec<([u32; N], f64)>> = vec![Vec::new(); deg + 1];
        for t in terms {
            buckets[t.0[var] as usize].push(*t);
        }
        CompiledPoly::Horner {
            var,
            coeffs: buckets.iter().map(|b| Self::build(b, var + 1)).collect(),
        }
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        match self {
            CompiledPoly::Const(c) => Complex64::new(*c, 0.0),
            CompiledPoly::Horner { var, coeffs } => {
                let x = z[*var];
                let mut acc = Complex64::new(0.0, 0.0);
                for c in coeffs.iter().rev() {
                    acc = acc * x + c.eval(z);
                }
                acc
            }
        }
    }

    /// Value together with the sum of absolute term magnitudes.
    pub fn eval_with_magnitude(&self, z: &[Complex64]) -> (Complex64, f64) {
        match self {
            CompiledPoly::Const(c) => (Complex64::new(*c, 0.0), c.abs()),
            CompiledPoly::Horner { var, coeffs } => {
                let x = z[*var];
                let ax = x.norm();
                let mut acc = Complex64::new(0.0, 0.0);
                let mut mag = 0.0;
                for c in coeffs.iter().rev() {
                    let (v, m) = c.eval_with_magnitude(z);
                    acc = acc * x + v;
                    mag = mag * ax + m;
                }
                (acc, mag)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MultiPoly;

    #[test]
    fn agrees_with_termwise_evaluation() {
        let f: MultiPoly = "3 p^3 q - 2 q^2 r^4 + 7/3 p r + 5".parse().unwrap();
        let z = [Complex64::new(0.3, -0.2), Complex64::new(-1.1, 0.5), Complex64::new(0.7, 0.9)];
        let a = CompiledPoly::compile(&f).eval(&z);
        let b = f.eval_complex(&z);
        assert!((a - b).norm() < 1e-12 * b.norm().max(1.0));
        let (_, m) = CompiledPoly::compile(&f).eval_with_magnitude(&z);
        assert!((m - f.magnitude_complex(&z)).abs() < 1e-12 * m);
    }
}
