//! Exact scalar, polynomial and rational-function arithmetic.

mod eval;
mod gcd;
mod intpoly;
mod parse;
mod poly;
mod ratfunc;
pub mod rational;

pub use eval::CompiledPoly;
pub use gcd::{int_gcd, int_gcd_heuristic, int_gcd_prs};
pub use intpoly::IntPoly;
pub use num_rational::BigRational;
pub use parse::{parse_poly, parse_ratfunc, parse_with};
pub use poly::{default_var_names, rational_to_f64, MultiPoly, Poly};
pub use ratfunc::{RatFunc, RationalFunction, DEFAULT_EVAL_FLOOR};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("gcd of two zero polynomials is undefined")]
    GcdOfZeros,
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator nearly vanishes: |den| = {modulus:e} against term scale {scale:e}")]
    NearSingular { modulus: f64, scale: f64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not a polynomial: {0}")]
    NotPolynomial(String),
}

/// Binary polynomial operations exposed to the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(a: &MultiPoly, b: &MultiPoly, op: PolyOp) -> MultiPoly {
    match op {
        PolyOp::Add => a + b,
        PolyOp::Sub => a - b,
        PolyOp::Mul => a * b,
    }
}

pub fn poly_gcd(a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
    a.gcd(b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn ratfunc_arith(a: &RatFunc, b: &RatFunc, op: RatOp) -> Result<RatFunc, AlgebraError> {
    Ok(match op {
        RatOp::Add => a + b,
        RatOp::Sub => a - b,
        RatOp::Mul => a * b,
        RatOp::Div => a.checked_div(b)?,
    })
}

/// Partial derivative in variable `var` (0 = p, 1 = q, 2 = r).
pub fn partial_derivative(f: &RatFunc, var: usize) -> RatFunc {
    f.derivative(var)
}
