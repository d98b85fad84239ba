//! Infix parser for polynomials and rational functions.
//!
//! Accepts `+ - * / ^`, parentheses, unary signs, integer literals and
//! juxtaposition as multiplication (`2 p^2 q`, `(p+1)(q-1)`). Identifiers
//! resolve first to variables, then to named symbols.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::poly::{default_var_names, Poly};
use super::ratfunc::RationalFunction;
use super::AlgebraError;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, AlgebraError> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            out.push(Tok::Num(digits.parse().expect("digits")));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(AlgebraError::Parse(format!("unexpected character `{c}` at {i}")));
        }
    }
    Ok(out)
}

struct Parser<'a, const N: usize> {
    toks: Vec<Tok>,
    pos: usize,
    names: &'a [String; N],
    symbols: &'a HashMap<String, RationalFunction<N>>,
}

impl<const N: usize> Parser<'_, N> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn err(&self, what: &str) -> AlgebraError {
        AlgebraError::Parse(format!("{what} at token {}", self.pos))
    }

    fn expr(&mut self) -> Result<RationalFunction<N>, AlgebraError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<RationalFunction<N>, AlgebraError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.eat('/') {
                acc = acc.checked_div(&self.unary()?)?;
            } else if matches!(self.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::Op('('))) {
                acc = &acc * &self.power()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction<N>, AlgebraError> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<RationalFunction<N>, AlgebraError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = if self.eat('-') {
            true
        } else {
            self.eat('+');
            false
        };
        let k = match self.peek() {
            Some(Tok::Num(n)) => u32::try_from(n.clone()).map_err(|_| self.err("exponent too large"))?,
            _ => return Err(self.err("expected integer exponent")),
        };
        self.pos += 1;
        let v = base.pow(k);
        if negative {
            v.inv()
        } else {
            Ok(v)
        }
    }

    fn atom(&mut self) -> Result<RationalFunction<N>, AlgebraError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(RationalFunction::constant(BigRational::from_integer(n)))
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                if let Some(i) = self.names.iter().position(|n| *n == id) {
                    Ok(RationalFunction::var(i))
                } else if let Some(v) = self.symbols.get(&id) {
                    Ok(v.clone())
                } else {
                    Err(AlgebraError::Parse(format!("unknown symbol `{id}`")))
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(v)
            }
            _ => Err(self.err("expected operand")),
        }
    }
}

/// Parses with explicit variable names and a table of named symbols.
pub fn parse_with<const N: usize>(
    s: &str,
    names: &[String; N],
    symbols: &HashMap<String, RationalFunction<N>>,
) -> Result<RationalFunction<N>, AlgebraError> {
    let toks = lex(s)?;
    if toks.is_empty() {
        return Err(AlgebraError::Parse("empty expression".into()));
    }
    let mut parser = Parser {
        toks,
        pos: 0,
        names,
        symbols,
    };
    let v = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(parser.err("trailing input"));
    }
    Ok(v)
}

pub fn parse_ratfunc<const N: usize>(s: &str) -> Result<RationalFunction<N>, AlgebraError> {
    parse_with(s, &default_var_names::<N>(), &HashMap::new())
}

pub fn parse_poly<const N: usize>(s: &str) -> Result<Poly<N>, AlgebraError> {
    let f = parse_ratfunc::<N>(s)?;
    match f.as_poly() {
        Some(p) => Ok(p.clone()),
        None => Err(AlgebraError::NotPolynomial(s.to_string())),
    }
}

impl<const N: usize> std::str::FromStr for Poly<N> {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_poly(s)
    }
}

impl<const N: usize> std::str::FromStr for RationalFunction<N> {
    type Err = AlgebraError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_ratfunc(s)
    }
}
