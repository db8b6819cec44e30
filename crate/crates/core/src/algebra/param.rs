//! Polynomials in named symbolic parameters with rational coefficients.
//!
//! Used as the coefficient ring of [`BiPoly`](super::BiPoly) when a family of
//! systems (e.g. depending on λ, m₁, m₂) must be certified for all parameter
//! values at once.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::ring::{format_rational, Rational, Ring};
use crate::error::{Error, Result};

/// Sorted list of (parameter name, exponent ≥ 1).
pub type ParamMonomial = Vec<(String, u32)>;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ParamPoly {
    terms: BTreeMap<ParamMonomial, Rational>,
}

fn mono_mul(a: &ParamMonomial, b: &ParamMonomial) -> ParamMonomial {
    let mut map: BTreeMap<String, u32> = a.iter().cloned().collect();
    for (v, e) in b {
        *map.entry(v.clone()).or_insert(0) += e;
    }
    map.into_iter().collect()
}

impl ParamPoly {
    pub fn constant(c: Rational) -> Self {
        let mut p = ParamPoly::default();
        p.add_term(Vec::new(), c);
        p
    }

    pub fn symbol(name: &str) -> Self {
        let mut p = ParamPoly::default();
        p.add_term(vec![(name.to_string(), 1)], Rational::one());
        p
    }

    fn add_term(&mut self, m: ParamMonomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ParamMonomial, &Rational)> {
        self.terms.iter()
    }

    /// Parameter names occurring in the polynomial.
    pub fn symbols(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .terms
            .keys()
            .flat_map(|m| m.iter().map(|(v, _)| v.clone()))
            .collect();
        names.sort();
        names.dedup();
        names
    }

    /// Total degree in the parameters.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|(_, e)| e).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    /// Substitutes rational values for every parameter.
    pub fn evaluate(&self, values: &BTreeMap<String, Rational>) -> Result<Rational> {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in m {
                let x = values
                    .get(v)
                    .ok_or_else(|| Error::InvalidInput(format!("unbound parameter {v:?}")))?;
                t *= num_traits::pow(x.clone(), *e as usize);
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = ParamPoly::one();
        for _ in 0..e {
            r = r * self;
        }
        r
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut s = format_rational(c);
                for (v, e) in m {
                    if *e == 1 {
                        s.push_str(&format!("*{v}"));
                    } else {
                        s.push_str(&format!("*{v}^{e}"));
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Add<&ParamPoly> for ParamPoly {
    type Output = ParamPoly;
    fn add(mut self, o: &ParamPoly) -> ParamPoly {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
        self
    }
}

impl Add for ParamPoly {
    type Output = ParamPoly;
    fn add(self, o: ParamPoly) -> ParamPoly {
        self + &o
    }
}

impl Sub<&ParamPoly> for ParamPoly {
    type Output = ParamPoly;
    fn sub(mut self, o: &ParamPoly) -> ParamPoly {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), -c.clone());
        }
        self
    }
}

impl Sub for ParamPoly {
    type Output = ParamPoly;
    fn sub(self, o: ParamPoly) -> ParamPoly {
        self - &o
    }
}

impl Mul<&ParamPoly> for ParamPoly {
    type Output = ParamPoly;
    fn mul(self, o: &ParamPoly) -> ParamPoly {
        let mut r = ParamPoly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                r.add_term(mono_mul(ma, mb), ca * cb);
            }
        }
        r
    }
}

impl Mul for ParamPoly {
    type Output = ParamPoly;
    fn mul(self, o: ParamPoly) -> ParamPoly {
        self * &o
    }
}

impl Neg for ParamPoly {
    type Output = ParamPoly;
    fn neg(mut self) -> ParamPoly {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Zero for ParamPoly {
    fn zero() -> Self {
        ParamPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for ParamPoly {
    fn one() -> Self {
        ParamPoly::constant(Rational::one())
    }
}

impl Ring for ParamPoly {
    fn from_rational(r: &Rational) -> Self {
        ParamPoly::constant(r.clone())
    }
}

/// Parses coefficient expressions such as `"-1/2"`, `"lambda*m1"`,
/// `"m2 - m1 + m1*m2"` or `"2*(m1 + 1)^2"`.
pub fn parse_param_expr(src: &str) -> Result<ParamPoly> {
    let tokens = tokenize(src)?;
    let mut parser = Parser { tokens, pos: 0, src };
    let value = parser.expr()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(value)
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            out.push(Token::Num(super::ring::parse_rational(&lit)?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::InvalidInput(format!("unexpected character {c:?} in {src:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> Error {
        Error::InvalidInput(format!("{what} in coefficient expression {:?}", self.src))
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ParamPoly> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc + self.term()?;
            } else if self.eat('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ParamPoly> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc * self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                let d = d.as_constant().ok_or_else(|| self.error("division by a symbol"))?;
                if d.is_zero() {
                    return Err(self.error("division by zero"));
                }
                acc = acc * ParamPoly::constant(Rational::one() / d);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<ParamPoly> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos).cloned() {
                Some(Token::Num(n)) if n.is_integer() && n >= Rational::zero() => {
                    self.pos += 1;
                    let e: u32 = n
                        .to_integer()
                        .try_into()
                        .map_err(|_| self.error("exponent too large"))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(self.error("expected a nonnegative integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ParamPoly> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(n)) => {
                self.pos += 1;
                Ok(ParamPoly::constant(n))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Ok(ParamPoly::symbol(&name))
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("missing ')'"));
                }
                Ok(e)
            }
            _ => Err(self.error("unexpected end or operator")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ring::{int, rat};

    #[test]
    fn expression_parsing_and_evaluation() {
        let p = parse_param_expr("m2 - m1 + m1*m2").unwrap();
        let mut vals = BTreeMap::new();
        vals.insert("m1".to_string(), int(-2));
        vals.insert("m2".to_string(), int(1));
        assert_eq!(p.evaluate(&vals).unwrap(), int(1));
        let q = parse_param_expr("-3/2*(m1+1)^2").unwrap();
        assert_eq!(q.evaluate(&vals).unwrap(), rat(-3, 2));
        assert_eq!(
            parse_param_expr("86579/248832").unwrap().as_constant(),
            Some(rat(86579, 248832))
        );
        assert!(parse_param_expr("m1/m2").is_err());
        assert!(parse_param_expr("(m1").is_err());
    }

    #[test]
    fn cancellation_leaves_zero() {
        let a = parse_param_expr("lambda*m1 + 1").unwrap();
        let b = parse_param_expr("m1*lambda + 1").unwrap();
        assert!((a - b).is_zero());
    }
}
