//! Sparse bivariate polynomials over an exact coefficient ring.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::One;

use super::param::ParamPoly;
use super::ring::{format_rational, parse_rational, rational_to_f64, Field, Rational, Ring};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Monomial order used by [`BiPoly::divide`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MonomialOrder {
    /// Total degree first, ties broken by the larger power of x.
    #[default]
    GradedLex,
    /// Pure lexicographic with x > y.
    Lex,
    /// Pure lexicographic with y > x.
    LexYFirst,
}

impl MonomialOrder {
    fn cmp(self, a: (u32, u32), b: (u32, u32)) -> Ordering {
        match self {
            MonomialOrder::GradedLex => (a.0 + a.1, a.0).cmp(&(b.0 + b.1, b.0)),
            MonomialOrder::Lex => a.cmp(&b),
            MonomialOrder::LexYFirst => (a.1, a.0).cmp(&(b.1, b.0)),
        }
    }
}

/// `Σ c_ij x^i y^j` with no stored zero coefficients.
#[derive(Clone, PartialEq)]
pub struct BiPoly<C: Ring = Rational> {
    terms: BTreeMap<(u32, u32), C>,
}

impl<C: Ring> Default for BiPoly<C> {
    fn default() -> Self {
        BiPoly { terms: BTreeMap::new() }
    }
}

impl<C: Ring> BiPoly<C> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn x() -> Self {
        Self::monomial(C::one(), 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(C::one(), 0, 1)
    }

    pub fn monomial(c: C, i: u32, j: u32) -> Self {
        let mut p = Self::default();
        p.add_term(i, j, c);
        p
    }

    /// Builds a polynomial from (i, j, c) terms; repeated exponents are summed.
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, C)>) -> Self {
        let mut p = Self::default();
        for (i, j, c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    /// Adds `c·x^i y^j` in place.
    pub fn add_term(&mut self, i: u32, j: u32, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((i, j)) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending (i, j) order.
    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, &C)> {
        self.terms.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn coeff(&self, i: u32, j: u32) -> C {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(C::zero)
    }

    /// Total degree; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    /// Lowest total degree of a stored term; `None` for the zero polynomial.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|(i, j)| i + j).min()
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut p = Self::default();
        for (&(i, j), a) in &self.terms {
            p.add_term(i, j, a.clone() * c);
        }
        p
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn dx(&self) -> Self {
        let mut p = Self::default();
        for (&(i, j), c) in &self.terms {
            if i > 0 {
                p.add_term(i - 1, j, c.clone() * &C::from_int(i as i64));
            }
        }
        p
    }

    pub fn dy(&self) -> Self {
        let mut p = Self::default();
        for (&(i, j), c) in &self.terms {
            if j > 0 {
                p.add_term(i, j - 1, c.clone() * &C::from_int(j as i64));
            }
        }
        p
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous(&self, d: u32) -> Self {
        Self::from_terms(
            self.terms()
                .filter(|(i, j, _)| i + j == d)
                .map(|(i, j, c)| (i, j, c.clone())),
        )
    }

    pub fn map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> D) -> BiPoly<D> {
        BiPoly::from_terms(self.terms().map(|(i, j, c)| (i, j, f(c))))
    }

    /// Fallible coefficient map.
    pub fn try_map_coeffs<D: Ring>(&self, f: impl Fn(&C) -> Result<D>) -> Result<BiPoly<D>> {
        let mut out = BiPoly::zero();
        for (i, j, c) in self.terms() {
            out.add_term(i, j, f(c)?);
        }
        Ok(out)
    }

    /// Horner evaluation in any ring that receives the coefficients through `lift`.
    pub fn eval_with<T: Ring>(&self, x: &T, y: &T, lift: impl Fn(&C) -> T) -> T {
        // p = Σ_i x^i r_i(y); rows are visited from the highest x power down.
        let mut rows: BTreeMap<u32, Vec<(u32, &C)>> = BTreeMap::new();
        for (&(i, j), c) in &self.terms {
            rows.entry(i).or_default().push((j, c));
        }
        let mut acc = T::zero();
        let mut prev: Option<u32> = None;
        for (&i, row) in rows.iter().rev() {
            if let Some(p) = prev {
                for _ in i..p {
                    acc = acc * x;
                }
            }
            acc = acc + &horner_row(row, y, &lift);
            prev = Some(i);
        }
        if let Some(p) = prev {
            for _ in 0..p {
                acc = acc * x;
            }
        }
        acc
    }

    /// Substitutes `x → x + x0`, `y → y + y0`.
    pub fn translate(&self, x0: &C, y0: &C) -> Self {
        let xs = &Self::x() + &Self::constant(x0.clone());
        let ys = &Self::y() + &Self::constant(y0.clone());
        self.compose(&xs, &ys)
    }

    /// `p(a(x,y), b(x,y))`.
    pub fn compose(&self, a: &Self, b: &Self) -> Self {
        self.eval_with_poly(a, b)
    }

    fn eval_with_poly(&self, a: &Self, b: &Self) -> Self {
        let mut rows: BTreeMap<u32, Vec<(u32, &C)>> = BTreeMap::new();
        for (&(i, j), c) in &self.terms {
            rows.entry(i).or_default().push((j, c));
        }
        let mut acc = Self::zero();
        let mut prev: Option<u32> = None;
        for (&i, row) in rows.iter().rev() {
            if let Some(p) = prev {
                for _ in i..p {
                    acc = &acc * a;
                }
            }
            let mut r = Self::zero();
            let mut pj: Option<u32> = None;
            let mut sorted = row.clone();
            sorted.sort_by_key(|t| std::cmp::Reverse(t.0));
            for (j, c) in sorted {
                if let Some(q) = pj {
                    for _ in j..q {
                        r = &r * b;
                    }
                }
                r = &r + &Self::constant(c.clone());
                pj = Some(j);
            }
            if let Some(q) = pj {
                for _ in 0..q {
                    r = &r * b;
                }
            }
            acc = &acc + &r;
            prev = Some(i);
        }
        if let Some(p) = prev {
            for _ in 0..p {
                acc = &acc * a;
            }
        }
        acc
    }

    fn leading(&self, order: MonomialOrder) -> Option<((u32, u32), &C)> {
        self.terms
            .iter()
            .max_by(|a, b| order.cmp(*a.0, *b.0))
            .map(|(k, c)| (*k, c))
    }

    /// Rejects polynomials above `limit` in total degree.
    pub fn check_degree(&self, limit: u32) -> Result<()> {
        let degree = self.degree();
        if degree > limit {
            Err(Error::DegreeLimit { degree, limit })
        } else {
            Ok(())
        }
    }
}

fn horner_row<C: Ring, T: Ring>(row: &[(u32, &C)], y: &T, lift: &impl Fn(&C) -> T) -> T {
    let mut acc = T::zero();
    let mut prev: Option<u32> = None;
    for &(j, c) in row.iter().rev() {
        if let Some(p) = prev {
            for _ in j..p {
                acc = acc * y;
            }
        }
        acc = acc + &lift(c);
        prev = Some(j);
    }
    if let Some(p) = prev {
        for _ in 0..p {
            acc = acc * y;
        }
    }
    acc
}

impl<C: Field> BiPoly<C> {
    /// Multivariate division by a single divisor under `order`:
    /// `self = quotient·divisor + remainder`, where no term of the remainder
    /// is divisible by the leading monomial of the divisor.
    pub fn divide(&self, divisor: &Self, order: MonomialOrder) -> Result<(Self, Self)> {
        let ((di, dj), dc) = divisor.leading(order).ok_or(Error::DivisionByZero)?;
        let dc = dc.clone();
        let mut rest = self.clone();
        let mut quotient = Self::zero();
        let mut remainder = Self::zero();
        while let Some(((i, j), c)) = rest.leading(order) {
            let c = c.clone();
            if i >= di && j >= dj {
                let t = Self::monomial(c / &dc, i - di, j - dj);
                rest = &rest - &(&t * divisor);
                quotient = &quotient + &t;
            } else {
                rest.terms.remove(&(i, j));
                remainder.add_term(i, j, c);
            }
        }
        Ok((quotient, remainder))
    }

    /// Quotient when `divisor` divides `self` exactly, `None` otherwise.
    pub fn divide_exact(&self, divisor: &Self) -> Result<Option<Self>> {
        let (q, r) = self.divide(divisor, MonomialOrder::GradedLex)?;
        Ok(r.is_zero().then_some(q))
    }
}

impl BiPoly<Rational> {
    /// Exact value at a rational point.
    pub fn eval_exact(&self, x: &Rational, y: &Rational) -> Rational {
        self.eval_with(x, y, |c| c.clone())
    }

    /// Float value at a float point (coefficients rounded once).
    pub fn eval_f64(&self, x: f64, y: f64) -> f64 {
        CompiledPoly::new(self).eval(x, y)
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly::new(self)
    }

    /// Serialized form: `[i, j, "num/den"]` triples in ascending (i, j) order.
    pub fn to_triples(&self) -> Vec<(u32, u32, String)> {
        self.terms().map(|(i, j, c)| (i, j, format_rational(c))).collect()
    }

    pub fn from_triples(triples: &[(u32, u32, String)]) -> Result<Self> {
        let mut p = Self::zero();
        for (i, j, c) in triples {
            p.add_term(*i, *j, parse_rational(c)?);
        }
        Ok(p)
    }
}

impl BiPoly<ParamPoly> {
    /// Replaces every parameter by its rational value.
    pub fn substitute(&self, values: &BTreeMap<String, Rational>) -> Result<BiPoly<Rational>> {
        self.try_map_coeffs(|c| c.evaluate(values))
    }

    /// Parameters that occur in some coefficient.
    pub fn symbols(&self) -> Vec<String> {
        let mut names: Vec<String> = self.terms().flat_map(|(_, _, c)| c.symbols()).collect();
        names.sort();
        names.dedup();
        names
    }
}

/// Lifts a rational polynomial to parametric coefficients.
pub fn lift_params(p: &BiPoly<Rational>) -> BiPoly<ParamPoly> {
    p.map_coeffs(ParamPoly::from_rational)
}

impl<'a, C: Ring> Add<&'a BiPoly<C>> for &'a BiPoly<C> {
    type Output = BiPoly<C>;
    fn add(self, o: &BiPoly<C>) -> BiPoly<C> {
        let mut p = self.clone();
        for (&(i, j), c) in &o.terms {
            p.add_term(i, j, c.clone());
        }
        p
    }
}

impl<'a, C: Ring> Sub<&'a BiPoly<C>> for &'a BiPoly<C> {
    type Output = BiPoly<C>;
    fn sub(self, o: &BiPoly<C>) -> BiPoly<C> {
        let mut p = self.clone();
        for (&(i, j), c) in &o.terms {
            p.add_term(i, j, -c.clone());
        }
        p
    }
}

impl<'a, C: Ring> Mul<&'a BiPoly<C>> for &'a BiPoly<C> {
    type Output = BiPoly<C>;
    fn mul(self, o: &BiPoly<C>) -> BiPoly<C> {
        let mut p = BiPoly::default();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &o.terms {
                p.add_term(i + k, j + l, a.clone() * b);
            }
        }
        p
    }
}

impl<C: Ring> Neg for &BiPoly<C> {
    type Output = BiPoly<C>;
    fn neg(self) -> BiPoly<C> {
        BiPoly {
            terms: self.terms.iter().map(|(k, c)| (*k, -c.clone())).collect(),
        }
    }
}

impl<C: Ring> Add for BiPoly<C> {
    type Output = BiPoly<C>;
    fn add(self, o: BiPoly<C>) -> BiPoly<C> {
        &self + &o
    }
}

impl<C: Ring> Sub for BiPoly<C> {
    type Output = BiPoly<C>;
    fn sub(self, o: BiPoly<C>) -> BiPoly<C> {
        &self - &o
    }
}

impl<C: Ring> Mul for BiPoly<C> {
    type Output = BiPoly<C>;
    fn mul(self, o: BiPoly<C>) -> BiPoly<C> {
        &self * &o
    }
}

impl<C: Ring> Neg for BiPoly<C> {
    type Output = BiPoly<C>;
    fn neg(self) -> BiPoly<C> {
        -&self
    }
}

impl<C: Ring> fmt::Display for BiPoly<C> {
    /// Terms by descending graded order, e.g. `x^3 - x^2 + y^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&(u32, u32)> = self.terms.keys().collect();
        keys.sort_by(|a, b| MonomialOrder::GradedLex.cmp(**b, **a));
        let mut out = String::new();
        for (n, k) in keys.into_iter().enumerate() {
            let c = &self.terms[k];
            let text = c.to_string();
            let compound = text.contains(' ') || text.contains('+');
            let (neg, body) = match text.strip_prefix('-') {
                Some(rest) if !compound => (true, rest.to_string()),
                _ => (false, if compound { format!("({text})") } else { text }),
            };
            let mono = match k {
                (0, 0) => String::new(),
                (i, 0) => pow_str("x", *i),
                (0, j) => pow_str("y", *j),
                (i, j) => format!("{}*{}", pow_str("x", *i), pow_str("y", *j)),
            };
            let term = if mono.is_empty() {
                body
            } else if body == "1" {
                mono
            } else {
                format!("{body}*{mono}")
            };
            if n == 0 {
                out.push_str(if neg { "-" } else { "" });
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        write!(f, "{out}")
    }
}

fn pow_str(v: &str, e: u32) -> String {
    if e == 1 {
        v.to_string()
    } else {
        format!("{v}^{e}")
    }
}

impl<C: Ring> fmt::Debug for BiPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiPoly({self})")
    }
}

/// Float image of a rational polynomial, stored as dense rows
/// `rows[i][j] = c_ij` for nested Horner evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    rows: Vec<Vec<f64>>,
}

impl CompiledPoly {
    pub fn new(p: &BiPoly<Rational>) -> Self {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, j, c) in p.terms() {
            let (i, j) = (i as usize, j as usize);
            if rows.len() <= i {
                rows.resize(i + 1, Vec::new());
            }
            if rows[i].len() <= j {
                rows[i].resize(j + 1, 0.0);
            }
            rows[i][j] = rational_to_f64(c);
        }
        CompiledPoly { rows }
    }

    pub fn eval_generic<T: Scalar>(&self, x: T, y: T) -> T {
        let mut acc = T::from(0.0);
        for row in self.rows.iter().rev() {
            let mut r = T::from(0.0);
            for &c in row.iter().rev() {
                r = r * y + T::from(c);
            }
            acc = acc * x + r;
        }
        acc
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_generic(x, y)
    }
}

/// Shorthand for building rational polynomials from integer-ratio terms.
pub fn poly(terms: &[(u32, u32, i64, i64)]) -> BiPoly<Rational> {
    BiPoly::from_terms(terms.iter().map(|&(i, j, n, d)| (i, j, super::ring::rat(n, d))))
}

impl<C: Ring> BiPoly<C> {
    /// Terms sorted by descending graded order (for reports).
    pub fn graded_terms(&self) -> Vec<(u32, u32, C)> {
        let mut v: Vec<(u32, u32, C)> = self.terms().map(|(i, j, c)| (i, j, c.clone())).collect();
        v.sort_by(|a, b| MonomialOrder::GradedLex.cmp((b.0, b.1), (a.0, a.1)));
        v
    }
}

impl<C: Ring> BiPoly<C>
where
    C: One,
{
    /// `x^i y^j` with unit coefficient.
    pub fn xy(i: u32, j: u32) -> Self {
        Self::monomial(C::one(), i, j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ring::{int, rat};

    fn f_ex2() -> BiPoly {
        // y² − (1−x)²(1+x) = y² − 1 + x + x² − x³
        poly(&[(0, 2, 1, 1), (0, 0, -1, 1), (1, 0, 1, 1), (2, 0, 1, 1), (3, 0, -1, 1)])
    }

    #[test]
    fn exact_division_by_constructed_factor() {
        let r2 = poly(&[(2, 0, 1, 1), (0, 2, 1, 1)]);
        let v = &r2 * &f_ex2();
        let (q, r) = v.divide(&f_ex2(), MonomialOrder::GradedLex).unwrap();
        assert_eq!(q, r2);
        assert!(r.is_zero());
    }

    #[test]
    fn single_step_division() {
        let f = poly(&[(0, 2, 1, 1), (2, 0, -1, 1), (3, 0, 1, 1)]);
        let (q, r) = f.divide(&BiPoly::y(), MonomialOrder::GradedLex).unwrap();
        assert_eq!(q, BiPoly::y());
        assert_eq!(r, poly(&[(2, 0, -1, 1), (3, 0, 1, 1)]));
    }

    #[test]
    fn inexact_division_and_zero_divisor() {
        let p = poly(&[(2, 0, 1, 1), (0, 2, 1, 1)]);
        let d = poly(&[(1, 0, 1, 1), (0, 0, 1, 1)]);
        assert!(p.divide_exact(&d).unwrap().is_none());
        assert_eq!(
            p.divide(&BiPoly::zero(), MonomialOrder::GradedLex),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn evaluation_matches_expectations() {
        let f = poly(&[(0, 2, 1, 1), (2, 0, -1, 1), (3, 0, 1, 1)]);
        assert_eq!(f.eval_exact(&int(0), &int(0)), int(0));
        assert_eq!(f.eval_exact(&int(1), &int(0)), int(0));
        assert_eq!(f.eval_exact(&rat(1, 2), &int(1)), rat(7, 8));
        assert!((f.eval_f64(0.5, 1.0) - 0.875).abs() < 1e-15);
    }

    #[test]
    fn translation_and_derivatives() {
        let f = f_ex2();
        let g = f.translate(&int(1), &int(0));
        // f(x+1, y) = y² + 4x² + x³ ... check values instead of expanding by hand
        for (a, b) in [(rat(1, 3), rat(-2, 5)), (int(2), int(7))] {
            assert_eq!(g.eval_exact(&a, &b), f.eval_exact(&(a.clone() + int(1)), &b));
        }
        assert_eq!(f.dx(), poly(&[(0, 0, 1, 1), (1, 0, 2, 1), (2, 0, -3, 1)]));
        assert_eq!(f.dy(), poly(&[(0, 1, 2, 1)]));
    }

    #[test]
    fn display_is_readable() {
        let f = poly(&[(0, 2, 1, 1), (2, 0, -1, 1), (3, 0, 1, 1), (0, 0, -1, 2)]);
        assert_eq!(f.to_string(), "x^3 - x^2 + y^2 - 1/2");
    }
}
