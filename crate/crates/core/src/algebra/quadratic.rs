//! Exact arithmetic in a quadratic number field ℚ(√d).
//!
//! Saddles of rational vector fields often have eigenvalues `(t ± √Δ)/2`
//! with Δ not a square. Working in ℚ(√d) keeps normal-form coefficients
//! exact in that case.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ring::{rational_to_f64, Field, Rational, Ring};

/// `a + b·√d` with `d` a squarefree integer different from 1.
/// Rational elements have `b = 0` and `d = 0`.
#[derive(Clone, Debug)]
pub struct Quadratic {
    a: Rational,
    b: Rational,
    d: BigInt,
}

impl Quadratic {
    pub fn rational(a: Rational) -> Self {
        Quadratic {
            a,
            b: Rational::zero(),
            d: BigInt::zero(),
        }
    }

    /// `a + b√d`; `d` is reduced to its squarefree part.
    pub fn new(a: Rational, b: Rational, d: &BigInt) -> Self {
        let (s, k) = squarefree_split(d);
        if k.is_one() || b.is_zero() || k.is_zero() {
            let extra = if k.is_one() {
                b * Rational::from_integer(s)
            } else {
                Rational::zero()
            };
            return Quadratic::rational(a + extra);
        }
        Quadratic {
            a,
            b: b * Rational::from_integer(s),
            d: k,
        }
    }

    /// Square root of a rational, exact in ℚ(√d).
    pub fn sqrt_of(r: &Rational) -> Self {
        // √(n/m) = √(n·m)/m
        let nm = r.numer() * r.denom();
        Quadratic::new(Rational::zero(), Rational::new(BigInt::one(), r.denom().clone()), &nm)
    }

    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    pub fn irrational_part(&self) -> &Rational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_real(&self) -> bool {
        self.b.is_zero() || self.d.is_positive()
    }

    pub fn conjugate(&self) -> Self {
        Quadratic {
            a: self.a.clone(),
            b: -self.b.clone(),
            d: self.d.clone(),
        }
    }

    /// Field norm a² − b²d.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_integer(self.d.clone())
    }

    /// Real value (for d > 0) or real part (d < 0).
    pub fn to_f64(&self) -> f64 {
        let a = rational_to_f64(&self.a);
        if self.b.is_zero() || self.d.is_negative() {
            return a;
        }
        let d = rational_to_f64(&Rational::from_integer(self.d.clone()));
        a + rational_to_f64(&self.b) * d.sqrt()
    }

    /// Imaginary part when d < 0.
    pub fn imag_f64(&self) -> f64 {
        if self.d.is_negative() {
            let d = rational_to_f64(&Rational::from_integer(-self.d.clone()));
            rational_to_f64(&self.b) * d.sqrt()
        } else {
            0.0
        }
    }

    fn common_radicand(&self, other: &Self) -> BigInt {
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, _) => other.d.clone(),
            (_, true) => self.d.clone(),
            _ => {
                assert_eq!(self.d, other.d, "mixing elements of different quadratic fields");
                self.d.clone()
            }
        }
    }

    fn normalized(a: Rational, b: Rational, d: BigInt) -> Self {
        if b.is_zero() {
            Quadratic::rational(a)
        } else {
            Quadratic { a, b, d }
        }
    }
}

/// Writes |d| = s²·k with k squarefree (trial division; corpus radicands are small).
fn squarefree_split(d: &BigInt) -> (BigInt, BigInt) {
    if d.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let sign = if d.is_negative() { -BigInt::one() } else { BigInt::one() };
    let mut rest = d.abs();
    let mut s = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest && p < BigInt::from(1_000_000) {
        let sq = &p * &p;
        while (&rest % &sq).is_zero() {
            rest /= &sq;
            s *= &p;
        }
        p += 1;
    }
    if let Some(r) = exact_isqrt(&rest) {
        s *= r;
        rest = BigInt::one();
    }
    (s, sign * rest)
}

fn exact_isqrt(n: &BigInt) -> Option<BigInt> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl PartialEq for Quadratic {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (self.b.is_zero() || self.d == other.d)
    }
}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = super::ring::format_rational;
        if self.b.is_zero() {
            return write!(f, "{}", show(&self.a));
        }
        let root = format!("√{}", self.d);
        let b = if self.b.is_one() {
            root
        } else if (-self.b.clone()).is_one() {
            format!("-{root}")
        } else {
            format!("({})·{root}", show(&self.b))
        };
        if self.a.is_zero() {
            write!(f, "{b}")
        } else {
            write!(f, "{} + {b}", show(&self.a))
        }
    }
}

impl Add<&Quadratic> for Quadratic {
    type Output = Quadratic;
    fn add(self, o: &Quadratic) -> Quadratic {
        let d = self.common_radicand(o);
        Quadratic::normalized(self.a + &o.a, self.b + &o.b, d)
    }
}

impl Add for Quadratic {
    type Output = Quadratic;
    fn add(self, o: Quadratic) -> Quadratic {
        self + &o
    }
}

impl Sub<&Quadratic> for Quadratic {
    type Output = Quadratic;
    fn sub(self, o: &Quadratic) -> Quadratic {
        let d = self.common_radicand(o);
        Quadratic::normalized(self.a - &o.a, self.b - &o.b, d)
    }
}

impl Sub for Quadratic {
    type Output = Quadratic;
    fn sub(self, o: Quadratic) -> Quadratic {
        self - &o
    }
}

impl Mul<&Quadratic> for Quadratic {
    type Output = Quadratic;
    fn mul(self, o: &Quadratic) -> Quadratic {
        if self.b.is_zero() && o.b.is_zero() {
            return Quadratic::rational(self.a * &o.a);
        }
        let d = self.common_radicand(o);
        if o.b.is_zero() {
            return Quadratic::normalized(self.a * &o.a, self.b * &o.a, d);
        }
        if self.b.is_zero() {
            return Quadratic::normalized(&self.a * &o.a, &self.a * &o.b, d);
        }
        let dr = Rational::from_integer(d.clone());
        let a = &self.a * &o.a + &self.b * &o.b * dr;
        let b = &self.a * &o.b + &self.b * &o.a;
        Quadratic::normalized(a, b, d)
    }
}

impl Mul for Quadratic {
    type Output = Quadratic;
    fn mul(self, o: Quadratic) -> Quadratic {
        self * &o
    }
}

impl Neg for Quadratic {
    type Output = Quadratic;
    fn neg(self) -> Quadratic {
        Quadratic::normalized(-self.a, -self.b, self.d)
    }
}

impl Div<&Quadratic> for Quadratic {
    type Output = Quadratic;
    fn div(self, o: &Quadratic) -> Quadratic {
        assert!(!o.is_zero(), "division by zero in quadratic field");
        if o.b.is_zero() {
            let d = self.d.clone();
            return Quadratic::normalized(self.a / &o.a, self.b / &o.a, d);
        }
        let n = o.norm();
        let num = self * &o.conjugate();
        let d = num.d.clone();
        Quadratic::normalized(num.a / &n, num.b / &n, d)
    }
}

impl Div for Quadratic {
    type Output = Quadratic;
    fn div(self, o: Quadratic) -> Quadratic {
        self / &o
    }
}

impl Zero for Quadratic {
    fn zero() -> Self {
        Quadratic::rational(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for Quadratic {
    fn one() -> Self {
        Quadratic::rational(Rational::one())
    }
}

impl From<u32> for Quadratic {
    fn from(n: u32) -> Self {
        Quadratic::rational(Rational::from_integer(n.into()))
    }
}

impl Ring for Quadratic {
    fn from_rational(r: &Rational) -> Self {
        Quadratic::rational(r.clone())
    }
}

impl Field for Quadratic {
    fn signum_real(&self) -> Option<i32> {
        if !self.is_real() {
            return None;
        }
        let sa = self.a.signum_real().unwrap();
        let sb = self.b.signum_real().unwrap();
        if sb == 0 || sa == sb {
            return Some(if sa == 0 { sb } else { sa });
        }
        if sa == 0 {
            return Some(sb);
        }
        // opposite signs: compare a² with b²d
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * Rational::from_integer(self.d.clone());
        Some(match a2.cmp(&b2d) {
            std::cmp::Ordering::Greater => sa,
            std::cmp::Ordering::Less => sb,
            std::cmp::Ordering::Equal => 0,
        })
    }

    fn to_f64_real(&self) -> Option<f64> {
        self.is_real().then(|| self.to_f64())
    }
}

/// Integer gcd helper re-exported for resonance reduction.
pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}
