//! Float scalars for compiled polynomial evaluation, including dual numbers
//! for exact first derivatives.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Real-like scalar supported by [`CompiledPoly`](super::CompiledPoly).
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + From<f64>
{
    fn value(self) -> f64;
}

impl Scalar for f64 {
    fn value(self) -> f64 {
        self
    }
}

/// `re + eps·ε` with ε² = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub re: f64,
    pub eps: f64,
}

impl Dual {
    pub fn new(re: f64, eps: f64) -> Self {
        Dual { re, eps }
    }

    /// The independent variable at `x`.
    pub fn var(x: f64) -> Self {
        Dual { re: x, eps: 1.0 }
    }
}

impl From<f64> for Dual {
    fn from(re: f64) -> Self {
        Dual { re, eps: 0.0 }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        let q = self.re / o.re;
        Dual::new(q, (self.eps - q * o.eps) / o.re)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.re, -self.eps)
    }
}

impl Scalar for Dual {
    fn value(self) -> f64 {
        self.re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_rule() {
        let x = Dual::var(2.0);
        let f = (x * x + Dual::from(1.0)) / (x - Dual::from(1.0));
        // f = (x²+1)/(x−1), f' = (x²−2x−1)/(x−1)²
        assert!((f.re - 5.0).abs() < 1e-15);
        assert!((f.eps - (-1.0)).abs() < 1e-15);
    }
}
