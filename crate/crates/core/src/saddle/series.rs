//! Dense bivariate power series truncated at a fixed total degree.

use crate::algebra::{BiPoly, Field};

/// Coefficients of all monomials xⁱyʲ with i + j ≤ `order`, in graded order.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncSeries<F> {
    order: u32,
    c: Vec<F>,
}

fn index(i: u32, j: u32) -> usize {
    let d = (i + j) as usize;
    d * (d + 1) / 2 + j as usize
}

fn size(order: u32) -> usize {
    let n = order as usize + 1;
    n * (n + 1) / 2
}

impl<F: Field> TruncSeries<F> {
    pub fn zero(order: u32) -> Self {
        TruncSeries {
            order,
            c: vec![F::zero(); size(order)],
        }
    }

    pub fn x(order: u32) -> Self {
        let mut s = Self::zero(order);
        s.set(1, 0, F::one());
        s
    }

    pub fn y(order: u32) -> Self {
        let mut s = Self::zero(order);
        s.set(0, 1, F::one());
        s
    }

    pub fn from_poly(p: &BiPoly<F>, order: u32) -> Self {
        let mut s = Self::zero(order);
        for (i, j, c) in p.terms() {
            if i + j <= order {
                s.set(i, j, c.clone());
            }
        }
        s
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn get(&self, i: u32, j: u32) -> &F {
        &self.c[index(i, j)]
    }

    pub fn set(&mut self, i: u32, j: u32, v: F) {
        self.c[index(i, j)] = v;
    }

    /// Nonzero terms (i, j, c) of total degree d.
    pub fn homogeneous(&self, d: u32) -> Vec<(u32, u32, F)> {
        if d > self.order {
            return Vec::new();
        }
        (0..=d)
            .filter_map(|j| {
                let c = self.get(d - j, j);
                (!c.is_zero()).then(|| (d - j, j, c.clone()))
            })
            .collect()
    }

    fn nonzero(&self) -> Vec<(u32, u32, &F)> {
        let mut out = Vec::new();
        for d in 0..=self.order {
            for j in 0..=d {
                let c = self.get(d - j, j);
                if !c.is_zero() {
                    out.push((d - j, j, c));
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a.clone() + b).collect();
        TruncSeries { order: self.order, c }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let c = self.c.iter().zip(&o.c).map(|(a, b)| a.clone() - b).collect();
        TruncSeries { order: self.order, c }
    }

    pub fn scale(&self, k: &F) -> Self {
        TruncSeries {
            order: self.order,
            c: self.c.iter().map(|a| a.clone() * k).collect(),
        }
    }

    /// Product truncated at the common order; zero coefficients are skipped.
    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.order);
        let b = o.nonzero();
        for (i, j, a) in self.nonzero() {
            for &(k, l, c) in &b {
                if i + j + k + l > self.order {
                    continue;
                }
                let t = &mut out.c[index(i + k, j + l)];
                *t = t.clone() + &(a.clone() * c);
            }
        }
        out
    }

    pub fn dx(&self) -> Self {
        let mut out = Self::zero(self.order);
        for (i, j, c) in self.nonzero() {
            if i > 0 {
                out.set(i - 1, j, c.clone() * &F::from_int(i as i64));
            }
        }
        out
    }

    pub fn dy(&self) -> Self {
        let mut out = Self::zero(self.order);
        for (i, j, c) in self.nonzero() {
            if j > 0 {
                out.set(i, j - 1, c.clone() * &F::from_int(j as i64));
            }
        }
        out
    }

    /// `self(z1, z2)` for series without constant terms, by nested Horner.
    pub fn compose(&self, z1: &Self, z2: &Self) -> Self {
        debug_assert!(z1.get(0, 0).is_zero() && z2.get(0, 0).is_zero());
        let mut outer = Self::zero(self.order);
        for i in (0..=self.order).rev() {
            let mut inner = Self::zero(self.order);
            for j in (0..=self.order - i).rev() {
                inner = inner.mul(z2);
                let c = self.get(i, j);
                if !c.is_zero() {
                    inner.c[0] = inner.c[0].clone() + c;
                }
            }
            outer = outer.mul(z1).add(&inner);
        }
        outer
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|c| c.is_zero())
    }

    pub fn to_poly(&self) -> BiPoly<F> {
        BiPoly::from_terms(self.nonzero().into_iter().map(|(i, j, c)| (i, j, c.clone())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{poly, rat, Rational};

    #[test]
    fn product_and_composition_agree_with_polynomials() {
        let a = poly(&[(1, 0, 1, 1), (0, 2, -3, 2), (2, 1, 5, 1)]);
        let b = poly(&[(0, 1, 2, 1), (1, 1, 1, 3)]);
        let order = 12;
        let sa = TruncSeries::from_poly(&a, order);
        let sb = TruncSeries::from_poly(&b, order);
        assert_eq!(sa.mul(&sb).to_poly(), &a * &b);
        assert_eq!(sa.dx().to_poly(), a.dx());
        assert_eq!(sa.dy().to_poly(), a.dy());
        let z1 = poly(&[(1, 0, 1, 1), (0, 2, 1, 1)]);
        let z2 = poly(&[(0, 1, 1, 1), (1, 1, -1, 1)]);
        let composed = TruncSeries::from_poly(&a, order)
            .compose(&TruncSeries::from_poly(&z1, order), &TruncSeries::from_poly(&z2, order));
        assert_eq!(composed.to_poly(), a.compose(&z1, &z2));
    }

    #[test]
    fn truncation_drops_high_degrees() {
        let x: TruncSeries<Rational> = TruncSeries::x(3);
        let x4 = x.mul(&x).mul(&x).mul(&x);
        assert!(x4.is_zero());
        let h = x.scale(&rat(2, 3));
        assert_eq!(h.homogeneous(1), vec![(1, 0, rat(2, 3))]);
    }
}
