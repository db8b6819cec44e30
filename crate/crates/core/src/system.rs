//! Planar polynomial vector fields ẋ = P(x,y), ẏ = Q(x,y).

use num_traits::Zero;

use crate::algebra::{rational_to_f64, BiPoly, CompiledPoly, Field, Quadratic, Rational, Ring, Scalar};
use crate::error::{Error, Result};
use crate::tolerances;

/// The vector field X = (P, Q) over a coefficient ring (rationals by default,
/// symbolic parameters for family-wide certification).
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarSystem<C: Ring = Rational> {
    pub p: BiPoly<C>,
    pub q: BiPoly<C>,
}

impl<C: Ring> PlanarSystem<C> {
    /// # Panics
    /// When both components are the zero polynomial.
    pub fn new(p: BiPoly<C>, q: BiPoly<C>) -> Self {
        assert!(!(p.is_zero() && q.is_zero()), "vector field is identically zero");
        PlanarSystem { p, q }
    }

    pub fn try_new(p: BiPoly<C>, q: BiPoly<C>) -> Result<Self> {
        if p.is_zero() && q.is_zero() {
            return Err(Error::InvalidInput("vector field is identically zero".into()));
        }
        Ok(PlanarSystem { p, q })
    }

    /// ∂P/∂x + ∂Q/∂y.
    pub fn divergence(&self) -> BiPoly<C> {
        &self.p.dx() + &self.q.dy()
    }

    /// X f = P f_x + Q f_y.
    pub fn lie_derivative(&self, f: &BiPoly<C>) -> BiPoly<C> {
        &(&self.p * &f.dx()) + &(&self.q * &f.dy())
    }

    pub fn degree(&self) -> u32 {
        self.p.degree().max(self.q.degree())
    }

    /// Multiplies the field by a nonzero constant (a time rescaling).
    pub fn scale_time(&self, c: &C) -> Self {
        PlanarSystem {
            p: self.p.scale(c),
            q: self.q.scale(c),
        }
    }
}

/// A point given exactly (rational) or in floating point.
#[derive(Clone, Debug, PartialEq)]
pub enum Point {
    Exact(Rational, Rational),
    Float(f64, f64),
}

impl Point {
    pub fn exact(x: Rational, y: Rational) -> Self {
        Point::Exact(x, y)
    }

    pub fn float(x: f64, y: f64) -> Self {
        Point::Float(x, y)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        match self {
            Point::Exact(x, y) => (rational_to_f64(x), rational_to_f64(y)),
            Point::Float(x, y) => (*x, *y),
        }
    }

    pub fn as_exact(&self) -> Option<(&Rational, &Rational)> {
        match self {
            Point::Exact(x, y) => Some((x, y)),
            Point::Float(..) => None,
        }
    }
}

/// Jacobian of the field at a point with its eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct Jacobian {
    pub entries: [[f64; 2]; 2],
    pub exact: Option<[[Rational; 2]; 2]>,
    /// Exact roots of the characteristic polynomial, real ones ascending.
    pub eigenvalues_exact: Option<[Quadratic; 2]>,
    /// Float eigenvalues as (real, imaginary) parts, real ones ascending.
    pub eigenvalues: [(f64, f64); 2],
}

impl Jacobian {
    pub fn trace(&self) -> f64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn determinant(&self) -> f64 {
        self.entries[0][0] * self.entries[1][1] - self.entries[0][1] * self.entries[1][0]
    }

    /// True when both eigenvalues are real.
    pub fn real_spectrum(&self) -> bool {
        self.eigenvalues[0].1 == 0.0 && self.eigenvalues[1].1 == 0.0
    }
}

/// A verified singular point.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularPoint {
    pub location: Point,
    pub jacobian: Jacobian,
    pub divergence_value: f64,
}

impl SingularPoint {
    pub fn xy(&self) -> (f64, f64) {
        self.location.to_f64()
    }

    /// Both eigenvalues real, nonzero and of opposite sign.
    pub fn is_hyperbolic_saddle(&self) -> bool {
        self.jacobian.real_spectrum() && self.jacobian.determinant() < 0.0
    }
}

/// Float evaluation of a system and its first derivatives.
#[derive(Clone, Debug)]
pub struct CompiledSystem {
    pub p: CompiledPoly,
    pub q: CompiledPoly,
    pub px: CompiledPoly,
    pub py: CompiledPoly,
    pub qx: CompiledPoly,
    pub qy: CompiledPoly,
    pub div: CompiledPoly,
}

impl CompiledSystem {
    pub fn field(&self, x: f64, y: f64) -> (f64, f64) {
        (self.p.eval(x, y), self.q.eval(x, y))
    }

    pub fn field_generic<T: Scalar>(&self, x: T, y: T) -> (T, T) {
        (self.p.eval_generic(x, y), self.q.eval_generic(x, y))
    }

    pub fn jacobian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        [
            [self.px.eval(x, y), self.py.eval(x, y)],
            [self.qx.eval(x, y), self.qy.eval(x, y)],
        ]
    }

    pub fn divergence(&self, x: f64, y: f64) -> f64 {
        self.div.eval(x, y)
    }
}

impl PlanarSystem<Rational> {
    pub fn compiled(&self) -> CompiledSystem {
        CompiledSystem {
            p: self.p.compile(),
            q: self.q.compile(),
            px: self.p.dx().compile(),
            py: self.p.dy().compile(),
            qx: self.q.dx().compile(),
            qy: self.q.dy().compile(),
            div: self.divergence().compile(),
        }
    }

    /// Jacobian matrix at `pt`, exact at rational points.
    pub fn jacobian_at(&self, pt: &Point) -> Jacobian {
        match pt {
            Point::Exact(x, y) => {
                let e = [
                    [self.p.dx().eval_exact(x, y), self.p.dy().eval_exact(x, y)],
                    [self.q.dx().eval_exact(x, y), self.q.dy().eval_exact(x, y)],
                ];
                exact_jacobian(e)
            }
            Point::Float(x, y) => {
                let c = self.compiled();
                float_jacobian(c.jacobian(*x, *y))
            }
        }
    }

    /// Accepts `pt` when P and Q vanish there (exactly for rational points,
    /// within the singular-point tolerance otherwise).
    pub fn verify_singular(&self, pt: &Point) -> Result<SingularPoint> {
        let singular = match pt {
            Point::Exact(x, y) => self.p.eval_exact(x, y).is_zero() && self.q.eval_exact(x, y).is_zero(),
            Point::Float(x, y) => {
                self.p.eval_f64(*x, *y).abs() <= tolerances::SINGULAR_POINT
                    && self.q.eval_f64(*x, *y).abs() <= tolerances::SINGULAR_POINT
            }
        };
        if !singular {
            return Err(Error::NotSingular);
        }
        let jacobian = self.jacobian_at(pt);
        let divergence_value = jacobian.trace();
        Ok(SingularPoint {
            location: pt.clone(),
            jacobian,
            divergence_value,
        })
    }

    /// Cofactor k with X f = k f when f is an invariant curve.
    pub fn invariant_curve_cofactor(&self, f: &BiPoly) -> Option<BiPoly> {
        if f.is_zero() {
            return None;
        }
        self.lie_derivative(f).divide_exact(f).ok().flatten()
    }
}

fn exact_jacobian(e: [[Rational; 2]; 2]) -> Jacobian {
    let tr = &e[0][0] + &e[1][1];
    let det = &e[0][0] * &e[1][1] - &e[0][1] * &e[1][0];
    let disc = &tr * &tr - Rational::from_integer(4.into()) * &det;
    let root = Quadratic::sqrt_of(&disc);
    let half = Rational::new(1.into(), 2.into());
    let t = Quadratic::rational(tr.clone() * &half);
    let r = root * &Quadratic::rational(half);
    let (l1, l2) = (t.clone() - &r, t + &r);
    let eig = if l1.signum_real().is_some() && (l1.to_f64() > l2.to_f64()) {
        [l2, l1]
    } else {
        [l1, l2]
    };
    let float = eig.clone().map(|l| (l.to_f64(), l.imag_f64()));
    let entries = [
        [rational_to_f64(&e[0][0]), rational_to_f64(&e[0][1])],
        [rational_to_f64(&e[1][0]), rational_to_f64(&e[1][1])],
    ];
    Jacobian {
        entries,
        exact: Some(e),
        eigenvalues_exact: Some(eig),
        eigenvalues: float,
    }
}

fn float_jacobian(entries: [[f64; 2]; 2]) -> Jacobian {
    let tr = entries[0][0] + entries[1][1];
    let det = entries[0][0] * entries[1][1] - entries[0][1] * entries[1][0];
    let disc = tr * tr - 4.0 * det;
    let eigenvalues = if disc >= 0.0 {
        let s = disc.sqrt();
        [((tr - s) / 2.0, 0.0), ((tr + s) / 2.0, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [(tr / 2.0, -s / 2.0), (tr / 2.0, s / 2.0)]
    };
    Jacobian {
        entries,
        exact: None,
        eigenvalues_exact: None,
        eigenvalues,
    }
}
