//! Built-in systems with known inverse integrating factors and invariant curves.

use crate::algebra::{int, parse_param_expr, poly, BiPoly, ParamPoly, Rational};
use crate::error::{Error, Result};
use crate::iif::InverseIntegratingFactor;
use crate::system::PlanarSystem;

fn pp(terms: &[(u32, u32, &str)]) -> BiPoly<ParamPoly> {
    BiPoly::from_terms(
        terms
            .iter()
            .map(|&(i, j, e)| (i, j, parse_param_expr(e).expect("corpus expression"))),
    )
}

/// Cubic family with parameters `lambda`, `m1`, `m2` whose inverse integrating
/// factor `(x²+y²)(1 + m1 x² + m1 m2 y²)` vanishes on an ellipse.
pub fn ellipse_family_parametric() -> (PlanarSystem<ParamPoly>, BiPoly<ParamPoly>) {
    let p = pp(&[
        (1, 0, "lambda"),
        (0, 1, "-1"),
        (3, 0, "lambda*m1"),
        (2, 1, "m2 - m1 + m1*m2"),
        (1, 2, "lambda*m1*m2"),
        (0, 3, "m2"),
    ]);
    let q = pp(&[
        (1, 0, "1"),
        (0, 1, "lambda"),
        (3, 0, "-1"),
        (2, 1, "lambda*m1"),
        (1, 2, "m1*m2 - m1 - 1"),
        (0, 3, "lambda*m1*m2"),
    ]);
    let v = pp(&[
        (2, 0, "1"),
        (0, 2, "1"),
        (4, 0, "m1"),
        (2, 2, "m1*m2 + m1"),
        (0, 4, "m1*m2"),
    ]);
    (PlanarSystem { p, q }, v)
}

/// The ellipse family at fixed parameter values, with V and the ellipse
/// `1 + m1 x² + m1 m2 y²`.
pub fn ellipse_family(
    lambda: &Rational,
    m1: &Rational,
    m2: &Rational,
) -> (PlanarSystem, InverseIntegratingFactor, BiPoly) {
    let mut values = std::collections::BTreeMap::new();
    values.insert("lambda".to_string(), lambda.clone());
    values.insert("m1".to_string(), m1.clone());
    values.insert("m2".to_string(), m2.clone());
    let (sys, v) = ellipse_family_parametric();
    let sys = PlanarSystem::new(sys.p.substitute(&values).unwrap(), sys.q.substitute(&values).unwrap());
    let ellipse = BiPoly::from_terms([(0, 0, int(1)), (2, 0, m1.clone()), (0, 2, m1.clone() * m2)]);
    let r2 = poly(&[(2, 0, 1, 1), (0, 2, 1, 1)]);
    let iif =
        InverseIntegratingFactor::from_factors(vec![(r2, 1), (ellipse.clone(), 1)], BiPoly::one()).expect("nonzero");
    debug_assert_eq!(iif.v, v.substitute(&values).unwrap());
    (sys, iif, ellipse)
}

/// `y² − (1−x)²(1+x)`: an oval for −1 ≤ x ≤ 1 with a double point at (1,0).
pub fn nodal_cubic() -> BiPoly {
    poly(&[(0, 2, 1, 1), (0, 0, -1, 1), (1, 0, 1, 1), (2, 0, 1, 1), (3, 0, -1, 1)])
}

/// System with first integral built from `f = nodal_cubic()`, auxiliary
/// polynomials g, q and exponent m ≥ 1; V = (x²+y²) f^m q.
pub fn nodal_loop_family(m: u32, g: &BiPoly, q: &BiPoly) -> Result<(PlanarSystem, InverseIntegratingFactor)> {
    if m == 0 {
        return Err(Error::InvalidInput("the loop multiplicity m must be at least 1".into()));
    }
    let f = nodal_cubic();
    let r2 = poly(&[(2, 0, 1, 1), (0, 2, 1, 1)]);
    let bracket = &g.scale(&int(1 - m as i64)) + &f.pow(m - 1);
    let fm = f.pow(m);
    let two = int(2);
    let x_plus_y = poly(&[(1, 0, 1, 1), (0, 1, 1, 1)]);
    let x_minus_y = poly(&[(1, 0, 1, 1), (0, 1, -1, 1)]);
    let p = -&(&(&(&(&bracket * &f.dy()) + &(&f * &g.dy())) * &r2) * q)
        - (&fm * &(&(&x_plus_y * q).scale(&two) + &(&r2 * &q.dy())));
    let qq = &(&(&(&(&bracket * &f.dx()) + &(&f * &g.dx())) * &r2) * q)
        + &(&fm * &(&(&x_minus_y * q).scale(&two) + &(&r2 * &q.dx())));
    let sys = PlanarSystem::try_new(p, qq)?;
    let iif = InverseIntegratingFactor::from_factors(vec![(r2, 1), (f, m)], q.clone())?;
    Ok((sys, iif))
}

/// ẋ = −2y, ẏ = −2x + 3x²; Hamiltonian with H = y² − x² + x³.
pub fn cubic_hamiltonian() -> (PlanarSystem, BiPoly) {
    (
        PlanarSystem::new(poly(&[(0, 1, -2, 1)]), poly(&[(1, 0, -2, 1), (2, 0, 3, 1)])),
        poly(&[(0, 2, 1, 1), (2, 0, -1, 1), (3, 0, 1, 1)]),
    )
}

/// ẋ = −2y, ẏ = −2x + 3x² + ε y Π (H + aᵢ ε).
pub fn perturbed_hamiltonian(eps: &Rational, a: &[Rational]) -> PlanarSystem {
    let (sys, h) = cubic_hamiltonian();
    let mut prod = BiPoly::one();
    for ai in a {
        prod = &prod * &(&h + &BiPoly::constant(ai.clone() * eps));
    }
    let extra = (&BiPoly::y() * &prod).scale(eps);
    PlanarSystem::new(sys.p, &sys.q + &extra)
}

/// ẋ = −x + 2y + x², ẏ = 2x − y − 3x² + (3/2)xy: a 1:3 resonant strong saddle
/// at the origin whose loop lies on `x²(1−x) − y² = 0`.
pub fn resonant_loop() -> (PlanarSystem, BiPoly) {
    (
        PlanarSystem::new(
            poly(&[(1, 0, -1, 1), (0, 1, 2, 1), (2, 0, 1, 1)]),
            poly(&[(1, 0, 2, 1), (0, 1, -1, 1), (2, 0, -3, 1), (1, 1, 3, 2)]),
        ),
        poly(&[(2, 0, 1, 1), (3, 0, -1, 1), (0, 2, -1, 1)]),
    )
}

/// ẋ = x(1 + Σ aᵢ(xy)^i), ẏ = −y(1 + Σ bᵢ(xy)^i).
pub fn weak_saddle_normal_form(a: &[Rational], b: &[Rational]) -> PlanarSystem {
    let mut p = BiPoly::x();
    let mut q = -&BiPoly::y();
    for (i, ai) in a.iter().enumerate() {
        let k = i as u32 + 1;
        p.add_term(k + 1, k, ai.clone());
    }
    for (i, bi) in b.iter().enumerate() {
        let k = i as u32 + 1;
        q.add_term(k, k + 1, -bi.clone());
    }
    PlanarSystem::new(p, q)
}

/// ẋ = p x, ẏ = −q y.
pub fn linear_saddle(p: i64, q: i64) -> PlanarSystem {
    PlanarSystem::new(BiPoly::monomial(int(p), 1, 0), BiPoly::monomial(int(-q), 0, 1))
}

/// ẋ = x + y, ẏ = x − 2y: a strong saddle with irrational ratio
/// r = (7 + √13)/6. The product of its two eigenlines, the rational quadratic
/// form `x² − 3xy − y²`, is an inverse integrating factor.
pub fn irrational_saddle() -> (PlanarSystem, BiPoly) {
    (
        PlanarSystem::new(
            poly(&[(1, 0, 1, 1), (0, 1, 1, 1)]),
            poly(&[(1, 0, 1, 1), (0, 1, -2, 1)]),
        ),
        poly(&[(2, 0, 1, 1), (1, 1, -3, 1), (0, 2, -1, 1)]),
    )
}

/// Default auxiliary polynomials g = q = 1 for [`nodal_loop_family`].
pub fn unit() -> BiPoly {
    BiPoly::one()
}
