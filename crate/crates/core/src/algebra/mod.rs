//! Exact algebra: rationals, quadratic numbers, parametric coefficients and
//! sparse bivariate polynomials.

mod param;
mod poly;
mod quadratic;
mod ring;
mod scalar;

pub use param::{parse_param_expr, ParamMonomial, ParamPoly};
pub use poly::{lift_params, poly, BiPoly, CompiledPoly, MonomialOrder};
pub use quadratic::{gcd_u64, Quadratic};
pub use ring::{f64_to_rational, format_rational, int, parse_rational, rat, rational_to_f64, Field, Rational, Ring};
pub use scalar::{Dual, Scalar};

/// Largest m with `f^m | v` (repeated exact division).
///
/// Returns 0 when f does not divide v. The loop is bounded by
/// `deg(v)/deg(f)` for nonconstant f.
pub fn multiplicity_of_factor(v: &BiPoly, f: &BiPoly) -> crate::error::Result<u32> {
    if f.is_zero() {
        return Err(crate::error::Error::DivisionByZero);
    }
    if f.degree() == 0 || v.is_zero() {
        return Err(crate::error::Error::InvalidInput(
            "multiplicity needs a nonconstant factor and a nonzero polynomial".into(),
        ));
    }
    let mut m = 0;
    let mut rest = v.clone();
    while let Some(q) = rest.divide_exact(f)? {
        m += 1;
        rest = q;
    }
    Ok(m)
}
