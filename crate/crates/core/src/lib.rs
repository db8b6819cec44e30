//! Inverse integrating factors of planar polynomial vector fields.
//!
//! For ẋ = P(x,y), ẏ = Q(x,y) an inverse integrating factor V solves
//! `P V_x + Q V_y = V (P_x + Q_y)`. Its zero set is invariant, and its vanishing
//! order along a limit cycle or homoclinic loop controls how many limit cycles
//! can bifurcate from that set. This crate certifies such V exactly, computes
//! transition maps with their derivatives, measures vanishing multiplicities in
//! curvilinear coordinates, computes saddle quantities and resonant normal
//! forms, and turns all of it into cyclicity verdicts.
//!
//! ```
//! use invfactor::algebra::{poly, BiPoly};
//! use invfactor::system::PlanarSystem;
//! use invfactor::iif::{verify_iif, InverseIntegratingFactor};
//!
//! // ẋ = −2y, ẏ = −2x + 3x², a Hamiltonian field with H = y² − x² + x³.
//! let sys = PlanarSystem::new(poly(&[(0, 1, -2, 1)]), poly(&[(1, 0, -2, 1), (2, 0, 3, 1)]));
//! let h = poly(&[(0, 2, 1, 1), (2, 0, -1, 1), (3, 0, 1, 1)]);
//! let v = InverseIntegratingFactor::new(h.pow(2));
//! assert!(verify_iif(&sys, &v).is_zero());
//! ```

// `!(x > tol)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// stage arithmetic reads more clearly with parallel indices
#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod corpus;
pub mod curvilinear;
pub mod error;
pub mod flow;
pub mod iif;
pub mod job;
pub mod saddle;
pub mod system;
pub mod tolerances;
pub mod verdict;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/inverse-integrating-factors.md")]
    mod inverse_integrating_factors {}
    #[doc = include_str!("../../../book/src/transition-maps.md")]
    mod transition_maps {}
    #[doc = include_str!("../../../book/src/curvilinear.md")]
    mod curvilinear {}
    #[doc = include_str!("../../../book/src/saddles.md")]
    mod saddles {}
    #[doc = include_str!("../../../book/src/verdicts.md")]
    mod verdicts {}
    #[doc = include_str!("../../../book/src/jobs.md")]
    mod jobs {}
}
