//! Inverse integrating factors: exact certification, multiplicities along
//! invariant curves, and the first-integral ratio of two factors.

use std::collections::BTreeMap;

use rand::{rngs::StdRng, Rng as _, SeedableRng};

use crate::algebra::{multiplicity_of_factor, BiPoly, ParamPoly, Rational, Ring};
use crate::error::{Error, Result};
use crate::flow::{integrate_with, FlowSettings};
use crate::system::PlanarSystem;
use crate::tolerances;

/// A declared factorization `v = Π fᵢ^{eᵢ} · unit`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization {
    pub factors: Vec<(BiPoly, u32)>,
    pub unit: BiPoly,
}

impl Factorization {
    pub fn expand(&self) -> BiPoly {
        self.factors
            .iter()
            .fold(self.unit.clone(), |acc, (f, e)| &acc * &f.pow(*e))
    }
}

/// A polynomial inverse integrating factor candidate V.
#[derive(Clone, Debug, PartialEq)]
pub struct InverseIntegratingFactor {
    pub v: BiPoly,
    pub factorization: Option<Factorization>,
}

impl InverseIntegratingFactor {
    /// # Panics
    /// When `v` is the zero polynomial.
    pub fn new(v: BiPoly) -> Self {
        assert!(!v.is_zero(), "an inverse integrating factor is not identically zero");
        InverseIntegratingFactor { v, factorization: None }
    }

    /// Builds V from its factorization, which then holds by construction.
    pub fn from_factors(factors: Vec<(BiPoly, u32)>, unit: BiPoly) -> Result<Self> {
        let f = Factorization { factors, unit };
        let v = f.expand();
        if v.is_zero() {
            return Err(Error::InvalidInput("factorization expands to zero".into()));
        }
        Ok(InverseIntegratingFactor {
            v,
            factorization: Some(f),
        })
    }

    /// Attaches a factorization after checking that it expands to `v`.
    pub fn with_factorization(v: BiPoly, factors: Vec<(BiPoly, u32)>, unit: BiPoly) -> Result<Self> {
        let f = Factorization { factors, unit };
        if f.expand() != v {
            return Err(Error::InvalidInput(
                "declared factorization does not expand to V".into(),
            ));
        }
        Ok(InverseIntegratingFactor {
            v,
            factorization: Some(f),
        })
    }
}

/// `P V_x + Q V_y − V div X` over any coefficient ring.
pub fn iif_residual<C: Ring>(sys: &PlanarSystem<C>, v: &BiPoly<C>) -> BiPoly<C> {
    &sys.lie_derivative(v) - &(v * &sys.divergence())
}

/// Exact residual of the defining equation; zero certifies V.
pub fn verify_iif(sys: &PlanarSystem, v: &InverseIntegratingFactor) -> BiPoly {
    iif_residual(sys, &v.v)
}

/// How parametric coefficients are handled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ParamMode {
    /// Parameters stay symbolic in the coefficient ring.
    #[default]
    Symbolic,
    /// Random rational parameter values.
    Sampled,
    /// Both, required to agree.
    Both,
}

/// Outcome of certifying a parametric family.
#[derive(Clone, Debug, PartialEq)]
pub struct ParametricVerification {
    /// Symbolic residual (present in symbolic modes).
    pub symbolic_residual: Option<BiPoly<ParamPoly>>,
    /// (samples tried, samples with a nonzero residual) in sampled modes.
    pub sampled: Option<(usize, usize)>,
}

impl ParametricVerification {
    pub fn certified(&self) -> bool {
        self.symbolic_residual.as_ref().is_none_or(|r| r.is_zero()) && self.sampled.is_none_or(|(_, bad)| bad == 0)
    }

    /// True when every mode that ran reached the same verdict.
    pub fn modes_agree(&self) -> bool {
        match (&self.symbolic_residual, self.sampled) {
            (Some(r), Some((_, bad))) => r.is_zero() == (bad == 0),
            _ => true,
        }
    }
}

/// Certifies V for a family with symbolic parameters. Sampling uses at least
/// (d+1)² random rational parameter points, d bounding the parameter degree
/// of the residual.
pub fn verify_iif_parametric(
    sys: &PlanarSystem<ParamPoly>,
    v: &BiPoly<ParamPoly>,
    mode: ParamMode,
    seed: u64,
) -> Result<ParametricVerification> {
    let symbolic_residual = matches!(mode, ParamMode::Symbolic | ParamMode::Both).then(|| iif_residual(sys, v));
    let sampled = if matches!(mode, ParamMode::Sampled | ParamMode::Both) {
        let pdeg = |p: &BiPoly<ParamPoly>| p.terms().map(|(_, _, c)| c.degree()).max().unwrap_or(0);
        let d = (pdeg(&sys.p).max(pdeg(&sys.q)) + pdeg(v)) as usize;
        let count = ((d + 1) * (d + 1)).max(16);
        let mut names: Vec<String> = [sys.p.symbols(), sys.q.symbols(), v.symbols()].concat();
        names.sort();
        names.dedup();
        let mut rng = StdRng::seed_from_u64(seed);
        let mut bad = 0;
        for _ in 0..count {
            let values: BTreeMap<String, Rational> = names
                .iter()
                .map(|n| {
                    let num: i64 = rng.gen_range(-1000..=1000);
                    let den: i64 = rng.gen_range(1..=997);
                    (n.clone(), crate::algebra::rat(num, den))
                })
                .collect();
            let s = PlanarSystem {
                p: sys.p.substitute(&values)?,
                q: sys.q.substitute(&values)?,
            };
            if !iif_residual(&s, &v.substitute(&values)?).is_zero() {
                bad += 1;
            }
        }
        Some((count, bad))
    } else {
        None
    };
    Ok(ParametricVerification {
        symbolic_residual,
        sampled,
    })
}

/// Largest m with f^m dividing V exactly.
pub fn symbolic_multiplicity(v: &InverseIntegratingFactor, f: &BiPoly) -> Result<u32> {
    multiplicity_of_factor(&v.v, f)
}

/// Maximal relative variation of V1/V2 along numerically integrated probe
/// orbits over `[0, t_span]`. A first integral gives zero.
pub fn iif_ratio_first_integral(
    v1: &InverseIntegratingFactor,
    v2: &InverseIntegratingFactor,
    sys: &PlanarSystem,
    probe_orbits: &[(f64, f64)],
    t_span: f64,
    settings: &FlowSettings,
) -> Result<f64> {
    let (c1, c2) = (v1.v.compile(), v2.v.compile());
    let mut settings = *settings;
    settings.sample_dt = Some(settings.sample_dt.unwrap_or(t_span / 500.0));
    let mut worst: f64 = 0.0;
    for &p in probe_orbits {
        let orbit = integrate_with(sys, p, t_span, &settings, &[])?;
        let mut r0: Option<f64> = None;
        for &(_, x, y) in &orbit.trajectory.samples {
            let den = c2.eval(x, y);
            if den.abs() < tolerances::EVENT_POLISH {
                return Err(Error::DenominatorVanished);
            }
            let r = c1.eval(x, y) / den;
            match r0 {
                None => r0 = Some(r),
                Some(r0) => {
                    let scale = r0.abs().max(tolerances::RESIDUAL_FLOOR);
                    worst = worst.max((r - r0).abs() / scale);
                }
            }
        }
    }
    Ok(worst)
}

/// Lifts a rational system to parametric coefficients.
pub fn lift_system(sys: &PlanarSystem) -> PlanarSystem<ParamPoly> {
    PlanarSystem {
        p: crate::algebra::lift_params(&sys.p),
        q: crate::algebra::lift_params(&sys.q),
    }
}

/// True when the residual is the zero polynomial.
pub fn is_certified<C: Ring>(residual: &BiPoly<C>) -> bool {
    residual.is_zero() && residual.terms().all(|(_, _, c)| c.is_zero())
}
