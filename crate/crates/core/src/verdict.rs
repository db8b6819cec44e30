//! Cyclicity conclusions drawn from vanishing multiplicities, saddle data and
//! return-map asymptotics.

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{format_rational, rational_to_f64, BiPoly, Rational};
use crate::error::{Error, Result};
use crate::flow::{characteristic_exponent, FlowSettings, Half, MapSample, Section};
use crate::saddle::{formal_iif_consistency, ResonantNormalForm, SaddleInfo, SaddleQuantities};
use crate::system::PlanarSystem;
use crate::tolerances;

/// Which hypothesis produced a homoclinic cyclicity value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    /// Strong saddle: m = 1, cyclicity 1.
    StrongSaddle,
    /// Weak saddle with α_m ≠ 0: cyclicity 2m − 1.
    WeakNonlinearizable,
    /// Weak saddle with α_m = 0: cyclicity 2m.
    WeakLinearizable,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum VerdictKind {
    LimitCycleMultiplicity(u32),
    PeriodAnnulus,
    HomoclinicCyclicity { cyclicity: u32, branch: Branch },
    NoAnalyticIif,
    Undecided(String),
}

/// One contributing fact, with the tolerance it was judged against if any.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    pub label: String,
    pub value: String,
    pub tolerance: Option<f64>,
}

impl Evidence {
    pub fn new(label: impl Into<String>, value: impl ToString) -> Self {
        Evidence {
            label: label.into(),
            value: value.to_string(),
            tolerance: None,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CyclicityVerdict {
    pub kind: VerdictKind,
    pub evidence: Vec<Evidence>,
    /// The result that was applied, stated by content.
    pub basis: String,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerdictKind::LimitCycleMultiplicity(m) => write!(f, "limit cycle of multiplicity {m}"),
            VerdictKind::PeriodAnnulus => f.write_str("period annulus"),
            VerdictKind::HomoclinicCyclicity { cyclicity, branch } => {
                let tag = match branch {
                    Branch::StrongSaddle => "strong saddle",
                    Branch::WeakNonlinearizable => "weak saddle, alpha_m nonzero",
                    Branch::WeakLinearizable => "weak saddle, alpha_m zero",
                };
                write!(f, "homoclinic cyclicity {cyclicity} ({tag})")
            }
            VerdictKind::NoAnalyticIif => f.write_str("no analytic inverse integrating factor near the loop"),
            VerdictKind::Undecided(why) => write!(f, "undecided: {why}"),
        }
    }
}

impl fmt::Display for CyclicityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", self.kind)?;
        writeln!(f, "basis: {}", self.basis)?;
        writeln!(f, "evidence:")?;
        for e in &self.evidence {
            match e.tolerance {
                Some(t) => writeln!(f, "  {} = {} (tol {t:e})", e.label, e.value)?,
                None => writeln!(f, "  {} = {}", e.label, e.value)?,
            }
        }
        Ok(())
    }
}

/// A vanishing multiplicity: natural when known exactly, real when fitted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Multiplicity {
    Natural(u32),
    Real(f64),
}

/// Samples of a return map Π on a section through the orbit (σ = 0).
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnProbe {
    pub samples: Vec<MapSample>,
    pub tolerance: f64,
}

impl ReturnProbe {
    pub fn new(samples: Vec<MapSample>) -> Self {
        ReturnProbe {
            samples,
            tolerance: tolerances::IDENTITY_PROBE,
        }
    }

    pub fn max_displacement(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| (s.image - s.sigma).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_identity(&self) -> bool {
        self.max_displacement() < self.tolerance
    }

    /// Leading exponent of Π(σ) − σ from a log-log least-squares fit over the
    /// samples with σ ≠ 0, rounded when it is within the slope tolerance of
    /// a natural number.
    pub fn multiplicity_estimate(&self) -> Option<u32> {
        let pts: Vec<(f64, f64)> = self
            .samples
            .iter()
            .filter(|s| s.sigma != 0.0 && (s.image - s.sigma).abs() > tolerances::NOISE_FLOOR)
            .map(|s| (s.sigma.abs().ln(), (s.image - s.sigma).abs().ln()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let n = pts.len() as f64;
        let (mx, my) = (
            pts.iter().map(|p| p.0).sum::<f64>() / n,
            pts.iter().map(|p| p.1).sum::<f64>() / n,
        );
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        if sxx == 0.0 {
            return None;
        }
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx;
        let k = slope.round();
        ((slope - k).abs() < tolerances::SLOPE_ROUNDING && k >= 1.0).then_some(k as u32)
    }
}

/// Verdict for a periodic orbit whose inverse integrating factor vanishes to
/// order `m` along it. `leading_ok` records that the leading coefficient v(s)
/// stays away from zero along the orbit.
pub fn limit_cycle_verdict(m: Multiplicity, leading_ok: bool, probe: Option<&ReturnProbe>) -> CyclicityVerdict {
    let mut evidence = vec![Evidence::new("leading coefficient nonvanishing", leading_ok)];
    let natural = match m {
        Multiplicity::Natural(k) => {
            evidence.insert(0, Evidence::new("m", k));
            Some(k)
        }
        Multiplicity::Real(rho) => {
            evidence.insert(0, Evidence::new("rho", rho).with_tolerance(tolerances::SLOPE_ROUNDING));
            let k = rho.round();
            if (rho - k).abs() < tolerances::SLOPE_ROUNDING && k >= 0.0 {
                Some(k as u32)
            } else if rho > 1.0 {
                return CyclicityVerdict {
                    kind: VerdictKind::PeriodAnnulus,
                    evidence,
                    basis: "vanishing order above 1 that is not a natural number forces a continuum of periodic orbits"
                        .into(),
                };
            } else {
                return CyclicityVerdict {
                    kind: VerdictKind::Undecided(format!("vanishing order {rho} lies outside the admissible values")),
                    evidence,
                    basis: "a vanishing order is 0, a natural number, or a non-natural value above 1".into(),
                };
            }
        }
    };
    let m = natural.expect("non-natural orders returned above");
    if m == 0 {
        return CyclicityVerdict {
            kind: VerdictKind::PeriodAnnulus,
            evidence,
            basis: "V nonzero on the orbit forces a continuum of periodic orbits".into(),
        };
    }
    if !leading_ok {
        return CyclicityVerdict {
            kind: VerdictKind::Undecided("leading coefficient vanishes along the orbit".into()),
            evidence,
            basis: "the multiplicity statement needs V = n^m v(s) with v(s) nonzero".into(),
        };
    }
    let basis = "a limit cycle of multiplicity m has an inverse integrating factor vanishing to order m; \
                 conversely order m means multiplicity m or a period annulus"
        .to_string();
    let Some(probe) = probe else {
        return CyclicityVerdict {
            kind: VerdictKind::Undecided(format!(
                "limit cycle of multiplicity {m} or period annulus; no return-map probe"
            )),
            evidence,
            basis,
        };
    };
    evidence.push(
        Evidence::new("max |Pi(sigma) - sigma|", format!("{:.6e}", probe.max_displacement()))
            .with_tolerance(probe.tolerance),
    );
    evidence.push(Evidence::new("probe samples", probe.samples.len()));
    if probe.is_identity() {
        evidence.push(Evidence::new("disambiguator", "return-map probe: identity"));
        return CyclicityVerdict {
            kind: VerdictKind::PeriodAnnulus,
            evidence,
            basis,
        };
    }
    evidence.push(Evidence::new("disambiguator", "return-map probe: not the identity"));
    match probe.multiplicity_estimate() {
        Some(k) if k == m => {
            evidence.push(Evidence::new("probe multiplicity", k));
            CyclicityVerdict {
                kind: VerdictKind::LimitCycleMultiplicity(m),
                evidence,
                basis,
            }
        }
        other => {
            let shown = other.map_or("none".to_string(), |k| k.to_string());
            evidence.push(Evidence::new("probe multiplicity", &shown));
            CyclicityVerdict {
                kind: VerdictKind::Undecided(format!("probe multiplicity {shown} disagrees with m = {m}")),
                evidence,
                basis,
            }
        }
    }
}

/// Cyclicity of a homoclinic loop through `saddle` whose inverse integrating
/// factor vanishes to order m on the loop.
pub fn homoclinic_cyclicity(
    m: u32,
    saddle: &SaddleInfo,
    alphas: Option<&SaddleQuantities>,
) -> Result<CyclicityVerdict> {
    if m == 0 {
        return Err(Error::InvalidInput(
            "an inverse integrating factor vanishes on the loop, so m ≥ 1".into(),
        ));
    }
    let mut evidence = vec![
        Evidence::new("m", m),
        Evidence::new("r", saddle.ratio_r),
        Evidence::new("divergence at saddle", saddle.divergence).with_tolerance(tolerances::WEAK_SADDLE),
    ];
    if saddle.strong {
        if m != 1 {
            return Err(Error::StrongSaddleMultiplicity);
        }
        return Ok(CyclicityVerdict {
            kind: VerdictKind::HomoclinicCyclicity {
                cyclicity: 1,
                branch: Branch::StrongSaddle,
            },
            evidence,
            basis: "at a strong saddle the loop multiplicity is 1 and the cyclicity is 1".into(),
        });
    }
    let Some(q) = alphas else {
        return Ok(CyclicityVerdict {
            kind: VerdictKind::Undecided("weak saddle without saddle quantities".into()),
            evidence,
            basis: "at a weak saddle the cyclicity depends on whether alpha_m vanishes".into(),
        });
    };
    for (i, a) in q.alphas.iter().enumerate().take(m as usize) {
        evidence.push(Evidence::new(format!("alpha_{}", i + 1), a));
    }
    let nonzero = formal_iif_consistency(q, m as usize)?;
    let (cyclicity, branch, basis) = if nonzero {
        (
            2 * m - 1,
            Branch::WeakNonlinearizable,
            "weak saddle with alpha_m nonzero: cyclicity 2m - 1",
        )
    } else {
        (
            2 * m,
            Branch::WeakLinearizable,
            "weak saddle with alpha_m zero: cyclicity 2m",
        )
    };
    Ok(CyclicityVerdict {
        kind: VerdictKind::HomoclinicCyclicity { cyclicity, branch },
        evidence,
        basis: basis.into(),
    })
}

/// What is known about the separatrix quantities β_k.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Separatrix {
    Unknown,
    /// β₁ = ∫_Γ div X dt, computed.
    Beta1(f64),
    /// Every α_k and β_k is declared zero (e.g. a Hamiltonian loop).
    AllZero,
}

/// Case of the asymptotic expansion of the loop's return map.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum MapCase {
    /// r ≠ 1: Π(σ) = cσ^r(1 + o(1)).
    PowerLaw,
    /// α₁ = 0, β₁ ≠ 0.
    Hyperbolic,
    /// α_i = β_i = 0 for i ≤ k, α_{k+1} ≠ 0.
    Logarithmic {
        k: u32,
    },
    /// α_i = β_i = 0 for i < k, α_k = 0, β_k ≠ 0.
    Polynomial {
        k: u32,
    },
    /// Every α and β vanishes: Π is the identity.
    Identity,
    Undetermined(String),
}

/// Leading form of Π(σ) and the cyclicity bound of the matching case.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapForm {
    pub case: MapCase,
    pub leading: String,
    /// None when no finite bound exists or the case is undetermined.
    pub bound: Option<u32>,
}

impl MapForm {
    fn new(case: MapCase, leading: impl Into<String>, bound: Option<u32>) -> Self {
        MapForm {
            case,
            leading: leading.into(),
            bound,
        }
    }
}

/// Asymptotic form of the return map of a homoclinic loop with hyperbolicity
/// ratio `r`. With the multiplicity `m` of an inverse integrating factor on a
/// weak loop, the first nonvanishing quantity is read off without computing
/// β_k for k ≥ 2.
pub fn roussarie_asymptotics(r: f64, alphas: &SaddleQuantities, beta: Separatrix, m: Option<u32>) -> Result<MapForm> {
    let weak = (r - 1.0).abs() < tolerances::WEAK_SADDLE;
    if let Some(a1) = alphas.alpha(1) {
        if a1.is_zero() != weak {
            return Err(Error::ConstraintViolated(format!(
                "alpha_1 = {a1} disagrees with r = {r}"
            )));
        }
    }
    if !weak {
        return Ok(MapForm::new(
            MapCase::PowerLaw,
            format!("Pi(sigma) = c sigma^{r} (1 + o(1))"),
            Some(1),
        ));
    }
    let first_alpha = alphas.first_nonzero.map(|k| k as u32);
    match beta {
        Separatrix::AllZero => {
            if let Some(k) = first_alpha {
                return Err(Error::ConstraintViolated(format!(
                    "alpha_{k} is nonzero but every quantity is declared zero"
                )));
            }
            return Ok(MapForm::new(MapCase::Identity, "Pi(sigma) = sigma", None));
        }
        Separatrix::Beta1(b) if b.abs() > tolerances::WEAK_SADDLE => {
            return Ok(MapForm::new(
                MapCase::Hyperbolic,
                format!("Pi(sigma) = e^({b:.6e}) sigma + o(sigma)"),
                Some(2),
            ));
        }
        _ => {}
    }
    let beta1_zero = matches!(beta, Separatrix::Beta1(_));
    match m {
        Some(0) => Err(Error::InvalidInput(
            "an inverse integrating factor vanishes on the loop, so m ≥ 1".into(),
        )),
        Some(m) => {
            let alpha_m_nonzero = formal_iif_consistency(alphas, m as usize)?;
            if alpha_m_nonzero {
                let a = alphas.alpha(m as usize).expect("checked by consistency");
                Ok(MapForm::new(
                    MapCase::Logarithmic { k: m - 1 },
                    format!("Pi(sigma) = sigma + ({a}) sigma^{m} log sigma + o(sigma^{m} log sigma)"),
                    Some(2 * m - 1),
                ))
            } else if m == 1 {
                if beta1_zero {
                    return Err(Error::ConstraintViolated(
                        "beta_1 = 0 contradicts alpha_1 = 0 with an inverse integrating factor of order 1".into(),
                    ));
                }
                Ok(MapForm::new(
                    MapCase::Hyperbolic,
                    "Pi(sigma) = e^(beta_1) sigma + o(sigma), beta_1 nonzero since V has order 1 and alpha_1 = 0",
                    Some(2),
                ))
            } else {
                Ok(MapForm::new(
                    MapCase::Polynomial { k: m },
                    format!("Pi(sigma) = sigma + beta_{m} sigma^{m} + o(sigma^{m}), beta_{m} nonzero since V has order {m} and alpha_{m} = 0"),
                    Some(2 * m),
                ))
            }
        }
        None => match (first_alpha, beta1_zero) {
            (Some(2), true) => {
                let a = alphas.alpha(2).expect("first nonzero");
                Ok(MapForm::new(
                    MapCase::Logarithmic { k: 1 },
                    format!("Pi(sigma) = sigma + ({a}) sigma^2 log sigma + o(sigma^2 log sigma)"),
                    Some(3),
                ))
            }
            _ => Ok(MapForm::new(
                MapCase::Undetermined("higher separatrix quantities are needed".into()),
                "unknown",
                None,
            )),
        },
    }
}

/// True when the saddle is p:q resonant with p ≠ q and the resonant normal
/// form has a nonzero obstruction: then no analytic inverse integrating
/// factor exists near a homoclinic loop through it.
pub fn existence_obstruction(saddle: &SaddleInfo, nf: &ResonantNormalForm) -> bool {
    matches!(saddle.resonance, Some(r) if r.p != r.q && !r.numeric) && saddle.strong && nf.delta != 0
}

/// [`existence_obstruction`] as a verdict record.
pub fn obstruction_verdict(saddle: &SaddleInfo, nf: &ResonantNormalForm) -> CyclicityVerdict {
    let mut evidence = vec![
        Evidence::new("resonance", format!("{}:{}", nf.p, nf.q)),
        Evidence::new("strong", saddle.strong),
        Evidence::new("delta", nf.delta),
        Evidence::new("truncation degree", nf.truncation_degree),
    ];
    if let (Some(l), Some(a)) = (nf.ell, &nf.a_coeff) {
        evidence.push(Evidence::new(format!("obstruction coefficient (U^{l})"), a));
    }
    let basis = "a strong p:q resonant saddle that is not formally orbitally linearizable admits no analytic \
                 inverse integrating factor around a loop through it"
        .to_string();
    let kind = if existence_obstruction(saddle, nf) {
        VerdictKind::NoAnalyticIif
    } else {
        VerdictKind::Undecided("obstruction hypotheses not met".into())
    };
    CyclicityVerdict { kind, evidence, basis }
}

/// Certificates for one oval H + a ε = 0 of the perturbed Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OvalCertificate {
    pub a: String,
    /// Exact cofactor of the oval, when it is invariant.
    pub cofactor: Option<String>,
    pub exponent: Option<f64>,
    /// Spread of the exponent between two integration tolerances.
    pub exponent_error: Option<f64>,
    pub hyperbolic: bool,
    pub note: Option<String>,
}

impl OvalCertificate {
    pub fn passed(&self) -> bool {
        self.cofactor.is_some() && self.hyperbolic
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationWitness {
    pub system: PlanarSystem,
    pub ovals: Vec<OvalCertificate>,
}

impl PerturbationWitness {
    /// All-or-nothing: every oval must be invariant and hyperbolic.
    pub fn certified(&self) -> bool {
        !self.ovals.is_empty() && self.ovals.iter().all(OvalCertificate::passed)
    }
}

/// Builds ẋ = −2y, ẏ = −2x + 3x² + ε y Π(H + aᵢε) with H = y² − x² + x³ and
/// certifies its n ovals H = −aᵢε inside the loop H = 0: invariance by exact
/// cofactor division, hyperbolicity by a characteristic exponent that exceeds
/// its integration error by a wide margin. ε = 0 is accepted and yields the
/// unperturbed loop, which fails the certification.
pub fn perturbation_witness(n: usize, eps: &Rational, a: &[Rational]) -> Result<PerturbationWitness> {
    if a.len() != n {
        return Err(Error::InvalidInput(format!("expected {n} values a_i, got {}", a.len())));
    }
    let bound = crate::algebra::rat(4, 27);
    let zero = Rational::from_integer(0.into());
    for (i, ai) in a.iter().enumerate() {
        if a[..i].contains(ai) {
            return Err(Error::ConstraintViolated(format!(
                "a_i must be pairwise distinct ({} repeats)",
                format_rational(ai)
            )));
        }
        let c = ai * eps;
        if c >= bound || (c <= zero && *eps != zero) {
            return Err(Error::ConstraintViolated(format!(
                "0 < a_i eps < 4/27 fails for a_i = {}, eps = {}",
                format_rational(ai),
                format_rational(eps)
            )));
        }
    }
    let system = crate::corpus::perturbed_hamiltonian(eps, a);
    let (_, h) = crate::corpus::cubic_hamiltonian();
    let ovals = a.iter().map(|ai| certify_oval(&system, &h, ai, eps)).collect();
    Ok(PerturbationWitness { system, ovals })
}

fn certify_oval(sys: &PlanarSystem, h: &BiPoly, ai: &Rational, eps: &Rational) -> OvalCertificate {
    let c = ai * eps;
    let curve = h + &BiPoly::constant(c.clone());
    let cofactor = sys.invariant_curve_cofactor(&curve).map(|k| k.to_string());
    let mut cert = OvalCertificate {
        a: format_rational(ai),
        cofactor,
        exponent: None,
        exponent_error: None,
        hyperbolic: false,
        note: None,
    };
    // the oval meets the positive x-axis where x³ − x² + c = 0, x ∈ (2/3, 1]
    let cf = rational_to_f64(&c);
    let x0 = bisect(|x| x * x * x - x * x + cf, 2.0 / 3.0, 1.0);
    let exponent_at = |tol: f64| -> Result<f64> {
        let sec = Section::new(sys, (x0, 0.0), (1.0, 0.0), Half::Positive)?;
        Ok(characteristic_exponent(sys, (x0, 0.0), &sec, &FlowSettings::with_rel_tol(tol))?.exponent)
    };
    match (
        exponent_at(tolerances::DEFAULT_REL_TOL),
        exponent_at(tolerances::DEFAULT_REL_TOL * 100.0),
    ) {
        (Ok(e), Ok(coarse)) => {
            let err = (e - coarse).abs();
            cert.exponent = Some(e);
            cert.exponent_error = Some(err);
            cert.hyperbolic = e.abs() > (tolerances::EXPONENT_MARGIN * err).max(tolerances::EXPONENT_FLOOR);
            if !cert.hyperbolic {
                cert.note = Some("exponent indistinguishable from zero".into());
            }
        }
        (Err(e), _) | (_, Err(e)) => cert.note = Some(e.to_string()),
    }
    cert
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Samples a return map on `section` at the given σ values for a probe.
pub fn sample_return_map(
    sys: &PlanarSystem,
    section: &Section,
    sigmas: &[f64],
    settings: &FlowSettings,
) -> Result<ReturnProbe> {
    let samples = sigmas
        .iter()
        .map(|&s| crate::flow::transition_map(sys, section, section, s, settings))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReturnProbe::new(samples))
}
