//! Local analysis at a hyperbolic saddle: classification, local factorization
//! of an inverse integrating factor along the separatrices, Poincaré–Dulac
//! saddle quantities and the resonant orbital normal form.
//!
//! Normal forms are computed exactly, over ℚ when the eigenvalues are
//! rational and over ℚ(√d) otherwise.

mod series;

pub use series::TruncSeries;

use std::fmt::{self, Write as _};

use num_traits::{ToPrimitive, Zero};

use crate::algebra::{multiplicity_of_factor, BiPoly, Field, Quadratic, Rational};
use crate::error::{Error, Result};
use crate::iif::InverseIntegratingFactor;
use crate::system::{PlanarSystem, Point, SingularPoint};
use crate::tolerances;

/// p:q resonance, r = −μ/λ = q/p with gcd(p, q) = 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Resonance {
    pub p: u64,
    pub q: u64,
    /// Detected within the numerical tolerance instead of exactly.
    pub numeric: bool,
}

/// Exact eigen-data of a saddle at a rational point.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactSaddle {
    pub location: (Rational, Rational),
    pub jacobian: [[Rational; 2]; 2],
    pub lambda: Quadratic,
    pub mu: Quadratic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaddleInfo {
    pub location: Point,
    /// Unstable eigenvalue, λ > 0.
    pub lambda: f64,
    /// Stable eigenvalue, μ < 0.
    pub mu: f64,
    /// r = −μ/λ.
    pub ratio_r: f64,
    /// Nonzero divergence at the saddle (r ≠ 1).
    pub strong: bool,
    pub resonance: Option<Resonance>,
    /// Unit right eigenvectors for λ and μ.
    pub eigenvectors: [(f64, f64); 2],
    pub divergence: f64,
    pub exact: Option<ExactSaddle>,
}

fn unit(v: (f64, f64)) -> (f64, f64) {
    let n = v.0.hypot(v.1);
    (v.0 / n, v.1 / n)
}

/// Right eigenvector of `j` for eigenvalue `nu`.
fn right_eigenvector<F: Field>(j: &[[F; 2]; 2], nu: &F) -> [F; 2] {
    let a = [j[0][1].clone(), nu.clone() - &j[0][0]];
    if !(a[0].is_zero() && a[1].is_zero()) {
        return a;
    }
    [nu.clone() - &j[1][1], j[1][0].clone()]
}

/// Left eigenvector of `j` for eigenvalue `nu`, scaled so that its last
/// nonzero component is 1.
fn left_eigenvector<F: Field>(j: &[[F; 2]; 2], nu: &F) -> [F; 2] {
    let mut l = [j[1][0].clone(), nu.clone() - &j[0][0]];
    if l[0].is_zero() && l[1].is_zero() {
        l = [nu.clone() - &j[1][1], j[0][1].clone()];
    }
    let pivot = if l[1].is_zero() { l[0].clone() } else { l[1].clone() };
    [l[0].clone() / &pivot, l[1].clone() / &pivot]
}

fn float_eigenvector(j: &[[f64; 2]; 2], nu: f64) -> (f64, f64) {
    let a = (j[0][1], nu - j[0][0]);
    let b = (nu - j[1][1], j[1][0]);
    if a.0.hypot(a.1) >= b.0.hypot(b.1) {
        unit(a)
    } else {
        unit(b)
    }
}

fn numeric_resonance(r: f64) -> Option<Resonance> {
    (1..=tolerances::RESONANCE_MAX_DENOMINATOR).find_map(|p| {
        let q = (r * p as f64).round();
        (q >= 1.0
            && q <= tolerances::RESONANCE_MAX_DENOMINATOR as f64
            && (r - q / p as f64).abs() < tolerances::RESONANCE)
            .then_some(Resonance {
                p,
                q: q as u64,
                numeric: true,
            })
    })
}

/// Classifies a singular point as a hyperbolic saddle.
pub fn classify_saddle(sys: &PlanarSystem, pt: &Point) -> Result<SaddleInfo> {
    let sp = sys.verify_singular(pt)?;
    classify_singular_point(&sp)
}

pub fn classify_singular_point(sp: &SingularPoint) -> Result<SaddleInfo> {
    let jac = &sp.jacobian;
    let [(mu, mu_im), (lambda, la_im)] = jac.eigenvalues;
    if mu_im != 0.0 || la_im != 0.0 {
        return Err(Error::NotHyperbolicSaddle);
    }
    let exact = match (&sp.location, &jac.exact, &jac.eigenvalues_exact) {
        (Point::Exact(x, y), Some(j), Some([m, l])) => {
            if !(l.is_real() && m.is_real()) || m.signum_real() != Some(-1) || l.signum_real() != Some(1) {
                return Err(Error::NotHyperbolicSaddle);
            }
            Some(ExactSaddle {
                location: (x.clone(), y.clone()),
                jacobian: j.clone(),
                lambda: l.clone(),
                mu: m.clone(),
            })
        }
        _ => {
            if !(mu < 0.0 && lambda > 0.0) {
                return Err(Error::NotHyperbolicSaddle);
            }
            None
        }
    };
    let ratio_r = -mu / lambda;
    let (strong, resonance) = match &exact {
        Some(e) => {
            let strong = !(e.lambda.clone() + &e.mu).is_zero();
            let r = -(e.mu.clone() / &e.lambda);
            let res = r.as_rational().and_then(|r| {
                Some(Resonance {
                    p: r.denom().to_u64()?,
                    q: r.numer().to_u64()?,
                    numeric: false,
                })
            });
            (strong, res)
        }
        None => (
            sp.divergence_value.abs() > tolerances::WEAK_SADDLE,
            numeric_resonance(ratio_r),
        ),
    };
    let e = jac.entries;
    Ok(SaddleInfo {
        location: sp.location.clone(),
        lambda,
        mu,
        ratio_r,
        strong,
        resonance,
        eigenvectors: [float_eigenvector(&e, lambda), float_eigenvector(&e, mu)],
        divergence: sp.divergence_value,
        exact,
    })
}

/// Coefficient fields for the exact normal-form engine.
trait Coeff: Field {
    fn from_quadratic(q: &Quadratic) -> Self;
    fn to_quadratic(&self) -> Quadratic;
}

impl Coeff for Rational {
    fn from_quadratic(q: &Quadratic) -> Self {
        q.as_rational().expect("rational element").clone()
    }
    fn to_quadratic(&self) -> Quadratic {
        Quadratic::rational(self.clone())
    }
}

impl Coeff for Quadratic {
    fn from_quadratic(q: &Quadratic) -> Self {
        q.clone()
    }
    fn to_quadratic(&self) -> Quadratic {
        self.clone()
    }
}

fn exact_data(saddle: &SaddleInfo) -> Result<&ExactSaddle> {
    saddle
        .exact
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("exact normal forms need a saddle at a rational point".into()))
}

/// Which eigen-coordinate comes first in the normal-form variables.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Order {
    UnstableFirst,
    StableFirst,
}

/// The field in eigen-coordinates (ℓ_λ·z, ℓ_μ·z) centred at the saddle, with
/// time divided by `time_scale`, as truncated series.
fn eigen_series<F: Coeff>(
    sys: &PlanarSystem,
    e: &ExactSaddle,
    order: Order,
    time_scale: &F,
    degree: u32,
) -> Result<([TruncSeries<F>; 2], [F; 2])> {
    let j = e.jacobian.clone().map(|row| row.map(|c| F::from_rational(&c)));
    let lam = F::from_quadratic(&e.lambda);
    let mu = F::from_quadratic(&e.mu);
    let l_lam = left_eigenvector(&j, &lam);
    let mut l_mu = left_eigenvector(&j, &mu);
    let det = l_lam[0].clone() * &l_mu[1] - l_lam[1].clone() * &l_mu[0];
    if det.signum_real() == Some(-1) {
        l_mu = [-l_mu[0].clone(), -l_mu[1].clone()];
    }
    let det = l_lam[0].clone() * &l_mu[1] - l_lam[1].clone() * &l_mu[0];
    let rows = match order {
        Order::UnstableFirst => [l_lam, l_mu],
        Order::StableFirst => [l_mu, l_lam],
    };
    let eig = match order {
        Order::UnstableFirst => [lam, mu],
        Order::StableFirst => [mu, lam],
    };
    // z − p0 = M⁻¹ (u, w) with M = rows; det M = ±det above
    let det_m = rows[0][0].clone() * &rows[1][1] - rows[0][1].clone() * &rows[1][0];
    debug_assert!(det_m == det || det_m == -det.clone());
    let inv = [
        [rows[1][1].clone() / &det_m, -(rows[0][1].clone() / &det_m)],
        [-(rows[1][0].clone() / &det_m), rows[0][0].clone() / &det_m],
    ];
    let (x0, y0) = &e.location;
    let p = sys.p.translate(x0, y0).map_coeffs(|c| F::from_rational(c));
    let q = sys.q.translate(x0, y0).map_coeffs(|c| F::from_rational(c));
    let lin = |a: &F, b: &F| BiPoly::from_terms([(1, 0, a.clone()), (0, 1, b.clone())]);
    let xs = lin(&inv[0][0], &inv[0][1]);
    let ys = lin(&inv[1][0], &inv[1][1]);
    let (p, q) = (p.compose(&xs, &ys), q.compose(&xs, &ys));
    let comp = |l: &[F; 2]| {
        let f = &p.scale(&l[0]) + &q.scale(&l[1]);
        TruncSeries::from_poly(&f.scale(&(F::one() / time_scale)), degree)
    };
    let f = [comp(&rows[0]), comp(&rows[1])];
    let eig = eig.map(|v| v / time_scale);
    debug_assert!(f[0].get(1, 0) == &eig[0] && f[1].get(0, 1) == &eig[1]);
    debug_assert!(f[0].get(0, 1).is_zero() && f[1].get(1, 0).is_zero());
    Ok((f, eig))
}

/// Bookkeeping for one degree of a normal-form reduction.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeStep {
    pub degree: u32,
    /// (component, i, j) of every monomial removed by the conjugacy.
    pub removed: Vec<(usize, u32, u32)>,
    /// (component, i, j, coefficient) of the resonant monomials kept.
    pub retained: Vec<(usize, u32, u32, Quadratic)>,
    /// Resonant monomials absorbed by the time reparameterization.
    pub absorbed: Vec<(usize, u32, u32)>,
}

/// Degree-by-degree Poincaré–Dulac reduction of `f` with diagonal linear
/// part `eig`. With `orbital` set, resonant terms of the first component are
/// absorbed into a change of time after each degree.
fn reduce<F: Coeff>(mut f: [TruncSeries<F>; 2], eig: &[F; 2], orbital: bool) -> ([TruncSeries<F>; 2], Vec<DegreeStep>) {
    let order = f[0].order();
    let mut log = Vec::new();
    for d in 2..=order {
        let mut step = DegreeStep {
            degree: d,
            removed: Vec::new(),
            retained: Vec::new(),
            absorbed: Vec::new(),
        };
        let mut h = [TruncSeries::zero(order), TruncSeries::zero(order)];
        for (k, fk) in f.iter().enumerate() {
            for (i, j, c) in fk.homogeneous(d) {
                let e = F::from_int(i as i64) * &eig[0] + &(F::from_int(j as i64) * &eig[1]) - &eig[k];
                if e.is_zero() {
                    continue;
                }
                h[k].set(i, j, c / &e);
                step.removed.push((k, i, j));
            }
        }
        if !(h[0].is_zero() && h[1].is_zero()) {
            // z = w + h(w); new field G with (I + Dh) G = F(w + h)
            let z1 = TruncSeries::x(order).add(&h[0]);
            let z2 = TruncSeries::y(order).add(&h[1]);
            let g = [f[0].compose(&z1, &z2), f[1].compose(&z1, &z2)];
            let dh = [[h[0].dx(), h[0].dy()], [h[1].dx(), h[1].dy()]];
            let mut r = g.clone();
            for _ in 0..=order {
                let next = [
                    g[0].sub(&dh[0][0].mul(&r[0]).add(&dh[0][1].mul(&r[1]))),
                    g[1].sub(&dh[1][0].mul(&r[0]).add(&dh[1][1].mul(&r[1]))),
                ];
                if next == r {
                    break;
                }
                r = next;
            }
            f = r;
        }
        if orbital {
            let mut tau = TruncSeries::zero(order);
            for (i, j, c) in f[0].homogeneous(d) {
                // resonant by now: x·(x^{i−1} y^j) with x^{i−1} y^j of zero weight
                tau.set(i - 1, j, -(c / &eig[0]));
                step.absorbed.push((0, i, j));
            }
            if !tau.is_zero() {
                let mut t = tau;
                t.set(0, 0, F::one());
                f = [f[0].mul(&t), f[1].mul(&t)];
            }
        }
        for k in 0..2 {
            for (i, j, c) in f[k].homogeneous(d) {
                step.retained.push((k, i, j, c.to_quadratic()));
            }
        }
        log.push(step);
    }
    (f, log)
}

/// α₁ = div X(p₀) followed by α₂, …, α_{K+1}.
#[derive(Clone, Debug, PartialEq)]
pub struct SaddleQuantities {
    pub alphas: Vec<Quadratic>,
    /// 1-based index of the first nonzero α, if any was found.
    pub first_nonzero: Option<usize>,
}

impl SaddleQuantities {
    /// α_k for k ≥ 1.
    pub fn alpha(&self, k: usize) -> Option<&Quadratic> {
        k.checked_sub(1).and_then(|i| self.alphas.get(i))
    }

    pub fn count(&self) -> usize {
        self.alphas.len()
    }
}

/// Saddle quantities of a weak saddle from the Poincaré normal form
/// ẋ = x[1 + Σ aᵢ(xy)ⁱ], ẏ = −y[1 + Σ bᵢ(xy)ⁱ], α_{i+1} = aᵢ − bᵢ, with time
/// divided by λ.
pub fn saddle_quantities(sys: &PlanarSystem, saddle: &SaddleInfo, k: usize) -> Result<SaddleQuantities> {
    if saddle.strong {
        return Err(Error::StrongSaddleQuantities);
    }
    if k == 0 || k > tolerances::MAX_DEGREE as usize / 2 {
        return Err(Error::InvalidInput(format!(
            "number of saddle quantities must lie in 1..={}",
            tolerances::MAX_DEGREE / 2
        )));
    }
    let e = exact_data(saddle)?;
    if !e.lambda.is_real() {
        return Err(Error::IrrationalEigenvalues);
    }
    let degree = 2 * k as u32 + 1;
    if e.lambda.is_rational() {
        weak_quantities::<Rational>(sys, e, k, degree)
    } else {
        weak_quantities::<Quadratic>(sys, e, k, degree)
    }
}

fn weak_quantities<F: Coeff>(sys: &PlanarSystem, e: &ExactSaddle, k: usize, degree: u32) -> Result<SaddleQuantities> {
    let lam = F::from_quadratic(&e.lambda);
    let (f, eig) = eigen_series::<F>(sys, e, Order::UnstableFirst, &lam, degree)?;
    let (f, _) = reduce(f, &eig, false);
    let alpha1 = (e.lambda.clone() + &e.mu).to_quadratic();
    let mut alphas = vec![alpha1];
    for i in 1..=k as u32 {
        let a = f[0].get(i + 1, i).clone();
        let b = -f[1].get(i, i + 1).clone();
        alphas.push((a - &b).to_quadratic());
    }
    let first_nonzero = alphas.iter().position(|a| !a.is_zero()).map(|i| i + 1);
    Ok(SaddleQuantities { alphas, first_nonzero })
}

/// Formal orbital normal form at a p:q resonant saddle, in eigen-coordinates
/// (X_s, X_u) with time scaled so that the eigenvalues are (−q, p):
/// ẋ = −q x, ẏ = p y + Σ c_k x^{kp} y^{1+kq} + …
#[derive(Clone, Debug, PartialEq)]
pub struct ResonantNormalForm {
    pub p: u64,
    pub q: u64,
    /// Sign of the first retained coefficient, 0 when none appears.
    pub delta: i32,
    /// Index k of the first retained term U^k, when delta ≠ 0.
    pub ell: Option<u32>,
    /// Coefficient of the first retained term x^{ℓp} y^{1+ℓq}.
    pub a_coeff: Option<Quadratic>,
    pub truncation_degree: u32,
    /// Every retained resonant coefficient c_k up to the truncation degree.
    pub resonant: Vec<(u32, Quadratic)>,
    pub steps: Vec<DegreeStep>,
}

impl ResonantNormalForm {
    pub fn linearizable(&self) -> bool {
        self.delta == 0
    }

    /// The retained monomial exponents (i, j) of x^i y^j for U^k.
    pub fn monomial(&self, k: u32) -> (u32, u32) {
        (k * self.p as u32, 1 + k * self.q as u32)
    }

    /// Structured text listing each degree with removed, absorbed and
    /// retained monomials.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "resonance {}:{}; truncation degree {}",
            self.p, self.q, self.truncation_degree
        );
        let _ = writeln!(
            out,
            "coordinates: x stable, y unstable; time scaled to eigenvalues (-{}, {})",
            self.q, self.p
        );
        for s in &self.steps {
            let _ = writeln!(out, "degree {}", s.degree);
            let fmt_list = |v: &[(usize, u32, u32)]| {
                v.iter()
                    .map(|&(c, i, j)| format!("{}:{}", ["x'", "y'"][c], monomial_name(i, j)))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let _ = writeln!(out, "  removed: {}", fmt_list(&s.removed));
            let _ = writeln!(out, "  absorbed: {}", fmt_list(&s.absorbed));
            let kept: Vec<String> = s
                .retained
                .iter()
                .map(|(c, i, j, v)| format!("{}:{} = {}", ["x'", "y'"][*c], monomial_name(*i, *j), v))
                .collect();
            let _ = writeln!(out, "  retained: {}", kept.join(" "));
        }
        match (&self.ell, &self.a_coeff) {
            (Some(l), Some(a)) => {
                let (i, j) = self.monomial(*l);
                let _ = writeln!(
                    out,
                    "first obstruction: U^{l} term {} with coefficient {a}; delta {}",
                    monomial_name(i, j),
                    self.delta
                );
            }
            _ => {
                let _ = writeln!(
                    out,
                    "formally orbitally linearizable up to degree {}",
                    self.truncation_degree
                );
            }
        }
        out
    }
}

fn monomial_name(i: u32, j: u32) -> String {
    let part = |v: &str, e: u32| match e {
        0 => String::new(),
        1 => v.to_string(),
        _ => format!("{v}^{e}"),
    };
    let s = format!("{}{}", part("x", i), part("y", j));
    if s.is_empty() {
        "1".into()
    } else {
        s
    }
}

impl fmt::Display for ResonantNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.report())
    }
}

pub fn resonant_normal_form(sys: &PlanarSystem, saddle: &SaddleInfo, degree: u32) -> Result<ResonantNormalForm> {
    let res = match saddle.resonance {
        Some(r) if !r.numeric => r,
        Some(_) => {
            return Err(Error::InvalidInput(
                "numerically resonant saddles have no exact normal form".into(),
            ))
        }
        None => return Err(Error::Nonresonant),
    };
    if !(2..=tolerances::MAX_DEGREE).contains(&degree) {
        return Err(Error::DegreeLimit {
            degree,
            limit: tolerances::MAX_DEGREE,
        });
    }
    let e = exact_data(saddle)?;
    if e.lambda.is_rational() && e.mu.is_rational() {
        resonant_impl::<Rational>(sys, e, res, degree)
    } else {
        resonant_impl::<Quadratic>(sys, e, res, degree)
    }
}

fn resonant_impl<F: Coeff>(
    sys: &PlanarSystem,
    e: &ExactSaddle,
    res: Resonance,
    degree: u32,
) -> Result<ResonantNormalForm> {
    let p = res.p as u32;
    let q = res.q as u32;
    let scale = F::from_quadratic(&e.lambda) / &F::from_int(p as i64);
    let (f, eig) = eigen_series::<F>(sys, e, Order::StableFirst, &scale, degree)?;
    let (f, steps) = reduce(f, &eig, true);
    let mut resonant = Vec::new();
    let mut k = 1;
    while k * (p + q) < degree {
        let (i, j) = (k * p, 1 + k * q);
        resonant.push((k, f[1].get(i, j).to_quadratic()));
        k += 1;
    }
    let first = resonant.iter().find(|(_, c)| !c.is_zero()).cloned();
    let (delta, ell, a_coeff) = match first {
        Some((k, c)) => (c.signum_real().unwrap_or(0), Some(k), Some(c)),
        None => (0, None, None),
    };
    Ok(ResonantNormalForm {
        p: res.p,
        q: res.q,
        delta,
        ell,
        a_coeff,
        truncation_degree: degree,
        resonant,
        steps,
    })
}

/// Checks α₁ = … = α_{m−1} = 0 and reports whether α_m ≠ 0.
pub fn formal_iif_consistency(quantities: &SaddleQuantities, m: usize) -> Result<bool> {
    if m == 0 {
        return Err(Error::InvalidInput(
            "the vanishing multiplicity m must be at least 1".into(),
        ));
    }
    if m > quantities.count() {
        return Err(Error::InvalidInput(format!(
            "α_{m} was not computed; only {} quantities are available",
            quantities.count()
        )));
    }
    if let Some(k) = (1..m).find(|&k| !quantities.alpha(k).expect("in range").is_zero()) {
        return Err(Error::FormalContradiction { k, m });
    }
    Ok(!quantities.alpha(m).expect("in range").is_zero())
}

/// The case of the local factorization V = f_λ^{m₁} f_μ^{m₂} u.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorCase {
    /// Strong, nonresonant: (1, 1).
    Nonresonant,
    /// Strong, p:q resonant: (1 + kq, 1 + kp).
    ResonantStrong { k: u32 },
    /// Weak with V(p₀) = 0: (m, m), m ≥ 1.
    Weak { m: u32 },
    /// Weak with V(p₀) ≠ 0: (0, 0).
    WeakNonvanishing,
    /// No row of the table matches.
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalFactorization {
    pub m1: u32,
    pub m2: u32,
    /// u(p₀) ≠ 0 for u = V / (f_λ^{m₁} f_μ^{m₂}).
    pub unit_nonzero: bool,
    /// Both separatrices lie on one curve with a double point at p₀.
    pub shared_curve: bool,
    /// m₁λ + m₂μ = div X(p₀).
    pub divergence_relation: bool,
    pub case: FactorCase,
}

impl LocalFactorization {
    pub fn consistent(&self) -> bool {
        self.unit_nonzero && self.divergence_relation && self.case != FactorCase::Inconsistent
    }
}

/// Point, gradient and Hessian of f at the saddle, exactly when possible.
struct LocalJet {
    value: Quadratic,
    grad: [Quadratic; 2],
    hess: [[Quadratic; 2]; 2],
}

fn local_jet(f: &BiPoly, at: &(Rational, Rational)) -> LocalJet {
    let ev = |g: &BiPoly| Quadratic::rational(g.eval_exact(&at.0, &at.1));
    let (fx, fy) = (f.dx(), f.dy());
    LocalJet {
        value: ev(f),
        grad: [ev(&fx), ev(&fy)],
        hess: [[ev(&fx.dx()), ev(&fx.dy())], [ev(&fy.dx()), ev(&fy.dy())]],
    }
}

fn dot(a: &[Quadratic; 2], b: &[Quadratic; 2]) -> Quadratic {
    a[0].clone() * &b[0] + &(a[1].clone() * &b[1])
}

fn quad_form(h: &[[Quadratic; 2]; 2], v: &[Quadratic; 2]) -> Quadratic {
    let hv = [dot(&h[0], v), dot(&h[1], v)];
    dot(v, &hv)
}

/// Multiplicities of V along the two separatrix curves and the consistency
/// checks that follow from div X(p₀) = m₁λ + m₂μ. The curve f_λ is the one
/// whose cofactor at p₀ is λ.
pub fn local_iif_factorization(
    sys: &PlanarSystem,
    v: &InverseIntegratingFactor,
    saddle: &SaddleInfo,
    f_lambda: &BiPoly,
    f_mu: &BiPoly,
) -> Result<LocalFactorization> {
    let e = exact_data(saddle)?;
    for f in [f_lambda, f_mu] {
        if f.degree() == 0 || sys.invariant_curve_cofactor(f).is_none() {
            return Err(Error::SeparatrixMismatch);
        }
    }
    let j = e.jacobian.clone().map(|row| row.map(Quadratic::rational));
    let v_lam = right_eigenvector(&j, &e.lambda);
    let v_mu = right_eigenvector(&j, &e.mu);
    let shared = f_lambda == f_mu;
    let jl = local_jet(f_lambda, &e.location);
    let jm = local_jet(f_mu, &e.location);
    if !jl.value.is_zero() || !jm.value.is_zero() {
        return Err(Error::SeparatrixMismatch);
    }
    if shared {
        // a double point whose two branches are the separatrices
        let singular = jl.grad.iter().all(|g| g.is_zero());
        let hess_zero = jl.hess.iter().flatten().all(|h| h.is_zero());
        if !singular || hess_zero || !quad_form(&jl.hess, &v_lam).is_zero() || !quad_form(&jl.hess, &v_mu).is_zero() {
            return Err(Error::SeparatrixMismatch);
        }
    } else {
        // f_λ has cofactor λ at p₀: its gradient is a left λ-eigenvector,
        // so the curve is tangent to the μ-eigendirection, and vice versa
        for (jet, dir) in [(&jl, &v_mu), (&jm, &v_lam)] {
            if jet.grad.iter().all(|g| g.is_zero()) || !dot(&jet.grad, dir).is_zero() {
                return Err(Error::SeparatrixMismatch);
            }
        }
    }
    let (m1, m2, unit) = if shared {
        let m = multiplicity_of_factor(&v.v, f_lambda)?;
        let u = v.v.divide_exact(&f_lambda.pow(m))?.expect("f^m divides V");
        (m, m, u)
    } else {
        let m1 = multiplicity_of_factor(&v.v, f_lambda)?;
        let m2 = multiplicity_of_factor(&v.v, f_mu)?;
        let denom = &f_lambda.pow(m1) * &f_mu.pow(m2);
        let u =
            v.v.divide_exact(&denom)?
                .ok_or_else(|| Error::ConstraintViolated("separatrix factors are not coprime in V".into()))?;
        (m1, m2, u)
    };
    let unit_nonzero = !unit.eval_exact(&e.location.0, &e.location.1).is_zero();
    let div = &e.jacobian[0][0] + &e.jacobian[1][1];
    let relation = e.lambda.clone() * &Quadratic::from(m1) + &(e.mu.clone() * &Quadratic::from(m2));
    let divergence_relation = relation == Quadratic::rational(div);
    let case = factor_case(saddle, m1, m2);
    Ok(LocalFactorization {
        m1,
        m2,
        unit_nonzero,
        shared_curve: shared,
        divergence_relation,
        case,
    })
}

fn factor_case(saddle: &SaddleInfo, m1: u32, m2: u32) -> FactorCase {
    if !saddle.strong {
        return match (m1, m2) {
            (0, 0) => FactorCase::WeakNonvanishing,
            (a, b) if a == b => FactorCase::Weak { m: a },
            _ => FactorCase::Inconsistent,
        };
    }
    match saddle.resonance {
        Some(Resonance { p, q, .. }) => {
            let (p, q) = (p as u32, q as u32);
            if m1 >= 1
                && m2 >= 1
                && (m1 - 1).is_multiple_of(q)
                && (m2 - 1).is_multiple_of(p)
                && (m1 - 1) / q == (m2 - 1) / p
            {
                FactorCase::ResonantStrong { k: (m1 - 1) / q }
            } else {
                FactorCase::Inconsistent
            }
        }
        None if (m1, m2) == (1, 1) => FactorCase::Nonresonant,
        None => FactorCase::Inconsistent,
    }
}
