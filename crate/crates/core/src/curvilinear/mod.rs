//! Curvilinear coordinates (s, n) along a regular orbit γ(s) = (φ(s), ψ(s)):
//!
//! ```text
//! x = φ(s) − n ψ′(s),    y = ψ(s) + n φ′(s)
//! ```
//!
//! In this chart the field becomes ṅ = N, ṡ = S, orbits solve dn/ds = F = N/S
//! and V turns into the inverse integrating factor Ṽ = V / (J S) of that
//! scalar equation.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::algebra::{CompiledPoly, Dual, Scalar};
use crate::error::{Error, Result};
use crate::flow::{self, Dopri5, FlowSettings, Half, OdeSettings, Section};
use crate::iif::InverseIntegratingFactor;
use crate::system::{CompiledSystem, PlanarSystem};
use crate::tolerances;

/// Parameterization of the orbit.
#[derive(Clone, Debug, PartialEq)]
pub enum Orbit {
    /// `(cx + a cos s, cy + b sin s)`.
    Ellipse { center: (f64, f64), a: f64, b: f64 },
    /// Polynomials in s, coefficients in ascending order.
    Polynomial { x: Vec<f64>, y: Vec<f64> },
    /// Real trigonometric interpolant with period `period`:
    /// `c₀ + Σ aₖ cos(kωs) + bₖ sin(kωs)` per coordinate.
    Fourier {
        period: f64,
        x: FourierSeries,
        y: FourierSeries,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries {
    pub mean: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl FourierSeries {
    /// Interpolates equispaced samples over one period, dropping the Nyquist
    /// mode so that derivatives stay real.
    fn interpolate(values: &[f64]) -> Self {
        let n = values.len();
        let modes = (n - 1) / 2;
        let mean = values.iter().sum::<f64>() / n as f64;
        let mut cos = Vec::with_capacity(modes);
        let mut sin = Vec::with_capacity(modes);
        for k in 1..=modes {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                let th = 2.0 * PI * (k * j) as f64 / n as f64;
                a += v * th.cos();
                b += v * th.sin();
            }
            cos.push(2.0 * a / n as f64);
            sin.push(2.0 * b / n as f64);
        }
        FourierSeries { mean, cos, sin }
    }

    /// Value and first two derivatives at `s` for angular frequency ω.
    fn eval(&self, omega: f64, s: f64) -> [f64; 3] {
        let mut out = [self.mean, 0.0, 0.0];
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let w = omega * (k + 1) as f64;
            let (sn, cs) = (w * s).sin_cos();
            out[0] += a * cs + b * sn;
            out[1] += w * (b * cs - a * sn);
            out[2] -= w * w * (a * cs + b * sn);
        }
        out
    }
}

fn poly_eval(c: &[f64], s: f64) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (k, a) in c.iter().enumerate().rev() {
        let k = k as f64;
        out[0] = out[0] * s + a;
        if k >= 1.0 {
            out[1] = out[1] * s + a * k;
        }
        if k >= 2.0 {
            out[2] = out[2] * s + a * k * (k - 1.0);
        }
    }
    out
}

impl Orbit {
    /// `[φ, ψ, φ′, ψ′, φ″, ψ″]` at s.
    pub fn jet(&self, s: f64) -> [f64; 6] {
        let (x, y) = match self {
            Orbit::Ellipse { center, a, b } => {
                let (sn, cs) = s.sin_cos();
                (
                    [center.0 + a * cs, -a * sn, -a * cs],
                    [center.1 + b * sn, b * cs, -b * sn],
                )
            }
            Orbit::Polynomial { x, y } => (poly_eval(x, s), poly_eval(y, s)),
            Orbit::Fourier { period, x, y } => {
                let w = 2.0 * PI / period;
                (x.eval(w, s), y.eval(w, s))
            }
        };
        [x[0], y[0], x[1], y[1], x[2], y[2]]
    }
}

/// A regular orbit together with the induced (s, n) chart.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvilinearFrame {
    pub orbit: Orbit,
    /// `[s₀, s₁]`; for periodic frames `L = s₁ − s₀` is the period.
    pub s_range: (f64, f64),
    pub periodic: bool,
    /// Largest |n| accepted by [`to_curvilinear`].
    pub tube_radius: f64,
    seeds: Vec<(f64, f64, f64)>,
}

const SEED_COUNT: usize = 1024;

impl CurvilinearFrame {
    /// Checks regularity on a dense sample and sets the tube radius to a
    /// fraction of the distance at which the chart degenerates.
    pub fn new(orbit: Orbit, s_range: (f64, f64), periodic: bool) -> Result<Self> {
        let (s0, s1) = s_range;
        if !(s0.is_finite() && s1.is_finite() && s1 > s0) {
            return Err(Error::InvalidInput(format!("invalid parameter range [{s0}, {s1}]")));
        }
        let mut seeds = Vec::with_capacity(SEED_COUNT + 1);
        let mut min_reach = f64::INFINITY;
        let mut min_speed = f64::INFINITY;
        let mut max_speed = 0.0f64;
        for k in 0..=SEED_COUNT {
            let s = s0 + (s1 - s0) * k as f64 / SEED_COUNT as f64;
            let g = orbit.jet(s);
            let speed2 = g[2] * g[2] + g[3] * g[3];
            min_speed = min_speed.min(speed2.sqrt());
            max_speed = max_speed.max(speed2.sqrt());
            let cross = (g[3] * g[4] - g[2] * g[5]).abs();
            if cross > 0.0 {
                min_reach = min_reach.min(speed2 / cross);
            }
            seeds.push((s, g[0], g[1]));
        }
        if !(min_speed > 1e-12 * max_speed.max(1.0)) {
            return Err(Error::InvalidInput("orbit parameterization is not regular".into()));
        }
        if periodic {
            seeds.pop();
        }
        let tube_radius = if min_reach.is_finite() {
            tolerances::TUBE_FRACTION * min_reach
        } else {
            f64::INFINITY
        };
        Ok(CurvilinearFrame {
            orbit,
            s_range,
            periodic,
            tube_radius,
            seeds,
        })
    }

    /// Ellipse `(cx + a cos s, cy + b sin s)`, s ∈ [0, 2π).
    pub fn ellipse(center: (f64, f64), a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidInput("ellipse semi-axes must be positive".into()));
        }
        Self::new(Orbit::Ellipse { center, a, b }, (0.0, 2.0 * PI), true)
    }

    /// Open polynomial arc on `s_range`.
    pub fn polynomial(x: Vec<f64>, y: Vec<f64>, s_range: (f64, f64)) -> Result<Self> {
        Self::new(Orbit::Polynomial { x, y }, s_range, false)
    }

    /// Trigonometric interpolant of the periodic orbit through `start`,
    /// parameterized by time. The period comes from two consecutive
    /// crossings of `section`; `nodes` equispaced states are integrated.
    pub fn from_periodic_orbit(
        sys: &PlanarSystem,
        start: (f64, f64),
        section: &Section,
        nodes: usize,
        settings: &FlowSettings,
    ) -> Result<Self> {
        if nodes < 8 {
            return Err(Error::InvalidInput("at least 8 interpolation nodes are needed".into()));
        }
        let cycle = flow::characteristic_exponent(sys, start, section, settings)?;
        let period = cycle.period;
        let dt = period / nodes as f64;
        let mut xs = Vec::with_capacity(nodes);
        let mut ys = Vec::with_capacity(nodes);
        let mut p = start;
        for _ in 0..nodes {
            xs.push(p.0);
            ys.push(p.1);
            p = flow::integrate_with(sys, p, dt, settings, &[])?.trajectory.end();
        }
        let orbit = Orbit::Fourier {
            period,
            x: FourierSeries::interpolate(&xs),
            y: FourierSeries::interpolate(&ys),
        };
        Self::new(orbit, (0.0, period), true)
    }

    pub fn with_tube_radius(mut self, radius: f64) -> Self {
        self.tube_radius = radius;
        self
    }

    /// L = s₁ − s₀.
    pub fn length(&self) -> f64 {
        self.s_range.1 - self.s_range.0
    }

    pub fn jet(&self, s: f64) -> [f64; 6] {
        self.orbit.jet(s)
    }

    /// |γ′(s)|.
    pub fn speed(&self, s: f64) -> f64 {
        let g = self.jet(s);
        g[2].hypot(g[3])
    }

    /// The chart (s, n) ↦ (x, y).
    pub fn chart(&self, s: f64, n: f64) -> (f64, f64) {
        self.chart_generic(s, n)
    }

    fn chart_generic<T: Scalar>(&self, s: f64, n: T) -> (T, T) {
        let g = self.jet(s);
        (T::from(g[0]) - n * T::from(g[3]), T::from(g[1]) + n * T::from(g[2]))
    }

    /// Determinant of the chart differential.
    pub fn jacobian(&self, s: f64, n: f64) -> f64 {
        let g = self.jet(s);
        (g[2] - n * g[5]) * g[2] + g[3] * (g[3] + n * g[4])
    }

    /// Unit normal at s, the direction of increasing n.
    pub fn normal(&self, s: f64) -> (f64, f64) {
        let g = self.jet(s);
        let v = g[2].hypot(g[3]);
        (-g[3] / v, g[2] / v)
    }

    fn wrap(&self, s: f64) -> f64 {
        if self.periodic {
            self.s_range.0 + (s - self.s_range.0).rem_euclid(self.length())
        } else {
            s
        }
    }

    /// N, S, J and J·S (which is φ′P + ψ′Q) at (s, n) for a generic scalar n.
    fn raw_fields<T: Scalar>(&self, c: &CompiledSystem, s: f64, n: T) -> (T, T, T) {
        let g = self.jet(s);
        let (x, y) = self.chart_generic(s, n);
        let (p, q) = c.field_generic(x, y);
        let (f1, f2) = (T::from(g[2]), T::from(g[3]));
        let a = f1 - n * T::from(g[5]);
        let d = f2 + n * T::from(g[4]);
        let jac = a * f1 + f2 * d;
        let js = f1 * p + f2 * q;
        let jn = a * q - d * p;
        (jn, js, jac)
    }

    /// F = N/S together with ∂F/∂n.
    fn slope_with_derivative(&self, c: &CompiledSystem, s: f64, n: f64) -> Result<(f64, f64)> {
        let (jn, js, _) = self.raw_fields(c, s, Dual::var(n));
        if js.re.abs() < tolerances::S_VANISHED {
            return Err(Error::SVanished);
        }
        let f = jn / js;
        Ok((f.re, f.eps))
    }
}

/// N = ṅ, S = ṡ, F = N/S and the chart Jacobian J at a point of the chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameFields {
    pub n_dot: f64,
    pub s_dot: f64,
    pub f: f64,
    pub jac: f64,
}

/// Inverts the chart by damped Newton iteration from the nearest orbit sample.
pub fn to_curvilinear(frame: &CurvilinearFrame, pt: (f64, f64)) -> Result<(f64, f64)> {
    let (px, py) = pt;
    let &(mut s, _, _) = frame
        .seeds
        .iter()
        .min_by(|a, b| {
            let da = (a.1 - px).hypot(a.2 - py);
            let db = (b.1 - px).hypot(b.2 - py);
            da.total_cmp(&db)
        })
        .expect("frames carry seeds");
    let g = frame.jet(s);
    let mut n = ((px - g[0]) * -g[3] + (py - g[1]) * g[2]) / (g[2] * g[2] + g[3] * g[3]);
    let residual = |s: f64, n: f64| {
        let (x, y) = frame.chart(s, n);
        (x - px, y - py)
    };
    let mut r = residual(s, n);
    for _ in 0..100 {
        let rn = r.0.hypot(r.1);
        if rn < tolerances::CHART_INVERSION * 1e-3 {
            break;
        }
        let g = frame.jet(s);
        let (a, b, c, d) = (g[2] - n * g[5], -g[3], g[3] + n * g[4], g[2]);
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::OutsideTube);
        }
        let ds = (d * r.0 - b * r.1) / det;
        let dn = (a * r.1 - c * r.0) / det;
        let mut step = 1.0;
        loop {
            let (s1, n1) = (s - step * ds, n - step * dn);
            let r1 = residual(s1, n1);
            if r1.0.hypot(r1.1) < rn || step < 1e-6 {
                s = s1;
                n = n1;
                r = r1;
                break;
            }
            step *= 0.5;
        }
        if step < 1e-6 {
            break;
        }
    }
    let s = frame.wrap(s);
    let r = residual(s, n);
    if !(r.0.hypot(r.1) < tolerances::CHART_INVERSION) || n.abs() > frame.tube_radius {
        return Err(Error::OutsideTube);
    }
    if !frame.periodic && (s < frame.s_range.0 || s > frame.s_range.1) {
        return Err(Error::OutsideTube);
    }
    Ok((s, n))
}

pub fn frame_fields(frame: &CurvilinearFrame, sys: &PlanarSystem, s: f64, n: f64) -> Result<FrameFields> {
    frame_fields_compiled(frame, &sys.compiled(), s, n)
}

pub fn frame_fields_compiled(frame: &CurvilinearFrame, c: &CompiledSystem, s: f64, n: f64) -> Result<FrameFields> {
    let (jn, js, jac) = frame.raw_fields(c, s, n);
    let s_dot = js / jac;
    if !(s_dot.abs() >= tolerances::S_VANISHED) {
        return Err(Error::SVanished);
    }
    let n_dot = jn / jac;
    Ok(FrameFields {
        n_dot,
        s_dot,
        f: n_dot / s_dot,
        jac,
    })
}

/// Ṽ(s, n) = V(x(s,n), y(s,n)) / (J S).
pub fn tilde_v(
    frame: &CurvilinearFrame,
    sys: &PlanarSystem,
    v: &InverseIntegratingFactor,
    s: f64,
    n: f64,
) -> Result<f64> {
    tilde_v_compiled(frame, &sys.compiled(), &v.v.compile(), s, n)
}

pub fn tilde_v_compiled(frame: &CurvilinearFrame, c: &CompiledSystem, v: &CompiledPoly, s: f64, n: f64) -> Result<f64> {
    let ff = frame_fields_compiled(frame, c, s, n)?;
    let (x, y) = frame.chart(s, n);
    Ok(v.eval(x, y) / (ff.jac * ff.s_dot))
}

/// `count` points spaced geometrically over `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(
        lo > 0.0 && hi > lo && count >= 2,
        "geometric grid needs 0 < lo < hi and two points"
    );
    let r = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|k| lo * (r * k as f64).exp()).collect()
}

/// The default multiplicity grid n ∈ [1e−4, 1e−2] with 12 points.
pub fn default_n_grid() -> Vec<f64> {
    let (lo, hi) = tolerances::MULTIPLICITY_WINDOW;
    geometric_grid(lo, hi, tolerances::MULTIPLICITY_POINTS)
}

/// Vanishing multiplicity of V along the frame's orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiplicityEstimate {
    pub m: u32,
    /// (s, v(s)) with V(x(s,n), y(s,n)) ≈ v(s) nᵐ.
    pub leading_coeff_samples: Vec<(f64, f64)>,
    /// Largest distance between a fitted slope and m.
    pub fit_residual: f64,
    /// Raw fitted slope at each sampled s.
    pub slopes: Vec<f64>,
}

/// Least-squares fit of log|V| against log n at each sampled s.
pub fn numeric_multiplicity(
    frame: &CurvilinearFrame,
    sys: &PlanarSystem,
    v: &InverseIntegratingFactor,
    s_samples: &[f64],
    n_grid: &[f64],
) -> Result<MultiplicityEstimate> {
    if s_samples.is_empty() || n_grid.len() < 3 {
        return Err(Error::InvalidInput(
            "multiplicity fit needs s samples and at least 3 grid points".into(),
        ));
    }
    if n_grid.iter().any(|&n| !(n > 0.0) || n > frame.tube_radius) {
        return Err(Error::InvalidInput(
            "n grid must be positive and inside the tube".into(),
        ));
    }
    let c = sys.compiled();
    let vc = v.v.compile();
    let mut slopes = Vec::with_capacity(s_samples.len());
    let mut leading = Vec::with_capacity(s_samples.len());
    let mut m_common: Option<i64> = None;
    let mut worst = 0.0f64;
    for &s in s_samples {
        frame_fields_compiled(frame, &c, s, 0.0)?;
        let mut pts = Vec::with_capacity(n_grid.len());
        let mut sign = 0.0;
        for &n in n_grid {
            let (x, y) = frame.chart(s, n);
            let val = vc.eval(x, y);
            if val.abs() > tolerances::NOISE_FLOOR {
                pts.push((n.ln(), val.abs().ln()));
                if sign == 0.0 {
                    sign = val.signum();
                }
            }
        }
        if pts.len() < 3 {
            return Err(Error::VIdenticallySmall);
        }
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let m = slope.round() as i64;
        worst = worst.max((slope - m as f64).abs());
        if m < 0 || worst >= tolerances::SLOPE_ROUNDING || m_common.is_some_and(|c| c != m) {
            return Err(Error::InconsistentMultiplicity);
        }
        m_common = Some(m);
        // v(s) from the intercept of the fit with the slope fixed at m
        let log_v = my - m as f64 * mx;
        leading.push((s, sign * log_v.exp()));
        slopes.push(slope);
    }
    Ok(MultiplicityEstimate {
        m: m_common.expect("at least one sample") as u32,
        leading_coeff_samples: leading,
        fit_residual: worst,
        slopes,
    })
}

/// One point of the scalar flow dn/ds = F.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiPoint {
    pub s: f64,
    pub n: f64,
    /// ∫ ∂F/∂n along the solution from its initial s.
    pub log_derivative: f64,
}

/// Integrates dn/ds = F from (s₀, n₀) and reports the solution at each of
/// `s_out` (increasing, all ≥ s₀), with ∂F/∂n from dual numbers.
pub fn psi_flow(
    frame: &CurvilinearFrame,
    sys: &PlanarSystem,
    s0: f64,
    n0: f64,
    s_out: &[f64],
    rel_tol: f64,
) -> Result<Vec<PsiPoint>> {
    let c = sys.compiled();
    let failure = std::cell::Cell::new(None);
    let rhs = |s: f64, y: &[f64], dy: &mut [f64]| match frame.slope_with_derivative(&c, s, y[0]) {
        Ok((f, df)) => {
            dy[0] = f;
            dy[1] = df;
        }
        Err(e) => {
            failure.set(Some(e));
            dy[0] = f64::NAN;
            dy[1] = f64::NAN;
        }
    };
    let mut settings = OdeSettings::new(rel_tol)?;
    settings.abs_tol = rel_tol * 1e-6;
    settings.max_step = frame.length() / 16.0;
    let mut ode = Dopri5::new(&rhs, s0, vec![n0, 0.0], settings);
    let mut out = Vec::with_capacity(s_out.len());
    for &target in s_out {
        if target < ode.t {
            return Err(Error::InvalidInput("output points must be increasing".into()));
        }
        while ode.t < target {
            let r = ode.step(target);
            if let Some(e) = failure.take() {
                return Err(e);
            }
            r?;
            if ode.y[0].abs() > frame.tube_radius {
                return Err(Error::OutsideTube);
            }
        }
        out.push(PsiPoint {
            s: target,
            n: ode.y[0],
            log_derivative: ode.y[1],
        });
    }
    Ok(out)
}

/// Largest relative deviation of Ṽ(s, Ψ(s; n₀)) · exp(−∫₀ˢ ∂F/∂n) from its
/// initial value, sampled at `count` points across the frame.
pub fn psi_invariance_deviation(
    frame: &CurvilinearFrame,
    sys: &PlanarSystem,
    v: &InverseIntegratingFactor,
    n0: f64,
    count: usize,
) -> Result<f64> {
    let (s0, s1) = frame.s_range;
    let s_out: Vec<f64> = (1..=count).map(|k| s0 + (s1 - s0) * k as f64 / count as f64).collect();
    let path = psi_flow(frame, sys, s0, n0, &s_out, tolerances::DEFAULT_REL_TOL)?;
    let c = sys.compiled();
    let vc = v.v.compile();
    let base = tilde_v_compiled(frame, &c, &vc, s0, n0)?;
    let mut worst = 0.0f64;
    for pt in path {
        let value = tilde_v_compiled(frame, &c, &vc, pt.s, pt.n)? * (-pt.log_derivative).exp();
        worst = worst.max((value - base).abs() / base.abs().max(tolerances::RESIDUAL_FLOOR));
    }
    Ok(worst)
}

/// Both sides of Ṽ(s_to, Π(σ)) = Ṽ(s_from, σ) Π′(σ) at one σ, in n units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdentityRow {
    pub sigma: f64,
    pub image: f64,
    pub derivative: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityCheck {
    pub rows: Vec<IdentityRow>,
    pub max_residual: f64,
}

impl IdentityCheck {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sigma,image,derivative,lhs,rhs,residual\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                r.sigma, r.image, r.derivative, r.lhs, r.rhs, r.residual
            );
        }
        out
    }
}

/// How the transition map and its derivative are computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MapRoute {
    /// Planar flow between the normal sections, variational derivative.
    #[default]
    Planar,
    /// The scalar equation dn/ds = F across the chart, with Π′ = exp ∫ ∂F/∂n.
    Chart,
}

/// Checks the transition identity between the normal sections at both ends
/// of the frame (the same section for periodic frames). On the planar route
/// the map follows the flow, so when time runs against s the two ends swap.
pub fn verify_transition_identity(
    frame: &CurvilinearFrame,
    sys: &PlanarSystem,
    v: &InverseIntegratingFactor,
    sigma_grid: &[f64],
    route: MapRoute,
    settings: &FlowSettings,
) -> Result<IdentityCheck> {
    let c = sys.compiled();
    let vc = v.v.compile();
    let (a, b) = frame.s_range;
    let forward = route == MapRoute::Chart || frame_fields_compiled(frame, &c, a, 0.0)?.s_dot > 0.0;
    let (s_from, s_to) = if forward { (a, b) } else { (b, a) };
    let section = |s: f64| -> Result<Section> {
        let g = frame.jet(s);
        let reach = frame.tube_radius / tolerances::TUBE_FRACTION * frame.speed(s);
        Ok(Section::from_compiled(&c, (g[0], g[1]), frame.normal(s), Half::Positive)?.with_extent(reach))
    };
    let from = section(s_from)?;
    let to = section(s_to)?;
    let (v_from, v_to) = (frame.speed(s_from), frame.speed(s_to));
    let mut rows = Vec::with_capacity(sigma_grid.len());
    let mut max_residual = 0.0f64;
    for &sigma in sigma_grid {
        let (image, derivative) = match route {
            MapRoute::Planar => {
                let sample = flow::transition_map_compiled(&c, &from, &to, sigma * v_from, settings)?;
                (sample.image / v_to, sample.derivative * v_from / v_to)
            }
            MapRoute::Chart => {
                let end = psi_flow(frame, sys, s_from, sigma, &[s_to], settings.rel_tol)?[0];
                (end.n, end.log_derivative.exp())
            }
        };
        let lhs = tilde_v_compiled(frame, &c, &vc, s_to, image)?;
        let rhs = tilde_v_compiled(frame, &c, &vc, s_from, sigma)? * derivative;
        let scale = lhs.abs().max(rhs.abs()).max(tolerances::RESIDUAL_FLOOR);
        let residual = (lhs - rhs).abs() / scale;
        max_residual = max_residual.max(residual);
        rows.push(IdentityRow {
            sigma,
            image,
            derivative,
            lhs,
            rhs,
            residual,
        });
    }
    Ok(IdentityCheck { rows, max_residual })
}

/// Parameters (λ, m₁, m₂) of the ellipse family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipseParams {
    pub lambda: f64,
    pub m1: f64,
    pub m2: f64,
}

impl EllipseParams {
    /// The limit cycle `1 + m₁x² + m₁m₂y² = 0` as the frame
    /// `(√m₂ cos s, sin s)/√(−m₁m₂)`.
    pub fn cycle_frame(&self) -> Result<CurvilinearFrame> {
        if !(self.m1 < 0.0 && self.m2 > 0.0) {
            return Err(Error::Domain("the ellipse exists only for m1 < 0 < m2".into()));
        }
        let k = (-self.m1 * self.m2).sqrt();
        CurvilinearFrame::ellipse((0.0, 0.0), self.m2.sqrt() / k, 1.0 / k)
    }

    /// The integration constant of the implicit return map, from the return
    /// map's multiplier e^{β₁} with β₁ = −2λT.
    pub fn k0(&self) -> Result<f64> {
        let pi = PI;
        if self.m1 < -1.0 {
            Ok((-2.0 * self.lambda * self.m1 * pi).exp())
        } else if self.m1 < 0.0 && self.m1 > -1.0 {
            Ok((2.0 * self.lambda * self.m1 * pi).exp())
        } else {
            Err(Error::Domain("k0 is defined for m1 < 0 with m1 ≠ −1".into()))
        }
    }

    /// Ṽ(0, n) for the cycle frame in closed form.
    pub fn tilde_v_at_zero(&self, n: f64) -> f64 {
        let r = self.m2.sqrt();
        self.m1 * n * (n - r) * (n - 2.0 * r) / (n * n - 2.0 * n * r + self.m2 + self.m1 * self.m2)
    }
}

/// Relative mismatch of the implicit return map
/// `|Π(Π−2√m₂)|^{(1+m₁)/2} / |Π−√m₂|^{m₁} = k₀ |σ(σ−2√m₂)|^{(1+m₁)/2} / |σ−√m₂|^{m₁}`.
/// Absolute values keep both sides real for every m₁ on (0, √m₂).
pub fn implicit_poincare_check(sigma: f64, pi_value: f64, params: &EllipseParams, k0: f64) -> Result<f64> {
    if !(params.m2 > 0.0) {
        return Err(Error::Domain("m2 must be positive".into()));
    }
    let r = params.m2.sqrt();
    let inside = |t: f64| t > 0.0 && t < r;
    if !inside(sigma) || !inside(pi_value) {
        return Err(Error::Domain(format!("σ and Π must lie in (0, {r})")));
    }
    let side = |t: f64| {
        let e = (1.0 + params.m1) / 2.0;
        e * (t * (t - 2.0 * r)).abs().ln() - params.m1 * (t - r).abs().ln()
    };
    // compare in log form: both sides are positive
    let diff = side(pi_value) - (k0.ln() + side(sigma));
    Ok(diff.exp_m1().abs())
}

/// The Hamiltonian loop `y² = x²(1−x)` as `(1 − s², s(1 − s²))`, s ∈ [−1, 1].
pub fn hamiltonian_loop_frame() -> CurvilinearFrame {
    CurvilinearFrame::polynomial(vec![1.0, 0.0, -1.0], vec![0.0, 1.0, 0.0, -1.0], (-1.0, 1.0))
        .expect("regular parameterization")
}

/// The nodal loop `y² = (1−x)²(1+x)` as `(s² − 1, s(2 − s²))`, s ∈ [−√2, √2].
pub fn nodal_loop_frame() -> CurvilinearFrame {
    let r = 2f64.sqrt();
    CurvilinearFrame::polynomial(vec![-1.0, 0.0, 1.0], vec![0.0, 2.0, 0.0, -1.0], (-r, r))
        .expect("regular parameterization")
}

/// `s,x,y` samples of the orbit.
pub fn frame_csv(frame: &CurvilinearFrame, count: usize) -> String {
    let mut out = String::from("s,x,y\n");
    let (a, b) = frame.s_range;
    for k in 0..=count {
        let s = a + (b - a) * k as f64 / count.max(1) as f64;
        let (x, y) = frame.chart(s, 0.0);
        let _ = writeln!(out, "{s:.12e},{x:.12e},{y:.12e}");
    }
    out
}
