//! Numerical flow of a planar field: trajectories, transition and return maps
//! with variational derivatives, characteristic exponents and homoclinic loops.

mod ode;

pub use ode::{locate_event, Dopri5, EventFunction, OdeSettings, Rhs, StepData};

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::system::{CompiledSystem, PlanarSystem, SingularPoint};
use crate::tolerances;

/// Integration settings shared by the flow operations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowSettings {
    pub rel_tol: f64,
    /// Orbits leaving `[-bbox, bbox]²` are reported as escaped.
    pub bbox: f64,
    pub max_time: f64,
    pub max_step: f64,
    /// When set, trajectories also record dense-output samples at this spacing.
    pub sample_dt: Option<f64>,
}

impl Default for FlowSettings {
    fn default() -> Self {
        FlowSettings {
            rel_tol: tolerances::DEFAULT_REL_TOL,
            bbox: tolerances::BOUNDING_BOX,
            max_time: tolerances::MAX_TIME,
            max_step: 0.1,
            sample_dt: None,
        }
    }
}

impl FlowSettings {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        FlowSettings {
            rel_tol,
            ..Default::default()
        }
    }

    fn ode(&self) -> Result<OdeSettings> {
        let mut s = OdeSettings::new(self.rel_tol)?;
        s.max_step = self.max_step;
        Ok(s)
    }
}

/// Time-ordered samples (t, x, y) of an orbit.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<(f64, f64, f64)>,
    pub tolerance: f64,
}

impl Trajectory {
    pub fn start(&self) -> (f64, f64) {
        let s = self.samples[0];
        (s.1, s.2)
    }

    pub fn end(&self) -> (f64, f64) {
        let s = self.samples[self.samples.len() - 1];
        (s.1, s.2)
    }

    pub fn duration(&self) -> f64 {
        self.samples[self.samples.len() - 1].0 - self.samples[0].0
    }

    /// CSV with header `t,x,y`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x,y\n");
        for (t, x, y) in &self.samples {
            let _ = writeln!(out, "{t:.15e},{x:.15e},{y:.15e}");
        }
        out
    }

    fn push(&mut self, t: f64, x: f64, y: f64) {
        if self.samples.last().is_none_or(|l| t > l.0) {
            self.samples.push((t, x, y));
        }
    }
}

/// Which side of the base point carries positive σ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Half {
    #[default]
    Positive,
    Negative,
}

/// A straight transversal segment `base + σ·e`, |σ| ≤ extent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Section {
    pub base: (f64, f64),
    /// Unit direction of the parameter axis.
    pub direction: (f64, f64),
    pub half: Half,
    pub extent: f64,
    /// Sign of ν·X at the base (the crossing orientation counted as a hit).
    crossing: f64,
}

impl Section {
    /// Builds a section after checking that the field is nonzero at `base`
    /// and not parallel to `direction`.
    pub fn new(sys: &PlanarSystem, base: (f64, f64), direction: (f64, f64), half: Half) -> Result<Self> {
        Self::from_compiled(&sys.compiled(), base, direction, half)
    }

    pub fn from_compiled(c: &CompiledSystem, base: (f64, f64), direction: (f64, f64), half: Half) -> Result<Self> {
        let norm = direction.0.hypot(direction.1);
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidInput("section direction must be a nonzero vector".into()));
        }
        let d = (direction.0 / norm, direction.1 / norm);
        let (p, q) = c.field(base.0, base.1);
        let speed = p.hypot(q);
        if speed <= tolerances::SINGULAR_POINT {
            return Err(Error::InvalidInput("section base point is singular".into()));
        }
        let mut s = Section {
            base,
            direction: d,
            half,
            extent: f64::INFINITY,
            crossing: 0.0,
        };
        let (nx, ny) = s.normal();
        let cross = (nx * p + ny * q) / speed;
        if cross.abs() < 1e-8 {
            return Err(Error::InvalidInput("section is not transversal to the flow".into()));
        }
        s.crossing = cross.signum();
        Ok(s)
    }

    pub fn with_extent(mut self, extent: f64) -> Self {
        self.extent = extent;
        self
    }

    /// Oriented axis e (direction flipped for the negative half).
    pub fn axis(&self) -> (f64, f64) {
        match self.half {
            Half::Positive => self.direction,
            Half::Negative => (-self.direction.0, -self.direction.1),
        }
    }

    /// Unit normal ν, e rotated by +90°.
    pub fn normal(&self) -> (f64, f64) {
        let e = self.axis();
        (-e.1, e.0)
    }

    pub fn point(&self, sigma: f64) -> (f64, f64) {
        let e = self.axis();
        (self.base.0 + sigma * e.0, self.base.1 + sigma * e.1)
    }

    pub fn sigma_of(&self, x: f64, y: f64) -> f64 {
        let e = self.axis();
        e.0 * (x - self.base.0) + e.1 * (y - self.base.1)
    }

    fn counts(&self, c: &CompiledSystem, x: f64, y: f64) -> bool {
        let (nx, ny) = self.normal();
        let (p, q) = c.field(x, y);
        (nx * p + ny * q).signum() == self.crossing && self.sigma_of(x, y).abs() <= self.extent
    }
}

impl EventFunction for Section {
    fn value(&self, y: &[f64]) -> f64 {
        let (nx, ny) = self.normal();
        nx * (y[0] - self.base.0) + ny * (y[1] - self.base.1)
    }
    fn gradient(&self, y: &[f64]) -> Vec<f64> {
        let (nx, ny) = self.normal();
        let mut g = vec![0.0; y.len()];
        g[0] = nx;
        g[1] = ny;
        g
    }
}

/// Circle |z − c| = r as an event.
#[derive(Clone, Copy, Debug)]
struct Circle {
    center: (f64, f64),
    radius: f64,
}

impl EventFunction for Circle {
    fn value(&self, y: &[f64]) -> f64 {
        let (dx, dy) = (y[0] - self.center.0, y[1] - self.center.1);
        (dx * dx + dy * dy).sqrt() - self.radius
    }
    fn gradient(&self, y: &[f64]) -> Vec<f64> {
        let (dx, dy) = (y[0] - self.center.0, y[1] - self.center.1);
        let r = (dx * dx + dy * dy).sqrt().max(f64::MIN_POSITIVE);
        let mut g = vec![0.0; y.len()];
        g[0] = dx / r;
        g[1] = dy / r;
        g
    }
}

/// A located crossing of a section.
#[derive(Clone, Debug, PartialEq)]
pub struct EventHit {
    pub section: usize,
    pub t: f64,
    pub point: (f64, f64),
    pub sigma: f64,
}

/// A point of a transition map Σ₁ → Σ₂ with its derivative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapSample {
    pub sigma: f64,
    pub image: f64,
    pub derivative: f64,
    /// Flight time between the sections.
    pub time: f64,
}

/// CSV with header `sigma,image,derivative`.
pub fn map_samples_csv(samples: &[MapSample]) -> String {
    let mut out = String::from("sigma,image,derivative\n");
    for s in samples {
        let _ = writeln!(out, "{:.15e},{:.15e},{:.15e}", s.sigma, s.image, s.derivative);
    }
    out
}

/// State layout: x, y, then the 2×2 monodromy (row-major) when requested,
/// then the divergence integral when requested.
#[derive(Clone, Copy)]
struct Augment {
    variational: bool,
    divergence: bool,
}

impl Augment {
    fn initial(&self, x: f64, y: f64) -> Vec<f64> {
        let mut v = vec![x, y];
        if self.variational {
            v.extend_from_slice(&[1.0, 0.0, 0.0, 1.0]);
        }
        if self.divergence {
            v.push(0.0);
        }
        v
    }

    fn div_index(&self) -> usize {
        if self.variational {
            6
        } else {
            2
        }
    }
}

fn planar_rhs(c: &CompiledSystem, aug: Augment) -> impl Fn(f64, &[f64], &mut [f64]) + '_ {
    move |_t, s, d| {
        let (x, y) = (s[0], s[1]);
        d[0] = c.p.eval(x, y);
        d[1] = c.q.eval(x, y);
        if aug.variational || aug.divergence {
            let j = c.jacobian(x, y);
            if aug.variational {
                d[2] = j[0][0] * s[2] + j[0][1] * s[4];
                d[3] = j[0][0] * s[3] + j[0][1] * s[5];
                d[4] = j[1][0] * s[2] + j[1][1] * s[4];
                d[5] = j[1][0] * s[3] + j[1][1] * s[5];
            }
            if aug.divergence {
                d[aug.div_index()] = j[0][0] + j[1][1];
            }
        }
    }
}

enum Control {
    Continue,
    Stop,
}

struct DriveEnd {
    stopped: bool,
}

/// Integrates from `y0` to `t_end`, checking the bounding box after every
/// step, and reports located event crossings in time order.
fn drive(
    rhs: &Rhs<'_>,
    y0: Vec<f64>,
    t_end: f64,
    settings: &FlowSettings,
    events: &[&dyn EventFunction],
    mut on_step: impl FnMut(&Dopri5<'_>, &StepData),
    mut on_event: impl FnMut(usize, f64, &[f64]) -> Control,
) -> Result<DriveEnd> {
    let mut solver = Dopri5::new(rhs, 0.0, y0, settings.ode()?);
    while solver.t < t_end {
        let step = solver.step(t_end)?;
        let (x, y) = (step.y1[0], step.y1[1]);
        if !(x.abs() <= settings.bbox && y.abs() <= settings.bbox) {
            return Err(Error::EscapedRegion);
        }
        on_step(&solver, &step);
        let mut hits: Vec<(f64, usize, Vec<f64>)> = Vec::new();
        for (k, ev) in events.iter().enumerate() {
            let g0 = ev.value(&step.y0);
            let g1 = ev.value(&step.y1);
            if g0 != 0.0 && (g0 * g1 < 0.0 || g1 == 0.0) {
                let (t, y) = locate_event(&solver, &step, *ev);
                hits.push((t, k, y));
            }
        }
        hits.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (t, k, y) in hits {
            if let Control::Stop = on_event(k, t, &y) {
                return Ok(DriveEnd { stopped: true });
            }
        }
    }
    Ok(DriveEnd { stopped: false })
}

fn sampler(settings: &FlowSettings) -> impl FnMut(&Dopri5<'_>, &StepData, &mut Trajectory) + '_ {
    move |_s, step, traj| {
        if let Some(dt) = settings.sample_dt {
            let mut t = (step.t0 / dt).floor() * dt + dt;
            while t < step.t1() {
                let y = step.dense(t);
                traj.push(t, y[0], y[1]);
                t += dt;
            }
        }
        traj.push(step.t1(), step.y1[0], step.y1[1]);
    }
}

/// Result of [`integrate`].
#[derive(Clone, Debug)]
pub struct Integration {
    pub trajectory: Trajectory,
    pub hits: Vec<EventHit>,
}

/// Integrates the orbit of `p0` over `[0, t_end]` and records every crossing
/// of the given sections (in their counted orientation and extent).
pub fn integrate(
    sys: &PlanarSystem,
    p0: (f64, f64),
    t_end: f64,
    rel_tol: f64,
    events: &[Section],
) -> Result<Integration> {
    integrate_with(sys, p0, t_end, &FlowSettings::with_rel_tol(rel_tol), events)
}

pub fn integrate_with(
    sys: &PlanarSystem,
    p0: (f64, f64),
    t_end: f64,
    settings: &FlowSettings,
    events: &[Section],
) -> Result<Integration> {
    if !(t_end >= 0.0) {
        return Err(Error::InvalidInput("t_end must be nonnegative".into()));
    }
    let c = sys.compiled();
    let aug = Augment {
        variational: false,
        divergence: false,
    };
    let rhs = planar_rhs(&c, aug);
    let mut traj = Trajectory {
        samples: vec![(0.0, p0.0, p0.1)],
        tolerance: settings.rel_tol,
    };
    let mut hits = Vec::new();
    let evs: Vec<&dyn EventFunction> = events.iter().map(|s| s as &dyn EventFunction).collect();
    let mut sample = sampler(settings);
    drive(
        &rhs,
        aug.initial(p0.0, p0.1),
        t_end,
        settings,
        &evs,
        |s, st| sample(s, st, &mut traj),
        |k, t, y| {
            if events[k].counts(&c, y[0], y[1]) {
                hits.push(EventHit {
                    section: k,
                    t,
                    point: (y[0], y[1]),
                    sigma: events[k].sigma_of(y[0], y[1]),
                });
            }
            Control::Continue
        },
    )?;
    Ok(Integration { trajectory: traj, hits })
}

/// Transition map from `from` to the first later crossing of `to`, with the
/// derivative from the planar variational equations.
pub fn transition_map(
    sys: &PlanarSystem,
    from: &Section,
    to: &Section,
    sigma: f64,
    settings: &FlowSettings,
) -> Result<MapSample> {
    transition_map_compiled(&sys.compiled(), from, to, sigma, settings)
}

pub fn transition_map_compiled(
    c: &CompiledSystem,
    from: &Section,
    to: &Section,
    sigma: f64,
    settings: &FlowSettings,
) -> Result<MapSample> {
    let aug = Augment {
        variational: true,
        divergence: false,
    };
    let rhs = planar_rhs(c, aug);
    let (x0, y0) = from.point(sigma);
    let mut hit: Option<(f64, Vec<f64>)> = None;
    let end = drive(
        &rhs,
        aug.initial(x0, y0),
        settings.max_time,
        settings,
        &[to],
        |_, _| {},
        |_, t, y| {
            if t > 0.0 && to.counts(c, y[0], y[1]) {
                hit = Some((t, y.to_vec()));
                Control::Stop
            } else {
                Control::Continue
            }
        },
    )?;
    if !end.stopped {
        return Err(Error::MaxTimeExceeded);
    }
    let (t, s) = hit.expect("stopped drive records its hit");
    let e_from = from.axis();
    let m = [[s[2], s[3]], [s[4], s[5]]];
    let md = (
        m[0][0] * e_from.0 + m[0][1] * e_from.1,
        m[1][0] * e_from.0 + m[1][1] * e_from.1,
    );
    let (p, q) = c.field(s[0], s[1]);
    let nu = to.normal();
    let e_to = to.axis();
    let nu_x = nu.0 * p + nu.1 * q;
    let nu_md = nu.0 * md.0 + nu.1 * md.1;
    let derivative = (e_to.0 * md.0 + e_to.1 * md.1) - (e_to.0 * p + e_to.1 * q) * nu_md / nu_x;
    Ok(MapSample {
        sigma,
        image: to.sigma_of(s[0], s[1]),
        derivative,
        time: t,
    })
}

/// ∫ div X dt over one revolution of a periodic orbit, measured between two
/// consecutive counted crossings of `section`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleExponent {
    pub exponent: f64,
    pub period: f64,
    /// Distance between the two crossing points (zero for an exact cycle).
    pub closing_error: f64,
}

pub fn characteristic_exponent(
    sys: &PlanarSystem,
    cycle_start: (f64, f64),
    section: &Section,
    settings: &FlowSettings,
) -> Result<CycleExponent> {
    let c = sys.compiled();
    let aug = Augment {
        variational: false,
        divergence: true,
    };
    let rhs = planar_rhs(&c, aug);
    let mut crossings: Vec<(f64, Vec<f64>)> = Vec::new();
    let on_section = section.value(&[cycle_start.0, cycle_start.1]).abs() < tolerances::EVENT_POLISH
        && section.counts(&c, cycle_start.0, cycle_start.1);
    if on_section {
        crossings.push((0.0, aug.initial(cycle_start.0, cycle_start.1)));
    }
    let end = drive(
        &rhs,
        aug.initial(cycle_start.0, cycle_start.1),
        settings.max_time,
        settings,
        &[section],
        |_, _| {},
        |_, t, y| {
            if t > 0.0 && section.counts(&c, y[0], y[1]) {
                crossings.push((t, y.to_vec()));
                if crossings.len() == 2 {
                    return Control::Stop;
                }
            }
            Control::Continue
        },
    );
    match end {
        Ok(e) if e.stopped => {}
        Ok(_) | Err(Error::EscapedRegion) | Err(Error::MaxTimeExceeded) => return Err(Error::NotPeriodic),
        Err(e) => return Err(e),
    }
    let (t0, a) = &crossings[0];
    let (t1, b) = &crossings[1];
    let k = aug.div_index();
    Ok(CycleExponent {
        exponent: b[k] - a[k],
        period: t1 - t0,
        closing_error: (b[0] - a[0]).hypot(b[1] - a[1]),
    })
}

/// (unstable direction, λ, stable direction, μ) of a saddle.
pub type SaddleDirections = ((f64, f64), f64, (f64, f64), f64);

/// Unstable and stable eigen-directions of a saddle (unit vectors) with
/// eigenvalues (λ > 0 > μ).
pub fn saddle_directions(saddle: &SingularPoint) -> Result<SaddleDirections> {
    if !saddle.is_hyperbolic_saddle() {
        return Err(Error::NotHyperbolicSaddle);
    }
    let j = saddle.jacobian.entries;
    let mu = saddle.jacobian.eigenvalues[0].0;
    let lambda = saddle.jacobian.eigenvalues[1].0;
    Ok((eigenvector(j, lambda), lambda, eigenvector(j, mu), mu))
}

fn eigenvector(j: [[f64; 2]; 2], l: f64) -> (f64, f64) {
    // rows of (J − l I) annihilate the eigenvector; use the larger row
    let r0 = (j[0][0] - l, j[0][1]);
    let r1 = (j[1][0], j[1][1] - l);
    let r = if r0.0.hypot(r0.1) >= r1.0.hypot(r1.1) { r0 } else { r1 };
    let v = (-r.1, r.0);
    let n = v.0.hypot(v.1);
    (v.0 / n, v.1 / n)
}

/// Follows the unstable manifold of `saddle` (both branches are tried, the
/// positive eigenvector first) until it re-enters the capture disc along the
/// stable direction.
pub fn trace_homoclinic(
    sys: &PlanarSystem,
    saddle: &SingularPoint,
    offset: f64,
    capture_radius: f64,
    settings: &FlowSettings,
) -> Result<Trajectory> {
    if !(offset > 0.0) {
        return Err(Error::InvalidInput(
            "offset must be positive (the saddle itself is stationary)".into(),
        ));
    }
    if !(capture_radius > offset) {
        return Err(Error::InvalidInput("capture radius must exceed the offset".into()));
    }
    let (vu, _, vs, _) = saddle_directions(saddle)?;
    let p0 = saddle.xy();
    let c = sys.compiled();
    let aug = Augment {
        variational: false,
        divergence: false,
    };
    let rhs = planar_rhs(&c, aug);
    let disc = Circle {
        center: p0,
        radius: capture_radius,
    };
    for sign in [1.0, -1.0] {
        let start = (p0.0 + sign * offset * vu.0, p0.1 + sign * offset * vu.1);
        let mut traj = Trajectory {
            samples: vec![(0.0, start.0, start.1)],
            tolerance: settings.rel_tol,
        };
        let mut left = false;
        let mut sample = sampler(settings);
        let mut last: Option<(f64, Vec<f64>)> = None;
        let end = drive(
            &rhs,
            aug.initial(start.0, start.1),
            settings.max_time,
            settings,
            &[&disc],
            |s, st| sample(s, st, &mut traj),
            |_, t, y| {
                let outward =
                    disc.gradient(y)[0] * c.p.eval(y[0], y[1]) + disc.gradient(y)[1] * c.q.eval(y[0], y[1]) > 0.0;
                if outward {
                    left = true;
                    Control::Continue
                } else if left {
                    last = Some((t, y.to_vec()));
                    Control::Stop
                } else {
                    Control::Continue
                }
            },
        );
        match end {
            Ok(e) if e.stopped => {
                let (t, y) = last.expect("stopped on capture");
                let (dx, dy) = (y[0] - p0.0, y[1] - p0.1);
                let cos = (dx * vs.0 + dy * vs.1).abs() / dx.hypot(dy);
                if cos < 0.9 {
                    continue;
                }
                traj.samples.retain(|s| s.0 < t);
                traj.push(t, y[0], y[1]);
                return Ok(traj);
            }
            Ok(_) | Err(Error::EscapedRegion) | Err(Error::MaxTimeExceeded) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoReturnToSaddle)
}

/// β₁ = ∫_Γ div X dt along a homoclinic loop of a weak saddle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Beta1 {
    /// Core integral plus the linearized tail estimate.
    pub value: f64,
    /// Integral over the part of Γ outside the cut disc.
    pub core: f64,
    /// Linearized estimate of the two pieces inside the cut disc.
    pub tail: f64,
    /// Bound on the error of the linearized tail (second order in the radius).
    pub truncation_error: f64,
}

pub fn separatrix_quantity_beta1(
    sys: &PlanarSystem,
    lp: &Trajectory,
    saddle: &SingularPoint,
    cut_radius: f64,
    settings: &FlowSettings,
) -> Result<Beta1> {
    if saddle.divergence_value.abs() > tolerances::WEAK_SADDLE {
        return Err(Error::DivergentStrongSaddle);
    }
    let (_, lambda, _, mu) = saddle_directions(saddle)?;
    let p0 = saddle.xy();
    let c = sys.compiled();
    let aug = Augment {
        variational: false,
        divergence: true,
    };
    let rhs = planar_rhs(&c, aug);
    let disc = Circle {
        center: p0,
        radius: cut_radius,
    };
    let start = lp.start();
    let mut exit: Option<Vec<f64>> = if disc.value(&[start.0, start.1]) >= 0.0 {
        Some(aug.initial(start.0, start.1))
    } else {
        None
    };
    let mut entry: Option<Vec<f64>> = None;
    let t_max = (lp.duration() * 2.0).max(1.0).min(settings.max_time);
    let end = drive(
        &rhs,
        aug.initial(start.0, start.1),
        t_max,
        settings,
        &[&disc],
        |_, _| {},
        |_, _t, y| {
            let g = disc.gradient(y);
            let outward = g[0] * c.p.eval(y[0], y[1]) + g[1] * c.q.eval(y[0], y[1]) > 0.0;
            if outward && exit.is_none() {
                exit = Some(y.to_vec());
                Control::Continue
            } else if !outward && exit.is_some() {
                entry = Some(y.to_vec());
                Control::Stop
            } else {
                Control::Continue
            }
        },
    );
    match end {
        Ok(e) if e.stopped => {}
        Ok(_) | Err(Error::EscapedRegion) | Err(Error::MaxTimeExceeded) => return Err(Error::NoReturnToSaddle),
        Err(e) => return Err(e),
    }
    let (a, b) = (exit.unwrap(), entry.unwrap());
    let k = aug.div_index();
    let core = b[k] - a[k];
    // Inside the disc z − p₀ ≈ r·u·e^{±κt}, so ∫ div ≈ (∇div(p₀)·(z − p₀))/κ.
    let grad = [
        c.div.eval_generic(crate::algebra::Dual::var(p0.0), p0.1.into()).eps,
        c.div.eval_generic(p0.0.into(), crate::algebra::Dual::var(p0.1)).eps,
    ];
    let lin = |y: &[f64]| grad[0] * (y[0] - p0.0) + grad[1] * (y[1] - p0.1);
    let tail_out = lin(&a) / lambda;
    let tail_in = lin(&b) / (-mu);
    let tail = tail_out + tail_in;
    let hess = hessian_norm(&c, p0);
    let truncation_error =
        hess * cut_radius * cut_radius * (1.0 / lambda + 1.0 / (-mu)) / 2.0 + tail.abs() * cut_radius;
    Ok(Beta1 {
        value: core + tail,
        core,
        tail,
        truncation_error,
    })
}

fn hessian_norm(c: &CompiledSystem, p0: (f64, f64)) -> f64 {
    let h = 1e-4;
    let f = |x: f64, y: f64| c.divergence(x, y);
    let fxx = (f(p0.0 + h, p0.1) - 2.0 * f(p0.0, p0.1) + f(p0.0 - h, p0.1)) / (h * h);
    let fyy = (f(p0.0, p0.1 + h) - 2.0 * f(p0.0, p0.1) + f(p0.0, p0.1 - h)) / (h * h);
    let fxy =
        (f(p0.0 + h, p0.1 + h) - f(p0.0 + h, p0.1 - h) - f(p0.0 - h, p0.1 + h) + f(p0.0 - h, p0.1 - h)) / (4.0 * h * h);
    (fxx * fxx + 2.0 * fxy * fxy + fyy * fyy).sqrt()
}
