//! Dormand–Prince 5(4) integrator with dense output and event location.

use crate::error::{Error, Result};
use crate::tolerances;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Right-hand side `dy = f(t, y)`.
pub type Rhs<'a> = dyn Fn(f64, &[f64], &mut [f64]) + 'a;

/// Integrator settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl OdeSettings {
    pub fn new(rel_tol: f64) -> Result<Self> {
        let (lo, hi) = tolerances::REL_TOL_RANGE;
        if !(lo..=hi).contains(&rel_tol) {
            return Err(Error::InvalidInput(format!(
                "relative tolerance {rel_tol:e} outside [{lo:e}, {hi:e}]"
            )));
        }
        Ok(OdeSettings {
            rel_tol,
            abs_tol: rel_tol * 1e-3,
            max_step: f64::INFINITY,
            max_steps: 5_000_000,
        })
    }
}

/// One accepted step together with its continuous extension.
#[derive(Clone, Debug)]
pub struct StepData {
    pub t0: f64,
    pub h: f64,
    pub y0: Vec<f64>,
    pub y1: Vec<f64>,
    /// Derivative at `y0` (used to restart single sub-steps from `t0`).
    pub k1: Vec<f64>,
    rcont: [Vec<f64>; 5],
}

impl StepData {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Fourth-order dense output at `t ∈ [t0, t0 + h]`.
    pub fn dense(&self, t: f64) -> Vec<f64> {
        let theta = (t - self.t0) / self.h;
        let th1 = 1.0 - theta;
        let r = &self.rcont;
        (0..self.y0.len())
            .map(|i| r[0][i] + theta * (r[1][i] + th1 * (r[2][i] + theta * (r[3][i] + th1 * r[4][i]))))
            .collect()
    }
}

/// Adaptive Dormand–Prince integrator state.
pub struct Dopri5<'a> {
    f: &'a Rhs<'a>,
    settings: OdeSettings,
    pub t: f64,
    pub y: Vec<f64>,
    k1: Vec<f64>,
    h: f64,
    steps: usize,
}

struct Stages {
    k: [Vec<f64>; 7],
    y1: Vec<f64>,
}

impl<'a> Dopri5<'a> {
    pub fn new(f: &'a Rhs<'a>, t0: f64, y0: Vec<f64>, settings: OdeSettings) -> Self {
        let mut k1 = vec![0.0; y0.len()];
        f(t0, &y0, &mut k1);
        let mut s = Dopri5 {
            f,
            settings,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            steps: 0,
        };
        s.h = s.initial_step();
        s
    }

    fn scale(&self, a: f64, b: f64) -> f64 {
        self.settings.abs_tol + self.settings.rel_tol * a.abs().max(b.abs())
    }

    fn initial_step(&self) -> f64 {
        let n = self.y.len() as f64;
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..self.y.len() {
            let sc = self.scale(self.y[i], self.y[i]);
            d0 += (self.y[i] / sc).powi(2);
            d1 += (self.k1[i] / sc).powi(2);
        }
        let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.settings.max_step);
        let y1: Vec<f64> = self.y.iter().zip(&self.k1).map(|(y, k)| y + h0 * k).collect();
        let mut k2 = vec![0.0; self.y.len()];
        (self.f)(self.t + h0, &y1, &mut k2);
        let mut d2 = 0.0;
        for i in 0..self.y.len() {
            let sc = self.scale(self.y[i], self.y[i]);
            d2 += ((k2[i] - self.k1[i]) / sc).powi(2);
        }
        let d2 = (d2 / n).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(self.settings.max_step)
    }

    fn stages(&self, t: f64, y: &[f64], k1: &[f64], h: f64) -> Stages {
        let n = y.len();
        let f = self.f;
        let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; n]);
        k[0].copy_from_slice(k1);
        let mut tmp = vec![0.0; n];
        for i in 0..n {
            tmp[i] = y[i] + h * A21 * k[0][i];
        }
        f(t + C2 * h, &tmp, &mut k[1]);
        for i in 0..n {
            tmp[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
        }
        f(t + C3 * h, &tmp, &mut k[2]);
        for i in 0..n {
            tmp[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        }
        f(t + C4 * h, &tmp, &mut k[3]);
        for i in 0..n {
            tmp[i] = y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
        }
        f(t + C5 * h, &tmp, &mut k[4]);
        for i in 0..n {
            tmp[i] = y[i] + h * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i] + A65 * k[4][i]);
        }
        f(t + h, &tmp, &mut k[5]);
        let mut y1 = vec![0.0; n];
        for i in 0..n {
            y1[i] = y[i] + h * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
        }
        f(t + h, &y1, &mut k[6]);
        Stages { k, y1 }
    }

    /// Advances by one accepted step, never passing `t_limit`.
    pub fn step(&mut self, t_limit: f64) -> Result<StepData> {
        let n = self.y.len();
        loop {
            self.steps += 1;
            if self.steps > self.settings.max_steps {
                return Err(Error::MaxTimeExceeded);
            }
            let mut h = self.h.min(self.settings.max_step);
            let last = self.t + h >= t_limit;
            if last {
                h = t_limit - self.t;
            }
            if h < tolerances::MIN_STEP * self.t.abs().max(1.0) && !last {
                return Err(Error::StepUnderflow);
            }
            let st = self.stages(self.t, &self.y, &self.k1, h);
            let k = &st.k;
            let mut err = 0.0;
            for i in 0..n {
                let e = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
                err += (e / self.scale(self.y[i], st.y1[i])).powi(2);
            }
            let err = (err / n as f64).sqrt();
            if !err.is_finite() {
                self.h = h * 0.2;
                continue;
            }
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 10.0);
            if err <= 1.0 {
                let ydiff: Vec<f64> = (0..n).map(|i| st.y1[i] - self.y[i]).collect();
                let bspl: Vec<f64> = (0..n).map(|i| h * k[0][i] - ydiff[i]).collect();
                let r3: Vec<f64> = (0..n).map(|i| ydiff[i] - h * k[6][i] - bspl[i]).collect();
                let r4: Vec<f64> = (0..n)
                    .map(|i| {
                        h * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i])
                    })
                    .collect();
                let data = StepData {
                    t0: self.t,
                    h,
                    y0: self.y.clone(),
                    y1: st.y1.clone(),
                    k1: self.k1.clone(),
                    rcont: [self.y.clone(), ydiff, bspl, r3, r4],
                };
                self.t = if last { t_limit } else { self.t + h };
                self.y = st.y1;
                self.k1 = st.k[6].clone();
                if !last || fac < 1.0 {
                    self.h = h * fac;
                }
                return Ok(data);
            }
            self.h = h * fac.min(1.0);
        }
    }

    /// A single untruncated step of size `dt` from the start of `step`; used
    /// to evaluate states inside an accepted step at full accuracy.
    pub fn substep(&self, step: &StepData, dt: f64) -> Vec<f64> {
        if dt == 0.0 {
            return step.y0.clone();
        }
        self.stages(step.t0, &step.y0, &step.k1, dt).y1
    }

    /// Derivative of the system at (t, y).
    pub fn derivative(&self, t: f64, y: &[f64]) -> Vec<f64> {
        let mut d = vec![0.0; y.len()];
        (self.f)(t, y, &mut d);
        d
    }
}

/// Scalar event function on the state with its gradient.
pub trait EventFunction {
    fn value(&self, y: &[f64]) -> f64;
    fn gradient(&self, y: &[f64]) -> Vec<f64>;
}

/// Locates a root of `event` inside an accepted step with opposite signs at
/// its ends, by Newton iteration safeguarded with bisection. States are
/// produced by single Runge–Kutta sub-steps from the step start.
pub fn locate_event(solver: &Dopri5<'_>, step: &StepData, event: &dyn EventFunction) -> (f64, Vec<f64>) {
    let (mut a, mut b) = (0.0, step.h);
    let mut ga = event.value(&step.y0);
    let gb = event.value(&step.y1);
    let y_at_b = step.y1.clone();
    if gb == 0.0 {
        return (step.t1(), y_at_b);
    }
    // initial guess by secant
    let mut dt = a - ga * (b - a) / (gb - ga);
    let mut best = (f64::INFINITY, step.t1(), y_at_b);
    for _ in 0..200 {
        if !(dt > a && dt < b) {
            dt = 0.5 * (a + b);
        }
        let y = solver.substep(step, dt);
        let g = event.value(&y);
        if g.abs() < best.0 {
            best = (g.abs(), step.t0 + dt, y.clone());
        }
        if g.abs() < tolerances::EVENT_POLISH || (b - a) <= 4.0 * f64::EPSILON * step.t1().abs().max(1.0) {
            return (step.t0 + dt, y);
        }
        if (g < 0.0) == (ga < 0.0) {
            a = dt;
            ga = g;
        } else {
            b = dt;
        }
        let grad = event.gradient(&y);
        let dy = solver.derivative(step.t0 + dt, &y);
        let slope: f64 = grad.iter().zip(&dy).map(|(g, d)| g * d).sum();
        let newton = if slope != 0.0 { dt - g / slope } else { f64::NAN };
        dt = if newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
    }
    (best.1, best.2)
}
