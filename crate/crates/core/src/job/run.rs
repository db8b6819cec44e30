//! Task execution and report rendering.

use std::fmt::Write as _;

use serde::Serialize;

use super::{AnalysisJob, HalfSpec, LoopKind, OrbitSpec, RouteSpec, SectionSpec, SeparatrixSpec, Task, VerifyMode};
use crate::algebra::{parse_rational, Quadratic};
use crate::curvilinear::{
    default_n_grid, implicit_poincare_check, numeric_multiplicity, verify_transition_identity, CurvilinearFrame,
    EllipseParams, MapRoute,
};
use crate::error::{Error, Result};
use crate::flow::{
    map_samples_csv, separatrix_quantity_beta1, trace_homoclinic, transition_map, FlowSettings, Half, Section,
};
use crate::iif::{symbolic_multiplicity, verify_iif, verify_iif_parametric, ParamMode};
use crate::saddle::{classify_saddle, resonant_normal_form, saddle_quantities, SaddleInfo, SaddleQuantities};
use crate::system::PlanarSystem;
use crate::tolerances;
use crate::verdict::{
    existence_obstruction, homoclinic_cyclicity, limit_cycle_verdict, obstruction_verdict, perturbation_witness,
    roussarie_asymptotics, sample_return_map, CyclicityVerdict, MapCase, Multiplicity, Separatrix, VerdictKind,
};

/// Overrides applied to every task of a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSettings {
    /// Integration tolerance for tasks that do not set their own.
    pub rel_tol: Option<f64>,
    /// Cap on normal-form degrees.
    pub max_degree: Option<u32>,
    /// Seed for random rational parameter sampling.
    pub seed: u64,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            rel_tol: None,
            max_degree: None,
            seed: 0x1f2e_3d4c,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// The outcome of one task: inputs, outputs, tolerances and the result applied.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskRecord {
    pub index: usize,
    pub task: String,
    pub status: Status,
    pub basis: String,
    pub inputs: Vec<(String, String)>,
    pub outputs: Vec<(String, String)>,
    pub tolerances: Vec<(String, f64)>,
    /// Failed checks or the error that stopped the task.
    pub messages: Vec<String>,
    /// Plot data and exports as (file name, contents).
    #[serde(skip)]
    pub files: Vec<(String, String)>,
}

impl TaskRecord {
    fn new(index: usize, task: &Task) -> Self {
        let inputs = match serde_json::to_value(task) {
            Ok(serde_json::Value::Object(map)) => map
                .into_iter()
                .filter(|(k, _)| k != "task")
                .map(|(k, v)| (k, v.to_string()))
                .collect(),
            _ => Vec::new(),
        };
        TaskRecord {
            index,
            task: task.name().to_string(),
            status: Status::Pass,
            basis: String::new(),
            inputs,
            outputs: Vec::new(),
            tolerances: Vec::new(),
            messages: Vec::new(),
            files: Vec::new(),
        }
    }

    fn out(&mut self, key: &str, value: impl ToString) {
        self.outputs.push((key.to_string(), value.to_string()));
    }

    fn tol(&mut self, key: &str, value: f64) {
        self.tolerances.push((key.to_string(), value));
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.status = Status::Fail;
            self.messages.push(what.into());
        }
    }

    fn file(&mut self, name: &str, contents: String) {
        self.files.push((format!("task{:02}_{name}", self.index), contents));
    }

    fn verdict(&mut self, v: &CyclicityVerdict) {
        self.basis = v.basis.clone();
        self.out("verdict", &v.kind);
        for e in &v.evidence {
            self.out(&format!("evidence: {}", e.label), &e.value);
            if let Some(t) = e.tolerance {
                self.tol(&e.label, t);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JobReport {
    pub name: String,
    pub records: Vec<TaskRecord>,
}

impl JobReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status == Status::Pass)
    }

    pub fn count(&self, status: Status) -> usize {
        self.records.iter().filter(|r| r.status == status).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "job: {}", self.name);
        for r in &self.records {
            let status = match r.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            };
            let _ = writeln!(out, "[{}] {}: {status}", r.index, r.task);
            if !r.basis.is_empty() {
                let _ = writeln!(out, "  basis: {}", r.basis);
            }
            for (k, v) in &r.inputs {
                let _ = writeln!(out, "  input {k} = {v}");
            }
            for (k, v) in &r.outputs {
                let _ = writeln!(out, "  {k} = {v}");
            }
            for (k, t) in &r.tolerances {
                let _ = writeln!(out, "  tolerance {k} = {t:e}");
            }
            for m in &r.messages {
                let _ = writeln!(out, "  ! {m}");
            }
        }
        let _ = writeln!(
            out,
            "summary: {} passed, {} failed, {} errors",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Error)
        );
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs every task with default settings.
pub fn run_job(job: &AnalysisJob) -> JobReport {
    run_job_with(job, &RunSettings::default())
}

/// Runs the tasks in order. A failing or erroring task is recorded and the
/// remaining tasks still run.
pub fn run_job_with(job: &AnalysisJob, settings: &RunSettings) -> JobReport {
    let records = job
        .tasks
        .iter()
        .enumerate()
        .map(|(k, task)| {
            let mut rec = TaskRecord::new(k + 1, task);
            if let Err(e) = run_task(job, task, settings, &mut rec) {
                rec.status = Status::Error;
                rec.messages.push(e.to_string());
            }
            rec
        })
        .collect();
    JobReport {
        name: job.name.clone(),
        records,
    }
}

fn num(x: f64) -> String {
    format!("{x:.12e}")
}

fn flow_settings(task_tol: Option<f64>, settings: &RunSettings) -> FlowSettings {
    FlowSettings::with_rel_tol(task_tol.or(settings.rel_tol).unwrap_or(tolerances::DEFAULT_REL_TOL))
}

fn frame_from(spec: &OrbitSpec, sys: &PlanarSystem, st: &FlowSettings) -> Result<CurvilinearFrame> {
    match spec {
        OrbitSpec::Ellipse { center, a, b } => CurvilinearFrame::ellipse((center[0], center[1]), *a, *b),
        OrbitSpec::Polynomial { x, y, s_range } => {
            CurvilinearFrame::polynomial(x.clone(), y.clone(), (s_range[0], s_range[1]))
        }
        OrbitSpec::Periodic {
            start,
            direction,
            nodes,
        } => {
            let start = (start[0], start[1]);
            let section = Section::new(sys, start, (direction[0], direction[1]), Half::Positive)?;
            CurvilinearFrame::from_periodic_orbit(sys, start, &section, *nodes, st)
        }
    }
}

fn section_from(spec: &SectionSpec, sys: &PlanarSystem) -> Result<Section> {
    let half = match spec.half {
        HalfSpec::Positive => Half::Positive,
        HalfSpec::Negative => Half::Negative,
    };
    let s = Section::new(
        sys,
        (spec.base[0], spec.base[1]),
        (spec.direction[0], spec.direction[1]),
        half,
    )?;
    Ok(match spec.extent {
        Some(e) => s.with_extent(e),
        None => s,
    })
}

/// Interior samples of the frame's parameter range.
fn s_samples(frame: &CurvilinearFrame, count: usize) -> Vec<f64> {
    let (a, b) = frame.s_range;
    (0..count)
        .map(|k| a + (b - a) * (k as f64 + 0.5) / count as f64)
        .collect()
}

fn capped_degree(degree: u32, settings: &RunSettings, rec: &mut TaskRecord) -> u32 {
    match settings.max_degree {
        Some(cap) if cap < degree => {
            rec.out("degree capped at", cap);
            cap
        }
        _ => degree,
    }
}

fn exact_alpha1(info: &SaddleInfo) -> Result<SaddleQuantities> {
    let e = info.exact.as_ref().ok_or(Error::IrrationalEigenvalues)?;
    let a1 = e.lambda.clone() + &e.mu;
    let first = (!num_traits::Zero::is_zero(&a1)).then_some(1);
    Ok(SaddleQuantities {
        alphas: vec![a1],
        first_nonzero: first,
    })
}

fn leading_is_nonvanishing(samples: &[(f64, f64)]) -> (bool, f64) {
    let min = samples.iter().map(|s| s.1.abs()).fold(f64::INFINITY, f64::min);
    let sign = samples.first().map_or(0.0, |s| s.1.signum());
    (min > 0.0 && samples.iter().all(|s| s.1.signum() == sign), min)
}

fn run_task(job: &AnalysisJob, task: &Task, settings: &RunSettings, rec: &mut TaskRecord) -> Result<()> {
    match task {
        Task::VerifyIif { mode } => {
            rec.basis = "an inverse integrating factor satisfies X V = V div X identically".into();
            let v = job.iif.as_ref().expect("validated");
            let pm = match mode {
                VerifyMode::Exact => {
                    let r = verify_iif(&job.rational_system()?, &job.rational_iif()?);
                    rec.out("residual", &r);
                    rec.check(r.is_zero(), "residual is not the zero polynomial");
                    return Ok(());
                }
                VerifyMode::Symbolic => ParamMode::Symbolic,
                VerifyMode::Sampled => ParamMode::Sampled,
                VerifyMode::Both => ParamMode::Both,
            };
            let res = verify_iif_parametric(&job.system, v, pm, settings.seed)?;
            if let Some(r) = &res.symbolic_residual {
                rec.out("symbolic residual", r);
            }
            if let Some((n, bad)) = res.sampled {
                rec.out("sampled parameter points", n);
                rec.out("sampled nonzero residuals", bad);
                rec.out("seed", settings.seed);
            }
            rec.check(res.modes_agree(), "symbolic and sampled verdicts disagree");
            rec.check(res.certified(), "residual does not vanish");
        }
        Task::Multiplicity { curve, orbit, expect } => {
            rec.basis = "V = n^m v(s) + O(n^(m+1)) along the orbit with v(s) nonzero".into();
            let v = job.rational_iif()?;
            let f = job.rational_curve(curve)?;
            let m = symbolic_multiplicity(&v, &f)?;
            rec.out("m symbolic", m);
            if let Some(spec) = orbit {
                let sys = job.rational_system()?;
                let frame = frame_from(spec, &sys, &flow_settings(None, settings))?;
                let est = numeric_multiplicity(&frame, &sys, &v, &s_samples(&frame, 50), &default_n_grid())?;
                rec.out("m numeric", est.m);
                rec.out("fit residual", num(est.fit_residual));
                rec.tol("slope rounding", tolerances::SLOPE_ROUNDING);
                let (ok, min) = leading_is_nonvanishing(&est.leading_coeff_samples);
                rec.out("min |v(s)| over 50 samples", num(min));
                rec.check(
                    est.m == m,
                    format!("numeric multiplicity {} differs from symbolic {m}", est.m),
                );
                rec.check(ok, "leading coefficient v(s) vanishes or changes sign");
                let mut csv = String::from("s,leading\n");
                for (s, c) in &est.leading_coeff_samples {
                    let _ = writeln!(csv, "{},{}", num(*s), num(*c));
                }
                rec.file("leading.csv", csv);
            }
            if let Some(e) = expect {
                rec.check(m == *e, format!("expected multiplicity {e}, got {m}"));
            }
        }
        Task::IdentityCheck {
            orbit,
            sigmas,
            route,
            rel_tol,
            tol,
        } => {
            rec.basis =
                "V~(s1, Pi(sigma)) = V~(s0, sigma) Pi'(sigma) for the transition map between normal sections".into();
            let sys = job.rational_system()?;
            let st = flow_settings(*rel_tol, settings);
            let frame = frame_from(orbit, &sys, &st)?;
            let route = match route {
                RouteSpec::Planar => MapRoute::Planar,
                RouteSpec::Chart => MapRoute::Chart,
            };
            let check = verify_transition_identity(&frame, &sys, &job.rational_iif()?, &sigmas.values(), route, &st)?;
            rec.out("max relative residual", num(check.max_residual));
            rec.tol("identity residual", *tol);
            rec.tol("rel_tol", st.rel_tol);
            rec.check(check.max_residual < *tol, "identity residual above tolerance");
            rec.file("identity.csv", check.to_csv());
        }
        Task::ImplicitMap { sigmas, rel_tol } => {
            rec.basis = "the ellipse family's return map solves its implicit closed form with k0 fixed by e^(beta_1), beta_1 = -2 lambda T".into();
            let sys = job.rational_system()?;
            let st = flow_settings(*rel_tol, settings);
            let p = |k: &str| crate::algebra::rational_to_f64(&job.params[k]);
            let params = EllipseParams {
                lambda: p("lambda"),
                m1: p("m1"),
                m2: p("m2"),
            };
            let frame = params.cycle_frame()?;
            let k0 = params.k0()?;
            let v = job.rational_iif()?;
            let check = verify_transition_identity(&frame, &sys, &v, &sigmas.values(), MapRoute::Planar, &st)?;
            let mut worst = 0.0f64;
            let mut csv = String::from("sigma,image,implicit_residual\n");
            for r in &check.rows {
                let res = implicit_poincare_check(r.sigma, r.image, &params, k0)?;
                worst = worst.max(res);
                let _ = writeln!(csv, "{},{},{}", num(r.sigma), num(r.image), num(res));
            }
            rec.out("k0", num(k0));
            rec.out("max implicit residual", num(worst));
            rec.tol("implicit residual", tolerances::IMPLICIT_MAP);
            rec.check(
                worst < tolerances::IMPLICIT_MAP,
                "implicit map residual above tolerance",
            );
            let at_zero = verify_transition_identity(&frame, &sys, &v, &[0.0], MapRoute::Planar, &st)?;
            let derivative = at_zero.rows[0].derivative;
            let period = 2.0 * std::f64::consts::PI * params.m1 / (1.0 + params.m1);
            let expected = (-2.0 * params.lambda * period).exp();
            let rel = ((derivative - expected) / expected).abs();
            rec.out("Pi'(0)", num(derivative));
            rec.out("e^(beta_1)", num(expected));
            rec.out("relative error", num(rel));
            rec.tol("Pi'(0) relative error", tolerances::RETURN_DERIVATIVE);
            rec.check(rel < tolerances::RETURN_DERIVATIVE, "Pi'(0) differs from e^(beta_1)");
            rec.file("implicit.csv", csv);
        }
        Task::Poincare {
            section,
            to,
            sigmas,
            rel_tol,
        } => {
            rec.basis = "transition map between transversal sections with its variational derivative".into();
            let sys = job.rational_system()?;
            let st = flow_settings(*rel_tol, settings);
            let from = section_from(section, &sys)?;
            let to = match to {
                Some(t) => section_from(t, &sys)?,
                None => from,
            };
            let samples = sigmas
                .values()
                .iter()
                .map(|&s| transition_map(&sys, &from, &to, s, &st))
                .collect::<Result<Vec<_>>>()?;
            let disp = samples.iter().map(|s| (s.image - s.sigma).abs()).fold(0.0, f64::max);
            rec.out("samples", samples.len());
            rec.out("max |Pi(sigma) - sigma|", num(disp));
            rec.tol("rel_tol", st.rel_tol);
            rec.file("map.csv", map_samples_csv(&samples));
        }
        Task::TraceHomoclinic {
            saddle,
            offset,
            capture,
            rel_tol,
        } => {
            rec.basis = "the unstable separatrix followed until it returns along the stable direction".into();
            let sys = job.rational_system()?;
            let st = flow_settings(*rel_tol, settings);
            let sp = sys.verify_singular(job.point(saddle)?)?;
            let lp = trace_homoclinic(&sys, &sp, *offset, *capture, &st)?;
            rec.out("flight time", num(lp.duration()));
            rec.out("samples", lp.samples.len());
            rec.tol("capture radius", *capture);
            if sp.divergence_value.abs() < tolerances::WEAK_SADDLE {
                let b = separatrix_quantity_beta1(&sys, &lp, &sp, *capture, &st)?;
                rec.out("beta_1", num(b.value));
                rec.out("beta_1 truncation error", num(b.truncation_error));
            }
            rec.file("loop.csv", lp.to_csv());
        }
        Task::Classify {
            point,
            expect_strong,
            expect_resonance,
        } => {
            rec.basis = "eigenvalues mu < 0 < lambda of the linearization; r = -mu/lambda".into();
            let info = classify_saddle(&job.rational_system()?, job.point(point)?)?;
            rec.out("lambda", num(info.lambda));
            rec.out("mu", num(info.mu));
            rec.out("r", num(info.ratio_r));
            rec.out("strong", info.strong);
            rec.out(
                "resonance",
                info.resonance.map_or("none".into(), |r| format!("{}:{}", r.p, r.q)),
            );
            if let Some(e) = &info.exact {
                rec.out("lambda exact", &e.lambda);
                rec.out("mu exact", &e.mu);
            }
            if let Some(s) = expect_strong {
                rec.check(info.strong == *s, format!("expected strong = {s}"));
            }
            if let Some([p, q]) = expect_resonance {
                let got = info.resonance.map(|r| [r.p, r.q]);
                rec.check(got == Some([*p, *q]), format!("expected resonance {p}:{q}"));
            }
        }
        Task::SaddleQuantities { point, count, expect } => {
            rec.basis = "resonant coefficients of the orbital normal form of a weak saddle".into();
            let sys = job.rational_system()?;
            let info = classify_saddle(&sys, job.point(point)?)?;
            let qs = saddle_quantities(&sys, &info, *count)?;
            for (k, a) in qs.alphas.iter().enumerate() {
                rec.out(&format!("alpha_{}", k + 1), a);
            }
            rec.out(
                "first nonzero",
                qs.first_nonzero.map_or("none".into(), |k| format!("alpha_{k}")),
            );
            if let Some(expect) = expect {
                for (k, e) in expect.iter().enumerate() {
                    let want = Quadratic::rational(parse_rational(e)?);
                    let ok = qs.alpha(k + 1) == Some(&want);
                    rec.check(ok, format!("expected alpha_{} = {e}", k + 1));
                }
            }
        }
        Task::NormalForm {
            point,
            degree,
            expect_coefficient,
        } => {
            rec.basis = "formal orbital normal form x' = p x (1 + delta (U^l + a U^(2l))), y' = -q y".into();
            let sys = job.rational_system()?;
            let info = classify_saddle(&sys, job.point(point)?)?;
            let degree = capped_degree(*degree, settings, rec);
            let nf = resonant_normal_form(&sys, &info, degree)?;
            rec.out("resonance", format!("{}:{}", nf.p, nf.q));
            rec.out("delta", nf.delta);
            match (nf.ell, &nf.a_coeff) {
                (Some(l), Some(a)) => {
                    let (i, j) = nf.monomial(l);
                    rec.out("ell", l);
                    rec.out("obstruction monomial", format!("x^{i} y^{j}"));
                    rec.out("obstruction coefficient", a);
                }
                _ => rec.out("linearizable up to degree", degree),
            }
            if let Some(e) = expect_coefficient {
                let want = Quadratic::rational(parse_rational(e)?);
                rec.check(
                    nf.a_coeff.as_ref() == Some(&want),
                    format!("expected obstruction coefficient {e}"),
                );
            }
            rec.file("normal_form.txt", nf.report());
        }
        Task::Obstruction { point, degree, expect } => {
            let sys = job.rational_system()?;
            let info = classify_saddle(&sys, job.point(point)?)?;
            let degree = capped_degree(*degree, settings, rec);
            let nf = resonant_normal_form(&sys, &info, degree)?;
            let flag = existence_obstruction(&info, &nf);
            rec.verdict(&obstruction_verdict(&info, &nf));
            rec.out("obstruction", flag);
            if let Some(e) = expect {
                rec.check(flag == *e, format!("expected obstruction = {e}"));
            }
        }
        Task::Verdict {
            kind,
            curve,
            point,
            orbit,
            probe,
            sigmas,
            expect_cyclicity,
            expect_multiplicity,
        } => {
            let sys = job.rational_system()?;
            let v = job.rational_iif()?;
            let m = symbolic_multiplicity(&v, &job.rational_curve(curve)?)?;
            match kind {
                LoopKind::Homoclinic => {
                    let name = point.as_ref().expect("validated");
                    let info = classify_saddle(&sys, job.point(name)?)?;
                    let alphas = if info.strong {
                        None
                    } else {
                        let count = (m as usize).max(3);
                        Some(saddle_quantities(&sys, &info, count)?)
                    };
                    let verdict = homoclinic_cyclicity(m, &info, alphas.as_ref())?;
                    rec.verdict(&verdict);
                    if let Some(e) = expect_cyclicity {
                        let got = match verdict.kind {
                            VerdictKind::HomoclinicCyclicity { cyclicity, .. } => Some(cyclicity),
                            _ => None,
                        };
                        rec.check(got == Some(*e), format!("expected cyclicity {e}"));
                    }
                }
                LoopKind::LimitCycle => {
                    let st = flow_settings(None, settings);
                    let frame = frame_from(orbit.as_ref().expect("validated"), &sys, &st)?;
                    let est = numeric_multiplicity(&frame, &sys, &v, &s_samples(&frame, 50), &default_n_grid())?;
                    let (leading_ok, _) = leading_is_nonvanishing(&est.leading_coeff_samples);
                    let probe = match (probe, sigmas) {
                        (Some(sec), Some(grid)) => {
                            Some(sample_return_map(&sys, &section_from(sec, &sys)?, &grid.values(), &st)?)
                        }
                        _ => None,
                    };
                    let verdict = limit_cycle_verdict(Multiplicity::Natural(m), leading_ok, probe.as_ref());
                    rec.verdict(&verdict);
                    if let Some(e) = expect_multiplicity {
                        rec.check(
                            verdict.kind == VerdictKind::LimitCycleMultiplicity(*e),
                            format!("expected a limit cycle of multiplicity {e}"),
                        );
                    }
                }
            }
        }
        Task::Asymptotics {
            point,
            separatrix,
            curve,
            expect_bound,
            expect_case,
        } => {
            rec.basis = "asymptotic expansion of the loop's return map and the matching cyclicity bound".into();
            let sys = job.rational_system()?;
            let info = classify_saddle(&sys, job.point(point)?)?;
            let m = match curve {
                Some(c) => Some(symbolic_multiplicity(&job.rational_iif()?, &job.rational_curve(c)?)?),
                None => None,
            };
            let alphas = if info.strong {
                exact_alpha1(&info)?
            } else {
                saddle_quantities(&sys, &info, m.map_or(3, |m| (m as usize).max(3)))?
            };
            let beta = match separatrix {
                SeparatrixSpec::Unknown => Separatrix::Unknown,
                SeparatrixSpec::AllZero => Separatrix::AllZero,
                SeparatrixSpec::Beta1(b) => Separatrix::Beta1(*b),
            };
            let form = roussarie_asymptotics(info.ratio_r, &alphas, beta, m)?;
            let case = case_name(&form.case);
            rec.out("case", &case);
            rec.out("leading form", &form.leading);
            rec.out("bound", form.bound.map_or("none".into(), |b| b.to_string()));
            if let Some(e) = expect_bound {
                rec.check(form.bound == Some(*e), format!("expected bound {e}"));
            }
            if let Some(e) = expect_case {
                rec.check(&case == e, format!("expected case {e}"));
            }
        }
        Task::Perturb {
            eps,
            a,
            expect_certified,
        } => {
            rec.basis = "each oval H = -a_i eps is invariant and hyperbolic, so at least n limit cycles bifurcate from the loop".into();
            let eps = parse_rational(eps)?;
            let a = a.iter().map(|v| parse_rational(v)).collect::<Result<Vec<_>>>()?;
            let w = perturbation_witness(a.len(), &eps, &a)?;
            rec.tol("exponent margin", tolerances::EXPONENT_MARGIN);
            rec.tol("exponent floor", tolerances::EXPONENT_FLOOR);
            for (k, o) in w.ovals.iter().enumerate() {
                let label = format!("oval {} (a = {})", k + 1, o.a);
                rec.out(
                    &format!("{label} cofactor"),
                    o.cofactor.as_deref().unwrap_or("not invariant"),
                );
                rec.out(&format!("{label} exponent"), o.exponent.map_or("none".into(), num));
                rec.out(
                    &format!("{label} exponent spread"),
                    o.exponent_error.map_or("none".into(), num),
                );
                rec.out(&format!("{label} hyperbolic"), o.hyperbolic);
                if let Some(n) = &o.note {
                    rec.out(&format!("{label} note"), n);
                }
            }
            let certified = w.certified();
            rec.out("certified", certified);
            rec.check(
                certified == expect_certified.unwrap_or(true),
                "certification outcome differs from the expectation",
            );
        }
    }
    Ok(())
}

fn case_name(case: &MapCase) -> String {
    match case {
        MapCase::PowerLaw => "power-law".into(),
        MapCase::Hyperbolic => "hyperbolic".into(),
        MapCase::Logarithmic { k } => format!("logarithmic k={k}"),
        MapCase::Polynomial { k } => format!("polynomial k={k}"),
        MapCase::Identity => "identity".into(),
        MapCase::Undetermined(_) => "undetermined".into(),
    }
}
