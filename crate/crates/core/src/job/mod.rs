//! Batch analysis jobs: a JSON description of a system, its inverse
//! integrating factor, named curves and points, and an ordered task list.
//!
//! ```json
//! {
//!   "name": "hamiltonian",
//!   "system": { "p": [[0, 1, "-2"]], "q": [[1, 0, "-2"], [2, 0, "3"]] },
//!   "curves": { "h": [[0, 2, "1"], [2, 0, "-1"], [3, 0, "1"]] },
//!   "iif": { "factors": [["h", 1]] },
//!   "points": { "saddle": ["0", "0"] },
//!   "tasks": [ { "task": "verify-iif" }, { "task": "classify", "point": "saddle" } ]
//! }
//! ```
//!
//! Coefficients are exact rationals (`"-3/2"`, `"0.01"`) or expressions in
//! symbols bound in `"params"`.

mod run;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{parse_param_expr, parse_rational, BiPoly, ParamPoly, Rational};
use crate::error::{Error, Result};
use crate::iif::InverseIntegratingFactor;
use crate::system::{PlanarSystem, Point};
use crate::tolerances;

pub use run::{run_job, run_job_with, JobReport, RunSettings, Status, TaskRecord};

/// A polynomial term `[i, j, "coefficient"]`.
pub type Term = (u32, u32, String);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub p: Vec<Term>,
    pub q: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IifSpec {
    Expanded(Vec<Term>),
    Factored {
        /// (curve name, power) pairs.
        factors: Vec<(String, u32)>,
        #[serde(default)]
        unit: Option<Vec<Term>>,
    },
}

/// The raw job file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobFile {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    pub system: SystemSpec,
    #[serde(default)]
    pub iif: Option<IifSpec>,
    #[serde(default)]
    pub curves: BTreeMap<String, Vec<Term>>,
    #[serde(default)]
    pub points: BTreeMap<String, [String; 2]>,
    #[serde(default)]
    pub tasks: Vec<Task>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyMode {
    /// Parameters substituted, one exact residual.
    #[default]
    Exact,
    Symbolic,
    Sampled,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum OrbitSpec {
    Ellipse {
        center: [f64; 2],
        a: f64,
        b: f64,
    },
    /// Power-basis coefficients of x(s) and y(s).
    Polynomial {
        x: Vec<f64>,
        y: Vec<f64>,
        s_range: [f64; 2],
    },
    /// The periodic orbit through `start`, with a section along `direction`.
    Periodic {
        start: [f64; 2],
        direction: [f64; 2],
        #[serde(default = "default_nodes")]
        nodes: usize,
    },
}

fn default_nodes() -> usize {
    128
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SigmaGrid {
    List(Vec<f64>),
    /// σ_k = max·k/count for k = 1..count.
    Uniform {
        count: usize,
        max: f64,
    },
}

impl SigmaGrid {
    pub fn values(&self) -> Vec<f64> {
        match self {
            SigmaGrid::List(v) => v.clone(),
            SigmaGrid::Uniform { count, max } => (1..=*count).map(|k| max * k as f64 / *count as f64).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HalfSpec {
    #[default]
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    pub base: [f64; 2],
    pub direction: [f64; 2],
    #[serde(default)]
    pub half: HalfSpec,
    #[serde(default)]
    pub extent: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RouteSpec {
    #[default]
    Planar,
    Chart,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoopKind {
    Homoclinic,
    LimitCycle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparatrixSpec {
    Unknown,
    AllZero,
    Beta1(f64),
}

/// One analysis step. Optional `expect*` fields turn a computation into a
/// check whose disagreement fails the task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Task {
    VerifyIif {
        #[serde(default)]
        mode: VerifyMode,
    },
    Multiplicity {
        curve: String,
        #[serde(default)]
        orbit: Option<OrbitSpec>,
        #[serde(default)]
        expect: Option<u32>,
    },
    IdentityCheck {
        orbit: OrbitSpec,
        sigmas: SigmaGrid,
        #[serde(default)]
        route: RouteSpec,
        #[serde(default)]
        rel_tol: Option<f64>,
        #[serde(default = "default_identity_tol")]
        tol: f64,
    },
    /// Return map of the ellipse family against its implicit closed form;
    /// needs the parameters `lambda`, `m1`, `m2`.
    ImplicitMap {
        sigmas: SigmaGrid,
        #[serde(default)]
        rel_tol: Option<f64>,
    },
    Poincare {
        section: SectionSpec,
        #[serde(default)]
        to: Option<SectionSpec>,
        sigmas: SigmaGrid,
        #[serde(default)]
        rel_tol: Option<f64>,
    },
    TraceHomoclinic {
        saddle: String,
        #[serde(default = "default_offset")]
        offset: f64,
        #[serde(default = "default_capture")]
        capture: f64,
        #[serde(default)]
        rel_tol: Option<f64>,
    },
    Classify {
        point: String,
        #[serde(default)]
        expect_strong: Option<bool>,
        #[serde(default)]
        expect_resonance: Option<[u64; 2]>,
    },
    SaddleQuantities {
        point: String,
        #[serde(default = "default_quantities")]
        count: usize,
        #[serde(default)]
        expect: Option<Vec<String>>,
    },
    NormalForm {
        point: String,
        degree: u32,
        #[serde(default)]
        expect_coefficient: Option<String>,
    },
    Obstruction {
        point: String,
        degree: u32,
        #[serde(default)]
        expect: Option<bool>,
    },
    Verdict {
        kind: LoopKind,
        curve: String,
        #[serde(default)]
        point: Option<String>,
        #[serde(default)]
        orbit: Option<OrbitSpec>,
        #[serde(default)]
        probe: Option<SectionSpec>,
        #[serde(default)]
        sigmas: Option<SigmaGrid>,
        #[serde(default)]
        expect_cyclicity: Option<u32>,
        #[serde(default)]
        expect_multiplicity: Option<u32>,
    },
    Asymptotics {
        point: String,
        separatrix: SeparatrixSpec,
        #[serde(default)]
        curve: Option<String>,
        #[serde(default)]
        expect_bound: Option<u32>,
        #[serde(default)]
        expect_case: Option<String>,
    },
    Perturb {
        eps: String,
        a: Vec<String>,
        #[serde(default)]
        expect_certified: Option<bool>,
    },
}

fn default_identity_tol() -> f64 {
    1e-6
}
fn default_offset() -> f64 {
    1e-6
}
fn default_capture() -> f64 {
    1e-2
}
fn default_quantities() -> usize {
    3
}

impl Task {
    /// The kebab-case task name used in reports and by CLI filters.
    pub fn name(&self) -> &'static str {
        match self {
            Task::VerifyIif { .. } => "verify-iif",
            Task::Multiplicity { .. } => "multiplicity",
            Task::IdentityCheck { .. } => "identity-check",
            Task::ImplicitMap { .. } => "implicit-map",
            Task::Poincare { .. } => "poincare",
            Task::TraceHomoclinic { .. } => "trace-homoclinic",
            Task::Classify { .. } => "classify",
            Task::SaddleQuantities { .. } => "saddle-quantities",
            Task::NormalForm { .. } => "normal-form",
            Task::Obstruction { .. } => "obstruction",
            Task::Verdict { .. } => "verdict",
            Task::Asymptotics { .. } => "asymptotics",
            Task::Perturb { .. } => "perturb",
        }
    }
}

/// A validated job: coefficients parsed, names resolved, settings in bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisJob {
    pub name: String,
    pub params: BTreeMap<String, Rational>,
    pub system: PlanarSystem<ParamPoly>,
    pub iif: Option<BiPoly<ParamPoly>>,
    pub named_curves: BTreeMap<String, BiPoly<ParamPoly>>,
    pub points: BTreeMap<String, Point>,
    pub tasks: Vec<Task>,
}

fn field_err(path: &str, e: Error) -> Error {
    let msg = match e {
        Error::InvalidInput(m) => m,
        other => other.to_string(),
    };
    Error::InvalidInput(format!("{path}: {msg}"))
}

fn parse_terms(path: &str, terms: &[Term]) -> Result<BiPoly<ParamPoly>> {
    let mut p = BiPoly::zero();
    for (k, (i, j, c)) in terms.iter().enumerate() {
        let v = parse_param_expr(c).map_err(|e| field_err(&format!("{path}[{k}]"), e))?;
        p.add_term(*i, *j, v);
    }
    p.check_degree(tolerances::MAX_DEGREE).map_err(|e| field_err(path, e))?;
    Ok(p)
}

impl AnalysisJob {
    /// Parses and validates a JSON job. Syntax errors carry line and column.
    pub fn from_json(src: &str) -> Result<Self> {
        let file: JobFile = serde_json::from_str(src).map_err(|e| Error::InvalidInput(format!("job file: {e}")))?;
        Self::from_file(file)
    }

    pub fn from_file(file: JobFile) -> Result<Self> {
        let mut params = BTreeMap::new();
        for (k, v) in &file.params {
            let r = parse_rational(v).map_err(|e| field_err(&format!("params.{k}"), e))?;
            params.insert(k.clone(), r);
        }
        let p = parse_terms("system.p", &file.system.p)?;
        let q = parse_terms("system.q", &file.system.q)?;
        let system = PlanarSystem::try_new(p, q).map_err(|e| field_err("system", e))?;
        let mut named_curves = BTreeMap::new();
        for (k, terms) in &file.curves {
            named_curves.insert(k.clone(), parse_terms(&format!("curves.{k}"), terms)?);
        }
        let iif = match &file.iif {
            None => None,
            Some(IifSpec::Expanded(terms)) => Some(parse_terms("iif", terms)?),
            Some(IifSpec::Factored { factors, unit }) => {
                let mut v = match unit {
                    Some(u) => parse_terms("iif.unit", u)?,
                    None => BiPoly::one(),
                };
                for (k, (name, power)) in factors.iter().enumerate() {
                    let f = named_curves
                        .get(name)
                        .ok_or_else(|| Error::InvalidInput(format!("iif.factors[{k}]: unknown curve {name:?}")))?;
                    v = &v * &f.pow(*power);
                }
                Some(v)
            }
        };
        let mut points = BTreeMap::new();
        for (k, [x, y]) in &file.points {
            let path = format!("points.{k}");
            let x = parse_rational(x).map_err(|e| field_err(&path, e))?;
            let y = parse_rational(y).map_err(|e| field_err(&path, e))?;
            points.insert(k.clone(), Point::exact(x, y));
        }
        let job = AnalysisJob {
            name: file.name,
            params,
            system,
            iif,
            named_curves,
            points,
            tasks: file.tasks,
        };
        job.validate()?;
        Ok(job)
    }

    fn validate(&self) -> Result<()> {
        for (k, task) in self.tasks.iter().enumerate() {
            let path = format!("tasks[{k}] ({})", task.name());
            let bad = |msg: String| Err(Error::InvalidInput(format!("{path}: {msg}")));
            let curve = |name: &str| -> Result<()> {
                if self.named_curves.contains_key(name) {
                    Ok(())
                } else {
                    Err(Error::InvalidInput(format!("{path}: unknown curve {name:?}")))
                }
            };
            let point = |name: &str| -> Result<()> {
                if self.points.contains_key(name) {
                    Ok(())
                } else {
                    Err(Error::InvalidInput(format!("{path}: unknown point {name:?}")))
                }
            };
            let rel_tol = |t: &Option<f64>| -> Result<()> {
                let (lo, hi) = tolerances::REL_TOL_RANGE;
                match t {
                    Some(t) if !(*t >= lo && *t <= hi) => Err(Error::InvalidInput(format!(
                        "{path}: rel_tol {t} outside [{lo:e}, {hi:e}]"
                    ))),
                    _ => Ok(()),
                }
            };
            let needs_iif = matches!(
                task,
                Task::VerifyIif { .. } | Task::Multiplicity { .. } | Task::IdentityCheck { .. } | Task::Verdict { .. }
            ) || matches!(task, Task::Asymptotics { curve: Some(_), .. });
            if needs_iif && self.iif.is_none() {
                return bad("the job declares no inverse integrating factor".into());
            }
            match task {
                Task::VerifyIif { .. } => {}
                Task::Multiplicity { curve: c, .. } => curve(c)?,
                Task::IdentityCheck {
                    rel_tol: t,
                    tol,
                    sigmas,
                    ..
                } => {
                    rel_tol(t)?;
                    if !(*tol > 0.0) || sigmas.values().is_empty() {
                        return bad("needs a positive tolerance and a nonempty σ grid".into());
                    }
                }
                Task::ImplicitMap { rel_tol: t, .. } => {
                    rel_tol(t)?;
                    for name in ["lambda", "m1", "m2"] {
                        if !self.params.contains_key(name) {
                            return bad(format!("parameter {name:?} is not bound"));
                        }
                    }
                }
                Task::Poincare { rel_tol: t, .. } | Task::TraceHomoclinic { rel_tol: t, .. } => rel_tol(t)?,
                Task::Classify { point: p, .. } => point(p)?,
                Task::SaddleQuantities { point: p, count, .. } => {
                    point(p)?;
                    if *count == 0 || *count > tolerances::DEFAULT_SADDLE_QUANTITIES {
                        return bad(format!(
                            "count must lie in 1..={}",
                            tolerances::DEFAULT_SADDLE_QUANTITIES
                        ));
                    }
                }
                Task::NormalForm { point: p, degree, .. } | Task::Obstruction { point: p, degree, .. } => {
                    point(p)?;
                    if *degree < 2 || *degree > tolerances::MAX_DEGREE {
                        return bad(format!("degree must lie in 2..={}", tolerances::MAX_DEGREE));
                    }
                }
                Task::Verdict {
                    kind,
                    curve: c,
                    point: p,
                    orbit,
                    ..
                } => {
                    curve(c)?;
                    match kind {
                        LoopKind::Homoclinic => match p {
                            Some(p) => point(p)?,
                            None => return bad("a homoclinic verdict needs the saddle point".into()),
                        },
                        LoopKind::LimitCycle => {
                            if orbit.is_none() {
                                return bad("a limit-cycle verdict needs the orbit".into());
                            }
                        }
                    }
                }
                Task::Asymptotics { point: p, curve: c, .. } => {
                    point(p)?;
                    if let Some(c) = c {
                        curve(c)?;
                    }
                }
                Task::Perturb { eps, a, .. } => {
                    parse_rational(eps).map_err(|e| field_err(&path, e))?;
                    for v in a {
                        parse_rational(v).map_err(|e| field_err(&path, e))?;
                    }
                }
            }
        }
        Ok(())
    }

    fn substituted(&self, p: &BiPoly<ParamPoly>) -> Result<BiPoly> {
        p.substitute(&self.params)
    }

    /// The system with every parameter replaced by its bound value.
    pub fn rational_system(&self) -> Result<PlanarSystem> {
        Ok(PlanarSystem::new(
            self.substituted(&self.system.p)?,
            self.substituted(&self.system.q)?,
        ))
    }

    pub fn rational_iif(&self) -> Result<InverseIntegratingFactor> {
        let v = self
            .iif
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("no inverse integrating factor".into()))?;
        Ok(InverseIntegratingFactor::new(self.substituted(v)?))
    }

    pub fn rational_curve(&self, name: &str) -> Result<BiPoly> {
        let c = self
            .named_curves
            .get(name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown curve {name:?}")))?;
        self.substituted(c)
    }

    pub fn point(&self, name: &str) -> Result<&Point> {
        self.points
            .get(name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown point {name:?}")))
    }
}

/// Built-in jobs reproducing the worked examples, as (name, JSON source).
pub fn corpus_jobs() -> Vec<(&'static str, &'static str)> {
    vec![
        ("example1", include_str!("../../jobs/example1.json")),
        ("example2-m1", include_str!("../../jobs/example2-m1.json")),
        ("example2-m2", include_str!("../../jobs/example2-m2.json")),
        ("hamiltonian", include_str!("../../jobs/hamiltonian.json")),
        ("andronov", include_str!("../../jobs/andronov.json")),
        ("perturbation", include_str!("../../jobs/perturbation.json")),
    ]
}
