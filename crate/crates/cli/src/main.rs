//! Batch front-end: runs analysis jobs and writes reports and plot data.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Args, Parser, Subcommand, ValueEnum};
use invfactor::job::{corpus_jobs, run_job_with, AnalysisJob, JobReport, RunSettings, Task};
use invfactor::tolerances;

#[derive(Parser)]
#[command(
    name = "invfactor",
    version,
    about = "Inverse integrating factor analyses of planar polynomial systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a job.
    Run(Common),
    /// Certify inverse integrating factors.
    VerifyIif(Common),
    /// Transition maps, homoclinic tracing and the implicit return map.
    Poincare(Common),
    /// The transition-map identity for the inverse integrating factor.
    IdentityCheck(Common),
    /// Vanishing multiplicity of the inverse integrating factor on an orbit.
    Multiplicity(Common),
    /// Saddle classification and saddle quantities.
    Saddle(Common),
    /// Resonant normal forms and the existence obstruction.
    NormalForm(Common),
    /// Cyclicity verdicts and return-map asymptotics.
    Verdict(Common),
    /// Perturbation witness; takes a job or --eps with --a.
    Perturb {
        #[command(flatten)]
        common: Common,
        /// Perturbation size, an exact rational.
        #[arg(long, allow_hyphen_values = true)]
        eps: Option<String>,
        /// Oval levels, comma separated exact rationals.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        a: Vec<String>,
    },
    /// Run all built-in example jobs.
    Corpus(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// Job file (JSON).
    #[arg(long)]
    job: Option<PathBuf>,
    /// Directory for report.txt, report.json and CSV plot data.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integration tolerance for tasks that do not set their own.
    #[arg(long)]
    tol: Option<f64>,
    /// Cap on normal-form degrees.
    #[arg(long)]
    max_degree: Option<u32>,
    /// Seed for random rational parameter sampling.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

const ANALYSIS_FAILED: u8 = 1;
const INPUT_ERROR: u8 = 2;

/// An input problem, reported with exit code 2.
struct InputError(String);

impl From<invfactor::Error> for InputError {
    fn from(e: invfactor::Error) -> Self {
        InputError(e.to_string())
    }
}

type Filter = fn(&Task) -> bool;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(ANALYSIS_FAILED),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}

fn execute(command: Command) -> Result<bool, InputError> {
    let (common, filter, what): (Common, Filter, &str) = match command {
        Command::Corpus(common) => return run_corpus(&common),
        Command::Perturb {
            common,
            eps: Some(eps),
            a,
        } => {
            if common.job.is_some() {
                return Err(InputError("give either --job or --eps with --a, not both".into()));
            }
            let job = perturbation_job(&eps, &a)?;
            return run_one(&job, &common, None);
        }
        Command::Perturb { common, eps: None, .. } => (common, |t| matches!(t, Task::Perturb { .. }), "perturb"),
        Command::Run(c) => (c, |_| true, "any"),
        Command::VerifyIif(c) => (c, |t| matches!(t, Task::VerifyIif { .. }), "verify-iif"),
        Command::Poincare(c) => (
            c,
            |t| {
                matches!(
                    t,
                    Task::Poincare { .. } | Task::TraceHomoclinic { .. } | Task::ImplicitMap { .. }
                )
            },
            "poincare, trace-homoclinic or implicit-map",
        ),
        Command::IdentityCheck(c) => (c, |t| matches!(t, Task::IdentityCheck { .. }), "identity-check"),
        Command::Multiplicity(c) => (c, |t| matches!(t, Task::Multiplicity { .. }), "multiplicity"),
        Command::Saddle(c) => (
            c,
            |t| matches!(t, Task::Classify { .. } | Task::SaddleQuantities { .. }),
            "classify or saddle-quantities",
        ),
        Command::NormalForm(c) => (
            c,
            |t| matches!(t, Task::NormalForm { .. } | Task::Obstruction { .. }),
            "normal-form or obstruction",
        ),
        Command::Verdict(c) => (
            c,
            |t| matches!(t, Task::Verdict { .. } | Task::Asymptotics { .. }),
            "verdict or asymptotics",
        ),
    };
    let path = common
        .job
        .as_ref()
        .ok_or_else(|| InputError("--job <file> is required".into()))?;
    let src = fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let mut job = AnalysisJob::from_json(&src).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    job.tasks.retain(filter);
    if job.tasks.is_empty() {
        return Err(InputError(format!("{}: the job has no {what} tasks", path.display())));
    }
    run_one(&job, &common, None)
}

fn settings(common: &Common) -> Result<RunSettings, InputError> {
    let mut s = RunSettings::default();
    if let Some(t) = common.tol {
        let (lo, hi) = tolerances::REL_TOL_RANGE;
        if !(t >= lo && t <= hi) {
            return Err(InputError(format!("--tol {t} outside [{lo:e}, {hi:e}]")));
        }
        s.rel_tol = Some(t);
    }
    if let Some(d) = common.max_degree {
        if d < 2 {
            return Err(InputError("--max-degree must be at least 2".into()));
        }
        s.max_degree = Some(d);
    }
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    Ok(s)
}

fn render(report: &JobReport, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Json => report.to_json() + "\n",
    }
}

fn write_outputs(dir: &Path, report: &JobReport) -> Result<(), InputError> {
    let io = |e: std::io::Error| InputError(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join("report.txt"), report.to_text()).map_err(io)?;
    fs::write(dir.join("report.json"), report.to_json() + "\n").map_err(io)?;
    for rec in &report.records {
        for (name, contents) in &rec.files {
            fs::write(dir.join(name), contents).map_err(io)?;
        }
    }
    Ok(())
}

fn run_one(job: &AnalysisJob, common: &Common, out: Option<&Path>) -> Result<bool, InputError> {
    let report = run_job_with(job, &settings(common)?);
    print!("{}", render(&report, common.format));
    if let Some(dir) = out.or(common.out.as_deref()) {
        write_outputs(dir, &report)?;
    }
    Ok(report.passed())
}

fn run_corpus(common: &Common) -> Result<bool, InputError> {
    if common.job.is_some() {
        return Err(InputError("corpus runs the built-in jobs and takes no --job".into()));
    }
    let settings = settings(common)?;
    let jobs = corpus_jobs()
        .into_iter()
        .map(|(name, src)| AnalysisJob::from_json(src).map_err(|e| InputError(format!("built-in job {name}: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    // independent jobs run concurrently; reports print in corpus order
    let reports: Vec<JobReport> = thread::scope(|s| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|job| s.spawn(|| run_job_with(job, &settings)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("job thread panicked"))
            .collect()
    });
    match common.format {
        Format::Text => {
            for r in &reports {
                print!("{}", r.to_text());
            }
        }
        Format::Json => {
            let all: Vec<serde_json::Value> = reports
                .iter()
                .map(|r| serde_json::from_str(&r.to_json()).expect("report is JSON"))
                .collect();
            println!("{}", serde_json::to_string_pretty(&all).expect("reports serialize"));
        }
    }
    if let Some(dir) = &common.out {
        for r in &reports {
            write_outputs(&dir.join(&r.name), r)?;
        }
    }
    Ok(reports.iter().all(JobReport::passed))
}

fn perturbation_job(eps: &str, a: &[String]) -> Result<AnalysisJob, InputError> {
    if a.is_empty() {
        return Err(InputError("--eps needs the oval levels --a".into()));
    }
    let job = serde_json::json!({
        "name": "perturb",
        "system": { "p": [[0, 1, "-2"]], "q": [[1, 0, "-2"], [2, 0, "3"]] },
        "tasks": [{ "task": "perturb", "eps": eps, "a": a }],
    });
    Ok(AnalysisJob::from_json(&job.to_string())?)
}
