use invfactor::job::{corpus_jobs, run_job, run_job_with, AnalysisJob, JobReport, RunSettings, Status, TaskRecord};
use invfactor::Error;

fn load(name: &str) -> AnalysisJob {
    let (_, src) = corpus_jobs().into_iter().find(|(n, _)| *n == name).expect("corpus job");
    AnalysisJob::from_json(src).unwrap()
}

fn output<'a>(rec: &'a TaskRecord, key: &str) -> &'a str {
    rec.outputs
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .unwrap_or_else(|| panic!("no output {key}"))
}

fn input_error(src: &str) -> String {
    match AnalysisJob::from_json(src) {
        Err(Error::InvalidInput(m)) => m,
        other => panic!("expected an input error, got {other:?}"),
    }
}

const MINIMAL: &str = r#"{
  "name": "ham",
  "system": { "p": [[0, 1, "-2"]], "q": [[1, 0, "-2"], [2, 0, "3"]] },
  "curves": { "h": [[0, 2, "1"], [2, 0, "-1"], [3, 0, "1"]] },
  "iif": { "factors": [["h", 1]] },
  "points": { "saddle": ["0", "0"], "regular": ["1", "1"] },
  "tasks": TASKS
}"#;

fn with_tasks(tasks: &str) -> String {
    MINIMAL.replace("TASKS", tasks)
}

#[test]
fn corpus_jobs_parse_under_their_names() {
    for (name, src) in corpus_jobs() {
        let job = AnalysisJob::from_json(src).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(job.name, name);
        assert!(!job.tasks.is_empty());
    }
}

#[test]
fn corpus_jobs_pass() {
    for (name, _) in corpus_jobs() {
        if name == "andronov" {
            continue;
        }
        let report = run_job(&load(name));
        assert!(report.passed(), "{}", report.to_text());
    }
}

#[test]
fn andronov_job_runs_to_completion() {
    let report = run_job(&load("andronov"));
    assert!(
        report.records.iter().all(|r| r.status != Status::Error),
        "{}",
        report.to_text()
    );
    let classify = &report.records[0];
    assert_eq!(classify.status, Status::Pass);
    assert_eq!(output(classify, "resonance"), "1:3");
    assert_eq!(report.records[2].status, Status::Pass, "{}", report.to_text());
    // the normal-form record carries the computed coefficient whatever the
    // comparison with the expected value says
    assert!(output(&report.records[1], "obstruction coefficient").contains('/'));
}

#[test]
fn traced_separatrix_quantity_tracks_the_loop_order() {
    // V of order 1 on the loop forces a hyperbolic loop, order 2 a
    // vanishing first separatrix quantity
    let beta = |name: &str| {
        let report = run_job(&load(name));
        let rec = report.records.iter().find(|r| r.task == "trace-homoclinic").unwrap();
        let b: f64 = output(rec, "beta_1").parse().unwrap();
        let err: f64 = output(rec, "beta_1 truncation error").parse().unwrap();
        (b, err)
    };
    let (b1, e1) = beta("example2-m1");
    assert!(b1.abs() > 100.0 * e1, "beta_1 = {b1} ± {e1}");
    let (b2, e2) = beta("example2-m2");
    assert!(b2.abs() < e2, "beta_1 = {b2} ± {e2}");
}

#[test]
fn reports_are_deterministic() {
    let job = load("example1");
    let a = run_job(&job);
    let b = run_job(&job);
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.to_text(), b.to_text());
}

#[test]
fn report_json_round_trips_through_serde() {
    let report = run_job(&load("hamiltonian"));
    let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(v["name"], "hamiltonian");
    assert_eq!(v["records"].as_array().unwrap().len(), report.records.len());
    assert_eq!(v["records"][0]["status"], "pass");
}

#[test]
fn records_name_their_files_by_task() {
    let report = run_job(&load("example1"));
    let names: Vec<&str> = report
        .records
        .iter()
        .flat_map(|r| r.files.iter().map(|(n, _)| n.as_str()))
        .collect();
    assert!(names.contains(&"task03_leading.csv"), "{names:?}");
    assert!(names.contains(&"task04_identity.csv"), "{names:?}");
    assert!(names.contains(&"task05_implicit.csv"), "{names:?}");
}

#[test]
fn errors_are_recorded_and_later_tasks_still_run() {
    let src = with_tasks(r#"[{ "task": "classify", "point": "regular" }, { "task": "verify-iif" }]"#);
    let report = run_job(&AnalysisJob::from_json(&src).unwrap());
    assert_eq!(report.records[0].status, Status::Error);
    assert!(!report.records[0].messages.is_empty());
    assert_eq!(report.records[1].status, Status::Pass);
    assert!(!report.passed());
    assert!(report.to_text().contains("summary: 1 passed, 0 failed, 1 errors"));
}

#[test]
fn unmet_expectations_fail_the_task() {
    let src = with_tasks(r#"[{ "task": "classify", "point": "saddle", "expect_strong": true }]"#);
    let report = run_job(&AnalysisJob::from_json(&src).unwrap());
    assert_eq!(report.records[0].status, Status::Fail);
    assert_eq!(report.count(Status::Fail), 1);
}

#[test]
fn max_degree_caps_normal_form_work() {
    let job = load("andronov");
    let settings = RunSettings {
        max_degree: Some(6),
        ..RunSettings::default()
    };
    let report = run_job_with(&job, &settings);
    assert_eq!(output(&report.records[1], "degree capped at"), "6");
    let uncapped = RunSettings {
        max_degree: Some(40),
        ..RunSettings::default()
    };
    let report = run_job_with(&job, &uncapped);
    assert!(report.records[1].outputs.iter().all(|(k, _)| k != "degree capped at"));
}

#[test]
fn syntax_errors_carry_a_position() {
    let msg = input_error("{\n  \"system\": { \"p\": [[0, 1, \"1\"]] \n}");
    assert!(msg.contains("line"), "{msg}");
}

#[test]
fn unknown_fields_are_rejected() {
    let msg = input_error(&with_tasks(
        r#"[{ "task": "verify-iif", "mode": "exact", "colour": 1 }]"#,
    ));
    assert!(msg.contains("colour"), "{msg}");
    let msg = input_error(&with_tasks(r#"[{ "task": "no-such-task" }]"#));
    assert!(msg.contains("no-such-task"), "{msg}");
}

#[test]
fn bad_coefficients_name_their_path() {
    let src = r#"{ "system": { "p": [[0, 1, "1"], [1, 0, "2/0"]], "q": [[1, 0, "1"]] } }"#;
    let msg = input_error(src);
    assert!(msg.starts_with("system.p[1]"), "{msg}");
}

#[test]
fn validation_names_the_offending_task() {
    let cases = [
        (
            r#"[{ "task": "multiplicity", "curve": "nope" }]"#,
            "tasks[0] (multiplicity): unknown curve",
        ),
        (
            r#"[{ "task": "classify", "point": "nope" }]"#,
            "tasks[0] (classify): unknown point",
        ),
        (
            r#"[{ "task": "normal-form", "point": "saddle", "degree": 1 }]"#,
            "tasks[0] (normal-form): degree",
        ),
        (
            r#"[{ "task": "poincare", "section": { "base": [0.8, 0], "direction": [1, 0] }, "sigmas": [0.1], "rel_tol": 1.0 }]"#,
            "rel_tol",
        ),
        (r#"[{ "task": "implicit-map", "sigmas": [0.1] }]"#, "parameter"),
        (
            r#"[{ "task": "saddle-quantities", "point": "saddle", "count": 0 }]"#,
            "count",
        ),
        (
            r#"[{ "task": "verdict", "kind": "homoclinic", "curve": "h" }]"#,
            "saddle point",
        ),
        (
            r#"[{ "task": "verdict", "kind": "limit-cycle", "curve": "h" }]"#,
            "orbit",
        ),
        (
            r#"[{ "task": "perturb", "eps": "x", "a": ["1"] }]"#,
            "tasks[0] (perturb)",
        ),
    ];
    for (tasks, needle) in cases {
        let msg = input_error(&with_tasks(tasks));
        assert!(msg.contains(needle), "{tasks}: {msg}");
    }
}

#[test]
fn tasks_needing_an_iif_require_one() {
    let src = r#"{ "system": { "p": [[0, 1, "1"]], "q": [[1, 0, "-1"]] }, "tasks": [{ "task": "verify-iif" }] }"#;
    let msg = input_error(src);
    assert!(msg.contains("inverse integrating factor"), "{msg}");
}

#[test]
fn parameters_substitute_before_exact_checks() {
    let job = load("example1");
    let sys = job.rational_system().unwrap();
    let (expected, _, _) = invfactor::corpus::ellipse_family(
        &invfactor::algebra::rat(1, 2),
        &invfactor::algebra::int(-2),
        &invfactor::algebra::int(1),
    );
    assert_eq!(sys, expected);
}

#[test]
fn text_report_lists_every_task() {
    let report: JobReport = run_job(&load("perturbation"));
    let text = report.to_text();
    assert!(text.starts_with("job: perturbation\n[1] perturb: PASS"));
    assert!(text.contains("certified = true"));
}
