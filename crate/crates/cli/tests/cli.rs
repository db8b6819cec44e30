use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_invfactor"))
}

fn job(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/jobs")
        .join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn passing_job_exits_zero_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = job("example1");
    let o = run(&[
        "run",
        "--job",
        path.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("job: example1\n"));
    assert!(text.contains("summary: 6 passed, 0 failed, 0 errors"));
    assert_eq!(fs::read_to_string(dir.path().join("report.txt")).unwrap(), text);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["records"].as_array().unwrap().len(), 6);
    let csv = fs::read_to_string(dir.path().join("task04_identity.csv")).unwrap();
    assert!(csv.lines().count() > 20);
}

#[test]
fn subcommands_filter_tasks() {
    let path = job("example2-m1");
    let o = run(&["verdict", "--job", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("[1] verdict: PASS"));
    assert!(text.contains("[2] asymptotics: PASS"));
    assert!(!text.contains("verify-iif"));
    let o = run(&["saddle", "--job", path.to_str().unwrap()]);
    assert!(stdout(&o).contains("saddle-quantities: PASS"));
}

#[test]
fn json_format_is_machine_readable() {
    let path = job("hamiltonian");
    let o = run(&["verify-iif", "--job", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["records"][0]["status"], "pass");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let path = job("example2-m2");
    let a = run(&["run", "--job", path.to_str().unwrap(), "--format", "json"]);
    let b = run(&["run", "--job", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn analysis_disagreement_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.json");
    fs::write(
        &path,
        r#"{ "system": { "p": [[0, 1, "-2"]], "q": [[1, 0, "-2"], [2, 0, "3"]] },
             "points": { "o": ["0", "0"] },
             "tasks": [{ "task": "classify", "point": "o", "expect_strong": true }] }"#,
    )
    .unwrap();
    let o = run(&["saddle", "--job", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    fs::write(&broken, "{ \"system\": ").unwrap();
    let o = run(&["run", "--job", broken.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));

    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["run", "--job", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["run"]).status.code(), Some(2));

    let path = job("perturbation");
    let o = run(&["normal-form", "--job", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no normal-form"));
    let o = run(&["run", "--job", path.to_str().unwrap(), "--tol", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--tol"));
}

#[test]
fn perturb_takes_inline_parameters() {
    let o = run(&["perturb", "--eps", "1/100", "--a", "1,2,3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("certified = true"));
    let o = run(&["perturb", "--eps", "1/100", "--a", "1,1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["perturb", "--eps", "1/100"]).status.code(), Some(2));
}

#[test]
fn max_degree_is_reported_as_a_cap() {
    let path = job("andronov");
    let o = run(&["normal-form", "--job", path.to_str().unwrap(), "--max-degree", "6"]);
    assert!(stdout(&o).contains("degree capped at = 6"), "{}", stdout(&o));
}

#[test]
fn corpus_runs_every_builtin_job() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["corpus", "--out", dir.path().to_str().unwrap()]);
    let text = stdout(&o);
    for name in [
        "example1",
        "example2-m1",
        "example2-m2",
        "hamiltonian",
        "andronov",
        "perturbation",
    ] {
        assert!(text.contains(&format!("job: {name}\n")), "{name}");
        assert!(dir.path().join(name).join("report.json").exists(), "{name}");
    }
    // the exit code reflects the andronov golden-value comparison
    let expected = if text.contains("FAIL") { 1 } else { 0 };
    assert_eq!(o.status.code(), Some(expected));
    assert!(!text.contains("ERROR"));
}
