//! The binary end to end: exit codes, error locations and output layout.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pure-measure"))
}

fn run_with(config: &str, dir: &Path, extra: &[&str]) -> Output {
    let path = dir.join("config.json");
    fs::write(&path, config).unwrap();
    bin()
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL: &str = r#"{
    "version": "pure-measure/1",
    "samples": 5000,
    "schedule": { "count": 6 },
    "regions": { "line": { "interval": [-1, 1] } },
    "features": { "zero": { "point": [0] } },
    "integrands": { "c": "cos(x)" },
    "tasks": [
        { "kind": "density_ratio", "name": "half", "region": { "interval": [0, 1] }, "feature": "zero", "omega": "line" },
        { "kind": "sharp_integral", "name": "cos", "integrand": "c", "feature": "zero", "omega": "line" }
    ]
}"#;

#[test]
fn successful_run_writes_report_and_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_with(SMALL, dir.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out: PathBuf = dir.path().join("out");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["version"], "pure-measure/1");
    // defaults are echoed back
    assert_eq!(report["config"]["tol"], 0.02);
    assert_eq!(report["config"]["schedule"]["ratio"], 0.5);
    assert_eq!(report["tasks"][1]["csv"][0], "cos.csv");
    let csv = fs::read_to_string(out.join("half.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("delta,value,stderr,hits"));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn overrides_and_task_filter() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_with(
        SMALL,
        dir.path(),
        &["--seed", "9", "--samples", "1000", "--task", "cos"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = dir.path().join("out");
    assert!(out.join("cos.csv").exists() && !out.join("half.csv").exists());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["seed"], 9);
    assert_eq!(report["config"]["samples"], 1000);
    let o = run_with(SMALL, dir.path(), &["--task", "missing"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown task 'missing'"));
}

#[test]
fn configuration_errors_exit_with_one_and_a_pointer() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            SMALL.replace(r#""omega": "line" },"#, r#""omega": "plane" },"#),
            "unknown name 'plane' at /tasks/0/omega",
        ),
        (
            SMALL.replace(r#""count": 6"#, r#""count": 6, "ratio": 2"#),
            "bad schedule at /schedule",
        ),
        (
            SMALL.replace(r#""samples": 5000"#, r#""samples": -3"#),
            "parse error at /samples",
        ),
        (
            SMALL.replace(r#""integrands": {"#, r#""colour": 1, "integrands": {"#),
            "unknown field `colour`",
        ),
        (SMALL.replace("cos(x)", "cos(x"), "/integrands/c"),
    ];
    for (text, needle) in cases {
        let o = run_with(&text, dir.path(), &[]);
        assert_eq!(o.status.code(), Some(1), "{needle}");
        assert!(stderr(&o).contains(needle), "{needle}: {}", stderr(&o));
    }
}

#[test]
fn usage_errors_exit_with_one() {
    let o = bin().output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = bin()
        .args(["--config", "/nonexistent/suite.json"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = bin().arg("--help").output().unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn failing_task_exits_with_two_and_keeps_the_others() {
    let text = SMALL.replace(r#""c": "cos(x)""#, r#""c": "sign(x) / sqrt(abs(x))""#);
    let text = text.replace(
        r#""omega": "line" }
    ]"#,
        r#""omega": "line", "options": { "symmetric": true } }
    ]"#,
    );
    let dir = tempfile::tempdir().unwrap();
    let o = run_with(&text, dir.path(), &["--samples", "50000"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["tasks"][0]["status"], "ok");
    assert_eq!(report["tasks"][1]["status"], "error");
    assert_eq!(report["tasks"][1]["result"]["unbounded"], true);
}

#[test]
fn example_suite_parses() {
    let text =
        fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/suite.json"))
            .unwrap();
    let c = pure_measure_cli::parse_config(&text).unwrap();
    assert_eq!(c.tasks.len(), 15);
}
