use std::path::Path;
use std::process::{Command, Output};

fn justact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_justact"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn eval_reports_truths_validity_and_queries() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(
        dir.path(),
        "example.slick",
        "// invalid\nerror if not bob reads data1.\n",
    );
    let out = justact(&["eval", &file, "--query", "error"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("trues:\n  error\n"), "{text}");
    assert!(text.contains("valid: false"));
    assert!(text.contains("error: true"));

    let file = write(dir.path(), "odd.slick", "a. c if not c.");
    let text = stdout(&justact(&["eval", &file, "--query", "c"]));
    assert!(
        text.contains("unknowns:\n  c\n") && text.contains("c: unknown"),
        "{text}"
    );

    let file = write(dir.path(), "runaway.slick", "f X if X. x.");
    let text = stdout(&justact(&["eval", &file, "--bound", "100"]));
    assert!(
        text.contains("step bound 100 exceeded") && text.contains("valid: false"),
        "{text}"
    );
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.slick", "a. b if a.");
    let out = justact(&["check", &good]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("ok, 2 rules"));

    let bad = write(dir.path(), "bad.slick", "a.\nb if .");
    let out = justact(&["check", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.slick:2:6"));

    let unsafe_rule = write(dir.path(), "unsafe.slick", "p X if not q X.");
    let out = justact(&["check", &unsafe_rule]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rule 1"));

    assert_eq!(justact(&["eval", &bad]).status.code(), Some(1));
    assert_eq!(
        justact(&["check", "/no/such/file.slick"]).status.code(),
        Some(1)
    );
}

#[test]
fn run_then_audit() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let trace = trace.to_str().unwrap();
    let out = justact(&["run", "scenario1", "--out", trace]);
    assert_eq!(out.status.code(), Some(0));
    assert!(
        stdout(&out).contains("8 statements, 4 enactments (4 permitted), 6 access grants"),
        "{}",
        stdout(&out)
    );

    let first = justact(&["audit", trace]);
    assert_eq!(first.status.code(), Some(0));
    let text = stdout(&first);
    assert_eq!(text.matches(": permitted").count(), 4, "{text}");
    assert!(!text.contains("prohibited"));
    assert_eq!(justact(&["audit", trace]).stdout, first.stdout);

    let missing = justact(&["audit", trace, "9999"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("not an enactment"));

    let json = justact(&["audit", trace, "--json"]);
    assert_eq!(stdout(&json).lines().count(), 4);
}

#[test]
fn strict_runs_fail_on_prohibition_and_still_replay() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("s5.jsonl");
    let trace = trace.to_str().unwrap();
    let out = justact(&["run", "scenario5", "--strict", "--out", trace]);
    assert_eq!(out.status.code(), Some(2));
    // The trace is written anyway and replays under the settings it implies.
    assert_eq!(justact(&["audit", trace]).status.code(), Some(0));
    assert_eq!(
        justact(&["run", "scenario4", "--strict", "--out", trace])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn tampered_traces_are_divergent() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let path = trace.to_str().unwrap();
    assert!(justact(&["run", "scenario2", "--out", path])
        .status
        .success());
    let text = std::fs::read_to_string(&trace).unwrap();
    let tampered = text.replacen("\"permitted\":true", "\"permitted\":false", 1);
    assert_ne!(text, tampered);
    std::fs::write(&trace, tampered).unwrap();
    let out = justact(&["audit", path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("diverges"));
    assert_eq!(
        justact(&["inspect", path, "--dump", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn run_options_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let path = trace.to_str().unwrap();
    let out = justact(&["run", "scenario3", "--disable", "amy", "--out", path]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        justact(&["run", "scenario9", "--out", path]).status.code(),
        Some(1)
    );
    assert_eq!(
        justact(&["run", "scenario1", "--disable", "zed", "--out", path])
            .status
            .code(),
        Some(1)
    );
    let listed = stdout(&justact(&["scenarios"]));
    assert_eq!(listed.lines().count(), 5);
}

#[test]
fn run_accepts_a_scenario_directory() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("mine");
    std::fs::create_dir(&scenario).unwrap();
    write(&scenario, "consortium_1.slick", "error if error Reason.\n");
    write(&scenario, "amy_1.slick", "amy is here.\n");
    write(
        &scenario,
        "manifest.toml",
        "agents = [\"amy\"]\nagreements = [[\"consortium 1\"]]\n[[reaction]]\nagent = \"amy\"\nlabel = \"hi\"\ndo = \"state\"\nmessage = \"amy 1\"\n[[reaction]]\nagent = \"amy\"\nlabel = \"act\"\nafter = [\"hi\"]\ndo = \"enact\"\nextra = [\"amy 1\"]\n",
    );
    let trace = dir.path().join("t.jsonl");
    let out = justact(&[
        "run",
        scenario.to_str().unwrap(),
        "--out",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(
        stdout(&out).contains("1 enactments (1 permitted)"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn inspect_dump_shows_both_panes() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let path = trace.to_str().unwrap();
    assert!(justact(&["run", "scenario4", "--out", path])
        .status
        .success());
    let audit = stdout(&justact(&["audit", path]));
    let index = audit
        .lines()
        .find(|l| l.contains("enactment by surf"))
        .unwrap();
    let index = index
        .trim_start_matches('#')
        .split_whitespace()
        .next()
        .unwrap();
    let out = justact(&["inspect", path, "--dump", index]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(
        text.contains("surf enacts on consortium 1 [permitted]"),
        "{text}"
    );
    assert!(
        text.contains("payload:") && text.contains("[st-antonius 5]") && text.contains("effects:")
    );
    assert_eq!(
        justact(&["inspect", path, "--dump", "9999"]).status.code(),
        Some(1)
    );
}
