//! End-to-end tests that drive the compiled `polycirc` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polycirc"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("the binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout_of(out)).expect("stdout is JSON")
}

#[test]
fn eval_prints_carrier_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f.dsl"), "let f = copy ; add\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "eval", "--semiring", "zmod:2", "--circuit", "f.dsl", "--name", "f", "--input", "1",
        ],
    );
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "0\n");
}

#[test]
fn synth_round_trips_through_table() {
    let dir = tempfile::tempdir().unwrap();
    let succ = "x0,y0\n0,1\n1,2\n2,0\n";
    fs::write(dir.path().join("succ.csv"), succ).unwrap();
    let out = run_in(
        dir.path(),
        &[
            "synth", "--semiring", "zp:3", "--table", "succ.csv", "--output", "succ.json",
        ],
    );
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));

    let back = run_in(
        dir.path(),
        &["table", "--semiring", "zp:3", "--circuit", "succ.json"],
    );
    assert!(back.status.success(), "stderr: {}", stderr_of(&back));
    assert_eq!(stdout_of(&back), succ);
}

#[test]
fn verify_axioms_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f.dsl"), "let mulchain = copy ; mul\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "verify", "axioms", "--semiring", "zmod:3", "--circuit", "f.dsl", "--name",
            "mulchain",
        ],
    );
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let report = json_of(&out);
    assert_eq!(report["passed"], serde_json::json!(true));
    assert_eq!(report["semiring"], serde_json::json!("zmod:3"));
    assert_eq!(
        report["checks"]["additivity-of-change"]["status"],
        serde_json::json!("pass")
    );
}

#[test]
fn verify_flags_a_broken_extension() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "verify",
            "extension",
            "--semiring",
            "zmod:3",
            "--rule",
            "broken-square",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
    let report = json_of(&out);
    assert_eq!(report["passed"], serde_json::json!(false));
    assert_eq!(
        report["checks"]["additivity-of-change"]["status"],
        serde_json::json!("fail")
    );
}

#[test]
fn verify_preservation_defaults_to_the_only_pair() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("pair.dsl"),
        "let f = copy ; mul\nlet g = copy ; add\n",
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "verify",
            "preservation",
            "--semiring",
            "zmod:2",
            "--circuit",
            "pair.dsl",
        ],
    );
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert_eq!(json_of(&out)["passed"], serde_json::json!(true));
}

#[test]
fn reverse_then_eval_applies_the_chain_rule() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("mul.dsl"), "let f = mul\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "rdiff", "--semiring", "zmod:5", "--circuit", "mul.dsl", "--output", "rmul.json",
        ],
    );
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));

    // The reverse derivative of multiplication at the point (2, 3) pushes an
    // output change of 1 back to (3, 2): each input sees the other factor.
    let back = run_in(
        dir.path(),
        &[
            "eval",
            "--semiring",
            "zmod:5",
            "--circuit",
            "rmul.json",
            "--input",
            "2,3,1",
        ],
    );
    assert!(back.status.success(), "stderr: {}", stderr_of(&back));
    assert_eq!(stdout_of(&back), "3,2\n");
}

#[test]
fn dsl_output_feeds_back_as_a_bare_expression() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("mul.dsl"), "let f = mul\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "rdiff", "--semiring", "zmod:5", "--circuit", "mul.dsl", "--format", "dsl",
            "--output", "rmul.dsl",
        ],
    );
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let back = run_in(
        dir.path(),
        &[
            "eval",
            "--semiring",
            "zmod:5",
            "--circuit",
            "rmul.dsl",
            "--input",
            "2,3,1",
        ],
    );
    assert!(back.status.success(), "stderr: {}", stderr_of(&back));
    assert_eq!(stdout_of(&back), "3,2\n");
}

#[test]
fn program_json_files_respect_the_semiring_header() {
    let dir = tempfile::tempdir().unwrap();
    let program = concat!(
        "{\"semiring\":\"zmod:2\",\"circuits\":{\"f\":",
        "{\"node\":\"seq\",\"f\":{\"node\":\"gen\",\"tag\":\"copy\"},",
        "\"g\":{\"node\":\"gen\",\"tag\":\"add\"}}}}",
    );
    fs::write(dir.path().join("p.json"), program).unwrap();

    let out = run_in(
        dir.path(),
        &[
            "eval", "--semiring", "zmod:2", "--circuit", "p.json", "--input", "1",
        ],
    );
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "0\n");

    let mismatch = run_in(
        dir.path(),
        &[
            "eval", "--semiring", "zmod:3", "--circuit", "p.json", "--input", "1",
        ],
    );
    assert_eq!(mismatch.status.code(), Some(1));
    assert!(stderr_of(&mismatch).contains("zmod:2"));
}

#[test]
fn training_converges_on_the_offset_task() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("m.dsl"), "let m = add\n").unwrap();
    fs::write(dir.path().join("data.csv"), "x0,y0\n0,1\n1,0\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "train", "--semiring", "zmod:2", "--circuit", "m.dsl", "--data", "data.csv",
            "--params", "0",
        ],
    );
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let result = json_of(&out);
    assert_eq!(result["params"], serde_json::json!([1]));
    assert_eq!(result["epochs"][0]["accuracy"], serde_json::json!(1.0));
}

#[test]
fn wrap_around_demo_depends_on_the_carrier() {
    let dir = tempfile::tempdir().unwrap();
    let modular = run_in(dir.path(), &["demo", "wrap-around", "--semiring", "zmod:2"]);
    assert!(modular.status.success());
    assert_eq!(json_of(&modular)["param_update"], serde_json::json!(0));

    let saturating = run_in(dir.path(), &["demo", "wrap-around", "--semiring", "sat:2"]);
    assert!(saturating.status.success());
    assert_eq!(json_of(&saturating)["param_update"], serde_json::json!(1));
}

#[test]
fn check_lists_every_definition() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("p.dsl"),
        "let f = copy ; add\nlet g = mul\n",
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &["check", "--semiring", "zmod:2", "--circuit", "p.dsl"],
    );
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    assert_eq!(stdout_of(&out), "f : 1->1\ng : 2->1\n");
}

#[test]
fn budget_env_var_caps_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f.dsl"), "let f = add\n").unwrap();
    let out = bin()
        .current_dir(dir.path())
        .env("POLYCIRC_BUDGET", "3")
        .args(["table", "--semiring", "zmod:3", "--circuit", "f.dsl"])
        .output()
        .expect("the binary runs");
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("budget"));

    // An explicit flag overrides the environment.
    let out = bin()
        .current_dir(dir.path())
        .env("POLYCIRC_BUDGET", "3")
        .args([
            "table",
            "--semiring",
            "zmod:3",
            "--circuit",
            "f.dsl",
            "--budget",
            "100",
        ])
        .output()
        .expect("the binary runs");
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
}

#[test]
fn usage_and_domain_errors_use_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f.dsl"), "let f = add\n").unwrap();

    // Missing a required flag is a usage error.
    let usage = run_in(dir.path(), &["eval", "--circuit", "f.dsl"]);
    assert_eq!(usage.status.code(), Some(2));

    // A well-formed invocation with a bad semiring is a domain error.
    let domain = run_in(
        dir.path(),
        &["eval", "--semiring", "zp:4", "--circuit", "f.dsl", "--input", "0,0"],
    );
    assert_eq!(domain.status.code(), Some(1));
    assert!(stderr_of(&domain).starts_with("error: "));

    // So is asking for a definition the file does not contain.
    let missing = run_in(
        dir.path(),
        &[
            "eval", "--semiring", "zmod:2", "--circuit", "f.dsl", "--name", "g", "--input",
            "0,0",
        ],
    );
    assert_eq!(missing.status.code(), Some(1));
}
