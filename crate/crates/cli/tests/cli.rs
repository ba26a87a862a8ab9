use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

const FIRST: &str = r#"{
  "matrices": [[["2", "1"], ["1", "1"]], [["3", "1"], ["2", "1"]]],
  "probabilities": ["1/2", "1/2"],
  "max_n": 6
}"#;

fn job_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str], file: &NamedTempFile) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lyapunov"))
        .args(args)
        .arg(file.path())
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn compute_csv() {
    let f = job_file(FIRST);
    let out = run(&["compute", "--format", "csv", "--digits", "12"], &f);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,lambda_N,bound");
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[1], "1,1.132320701359,invalid");
    assert!(
        lines[6].starts_with("6,1.143311035103,4.8692"),
        "{}",
        lines[6]
    );
}

#[test]
fn compute_structured_and_no_optimize() {
    let f = job_file(FIRST);
    let out = run(
        &[
            "compute",
            "--format",
            "structured",
            "--no-optimize",
            "--max-n",
            "3",
        ],
        &f,
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["optimize_basis"], false);
    assert!(v["constants_used"]["optimized"].is_null());
    assert!(v["mc"].is_null());
}

#[test]
fn verify_and_constants_subcommands() {
    let f = job_file(FIRST);
    let out = run(&["verify", "--seed", "11", "--format", "csv"], &f);
    assert!(out.status.success());
    let text = stdout(&out);
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let mean: f64 = fields[0].parse().unwrap();
    assert!((mean - 1.1433).abs() < 0.01);
    assert_eq!(fields[4], "11");
    assert_eq!(
        text,
        stdout(&run(&["verify", "--seed", "11", "--format", "csv"], &f))
    );

    let out = run(&["constants"], &f);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("constants (original basis)"));
    assert!(text.contains("lambda0 = 8.40896"));
}

#[test]
fn exit_codes() {
    let f = job_file(FIRST);
    assert_eq!(
        run(&["compute", "--precision-bits", "32"], &f)
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["compute", "--max-n", "40"], &f).status.code(),
        Some(3)
    );
    let out = run(&["compute", "--precision-bits", "64", "--digits", "60"], &f);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precision unstable"));

    let singular = job_file(r#"{"matrices": [[["1","2"],["2","4"]]], "probabilities": ["1"]}"#);
    assert_eq!(run(&["compute"], &singular).status.code(), Some(2));
    let floats = job_file(r#"{"matrices": [[[1.5,"2"],["2","4"]]], "probabilities": ["1"]}"#);
    assert_eq!(run(&["compute"], &floats).status.code(), Some(2));
}
