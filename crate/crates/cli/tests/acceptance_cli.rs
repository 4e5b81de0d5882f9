//! CLI-level acceptance: the matrix regression gate and byte-identical
//! determinism of `--check` runs, plus exit-code contracts.

use std::process::{Command, Output};

fn admlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_admlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(criterion: u8, name: &str, pass: bool, detail: &str) {
    println!(
        "ACCEPTANCE {criterion:2} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}

#[test]
fn criterion_11_matrix_check_exits_zero() {
    let out = admlab(&["matrix", "--check", "--reps", "2000"]);
    let ok = out.status.code() == Some(0);
    report(
        11,
        "classification matrix matches reference",
        ok,
        &format!("exit {:?}", out.status.code()),
    );
    assert!(
        ok,
        "matrix --check failed:\n{}\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("check: PASS"));
}

#[test]
fn criterion_12_check_runs_byte_identical() {
    let runs: &[&[&str]] = &[
        &["riskset", "--grid", "201", "--check"],
        &["bernoulli", "--reps", "1000", "--check"],
        &["tables", "--which", "2", "--reps", "1000", "--check"],
        &["eprocess", "--reps", "1000", "--check"],
        &["conformal", "--reps", "100", "--check"],
        &["defensive", "--horizon", "2000", "--thin", "100", "--check"],
        &["gaussian", "--reps", "1000", "--check"],
        &["matrix", "--reps", "500", "--check"],
        &[
            "tables", "--which", "3", "--reps", "500", "--check", "--format", "json",
        ],
    ];
    let mut ok = true;
    for args in runs {
        let a = admlab(args);
        let b = admlab(args);
        if a.stdout != b.stdout {
            ok = false;
            report(
                12,
                "byte-identical --check runs",
                false,
                &format!("output differs for {args:?}"),
            );
        }
        assert_eq!(a.status.code(), b.status.code());
    }
    report(
        12,
        "byte-identical --check runs",
        ok,
        "9 subcommand variants",
    );
    assert!(ok);
}

#[test]
fn usage_errors_exit_two_and_write_nothing() {
    let dir = std::env::temp_dir().join(format!("admlab_usage_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("should_not_exist.csv");
    let out = admlab(&[
        "eprocess",
        "--alpha",
        "1.5",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        !out_path.exists(),
        "usage error must not write output files"
    );

    let out = admlab(&["tables", "--which", "9"]);
    assert_eq!(out.status.code(), Some(2));

    let out = admlab(&["eprocess", "--looks", "50,10", "--reps", "10"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn boundary_trace_file_layout() {
    let dir = std::env::temp_dir().join(format!("admlab_trace_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out_path = dir.join("trace.csv");
    let out = admlab(&[
        "riskset",
        "--n",
        "10",
        "--grid",
        "1001",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let body = std::fs::read_to_string(&out_path).unwrap();
    let boundary_rows = body.lines().filter(|l| l.starts_with("boundary,")).count();
    assert_eq!(boundary_rows, 1001);
    let plugin_row = body
        .lines()
        .find(|l| l.starts_with("plugin,"))
        .expect("plugin row present");
    let fields: Vec<&str> = plugin_row.split(',').collect();
    assert_eq!(fields[2], "inf");
    assert_eq!(fields[3], "inf");
    // symmetric design: the trace is symmetric under coordinate swap
    let rows: Vec<Vec<&str>> = body
        .lines()
        .filter(|l| l.starts_with("boundary,"))
        .map(|l| l.split(',').collect())
        .collect();
    let first: f64 = rows[0][2].parse().unwrap();
    let last: f64 = rows[1000][3].parse().unwrap();
    assert!((first - last).abs() < 1e-9);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn json_mirror_carries_inf_token() {
    let out = admlab(&[
        "tables", "--which", "2", "--reps", "200", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"][0]["plugin_risk_exact"], serde_json::json!("inf"));
    assert_eq!(v["rows"][0]["n"], serde_json::json!(5));
}
