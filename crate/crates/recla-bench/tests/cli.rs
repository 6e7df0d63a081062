//! Black-box checks of the `recla-bench` binary: argument handling,
//! exit codes, CSV layout and stdout formats.

use std::path::Path;
use std::process::{Command, Output};

use recla_bench::{BenchError, BREAKDOWN_HEADER, SWEEP_HEADER};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_recla-bench"))
        .args(args)
        .env_remove("RECLA_KERNELS")
        .output()
        .expect("binary should spawn")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be UTF-8")
}

/// Splits file content into leading `# ` comments and the CSV body.
fn split_comments(text: &str) -> (Vec<&str>, Vec<&str>) {
    let mut comments = Vec::new();
    let mut body = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') && body.is_empty() {
            comments.push(line);
        } else {
            body.push(line);
        }
    }
    (comments, body)
}

#[test]
fn unknown_op_is_a_usage_error() {
    let out = bench(&["sweep", "--op", "qrf", "--alg", "recursive", "--n", "8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown op"), "stderr: {}", stderr(&out));
}

#[test]
fn conflicting_parameter_kinds_are_a_usage_error() {
    let out = bench(&[
        "sweep", "--op", "trtri", "--alg", "recursive", "--n", "8", "--b", "4", "--c", "4",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("mutually exclusive"));

    let out = bench(&["sweep", "--op", "trtri", "--alg", "blocked", "--n", "8", "--c", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--b"));
}

#[test]
fn help_and_version_exit_clean() {
    let out = bench(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("Usage"));

    let out = bench(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("recla-bench"));
}

#[test]
fn sweep_writes_csv_with_comments_header_and_full_grid() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("sweep.csv");
    let out = bench(&[
        "sweep", "--op", "trtri", "--alg", "recursive", "--n", "16,24", "--c", "4,8",
        "--reps", "2", "--seed", "9",
        "--csv", path.to_str().expect("utf-8 path"),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let text = std::fs::read_to_string(&path).expect("csv should exist");
    let (comments, body) = split_comments(&text);
    assert!(comments.iter().any(|l| l.contains("op=trtri")));
    assert!(comments.iter().any(|l| l.contains("kernels=reference")));
    assert_eq!(body[0], SWEEP_HEADER);

    let rows: Vec<&str> = body[1..].iter().copied().filter(|l| !l.is_empty()).collect();
    assert_eq!(rows.len(), 2 * 2 * 2, "2 sizes x 2 crossovers x 2 reps");
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), SWEEP_HEADER.split(',').count());
        assert_eq!(fields[0], "trtri");
        assert_eq!(fields[1], "recursive");
        assert_eq!(fields[4], "c");
        assert_eq!(fields[11], "true");
    }
}

#[test]
fn no_verify_marks_rows_unverified() {
    let out = bench(&[
        "sweep", "--op", "getrf", "--alg", "unblocked", "--n", "12", "--m", "20",
        "--reps", "1", "--no-verify",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let (_, body) = split_comments(&text);
    let row = body[1];
    assert!(row.starts_with("getrf,unblocked,12,20,none,0,0,"), "row: {row}");
    assert!(row.ends_with(",false"), "row: {row}");
}

#[test]
fn predict_prints_the_share_ladder() {
    let out = bench(&["predict", "--n", "64", "--c", "8"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "level,share\n1,0.75\n2,0.1875\n3,0.046875\nbase,0.015625\n"
    );
}

#[test]
fn breakdown_file_has_comments_then_header() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("breakdown.csv");
    let out = bench(&[
        "breakdown", "--op", "potrf", "--n", "48", "--c", "8",
        "--csv", path.to_str().expect("utf-8 path"),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));

    let text = std::fs::read_to_string(&path).expect("csv should exist");
    assert!(text.starts_with("# recla-bench"));
    let (comments, body) = split_comments(&text);
    assert!(comments.iter().any(|l| l.contains("cumulative_blas3_share=")));
    assert_eq!(body[0], BREAKDOWN_HEADER);
    assert!(body[1..].iter().filter(|l| !l.is_empty()).count() >= 3);
}

#[test]
fn breakdown_rejects_sylvester_ops() {
    let out = bench(&["breakdown", "--op", "trsyl", "--n", "16", "--c", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_csv_path_is_an_io_error() {
    let out = bench(&[
        "breakdown", "--op", "trtri", "--n", "16", "--c", "4",
        "--csv", "/nonexistent-dir/out.csv",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn verification_failures_map_to_exit_code_3() {
    assert_eq!(BenchError::Verification("residual".into()).exit_code(), 3);
    assert_eq!(BenchError::Usage("flag".into()).exit_code(), 2);
    assert_eq!(BenchError::Io("disk".into()).exit_code(), 4);
}

#[test]
fn oracle_subcommand_emits_sweep_schema_rows() {
    let out = bench(&["oracle", "--n-max", "6", "--params", "1,3", "--seeds", "2"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let (comments, body) = split_comments(&text);
    assert!(comments.iter().any(|l| l.contains("checks=")));
    assert_eq!(body[0], SWEEP_HEADER);
    let rows: Vec<&str> = body[1..].iter().copied().filter(|l| !l.is_empty()).collect();
    // trtri, potrf, lauum in both triangles plus getrf: 7 op variants
    // over sizes 0..=6 and 2 params.
    assert_eq!(rows.len(), 7 * 7 * 2);
    for row in &rows {
        assert!(row.split(',').nth(1) == Some("oracle-sweep"), "row: {row}");
        assert!(row.ends_with(",true"), "row: {row}");
    }
}

#[test]
fn unknown_kernel_env_falls_back_with_a_note() {
    let out = Command::new(env!("CARGO_BIN_EXE_recla-bench"))
        .args(["predict", "--n", "8", "--c", "8"])
        .env("RECLA_KERNELS", "turbo")
        .output()
        .expect("binary should spawn");
    // predict never touches a provider, so the note must not appear...
    assert_eq!(out.status.code(), Some(0));
    assert!(!stderr(&out).contains("turbo"));

    let out = Command::new(env!("CARGO_BIN_EXE_recla-bench"))
        .args(["breakdown", "--op", "trtri", "--n", "8", "--c", "8"])
        .env("RECLA_KERNELS", "turbo")
        .output()
        .expect("binary should spawn");
    // ...while provider-backed commands still run and say what happened.
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("turbo"), "stderr: {}", stderr(&out));
    assert!(Path::new(env!("CARGO_BIN_EXE_recla-bench")).exists());
}
