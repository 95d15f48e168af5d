use std::process::{Command, Output};

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistor-verify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn json_is_byte_identical_across_runs() {
    let args = [
        "--suite", "metric14", "--trials", "20", "--seed", "7", "--format", "json",
    ];
    let a = verify(&args);
    let b = verify(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let s = String::from_utf8(a.stdout).unwrap();
    assert!(s.starts_with("{\"version\":\"1\",\"config\":{\"suite\":\"metric14\""));
    assert!(s.contains("\"claim_id\":\"metric14.basis\""));
}

#[test]
fn different_seeds_give_different_reports() {
    let a = verify(&["--suite", "killing", "--trials", "5", "--seed", "1", "--format", "json"]);
    let b = verify(&["--suite", "killing", "--trials", "5", "--seed", "2", "--format", "json"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn text_table_has_anchor_column() {
    let o = verify(&["--suite", "weyl"]);
    assert_eq!(code(&o), 0);
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(s.lines().next().unwrap().contains("paper_anchor"));
    assert_eq!(s.lines().count(), 2 + 6);
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("twistor-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let o = verify(&[
        "--suite",
        "killing",
        "--trials",
        "3",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let s = std::fs::read_to_string(&path).unwrap();
    assert!(s.contains("\"claims\":["));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(code(&verify(&["--suite", "index", "--p", "1", "--q", "1"])), 0);
    // the closed-form index formula disagrees with the computed inertia when q >= 2
    assert_eq!(code(&verify(&["--suite", "index", "--p", "1", "--q", "2"])), 1);
    assert_eq!(
        code(&verify(&["--suite", "killing", "--trials", "3", "--tol", "1e-30"])),
        1
    );
    assert_eq!(code(&verify(&["--suite", "nope"])), 2);
    assert_eq!(code(&verify(&["--suite", "spectrum", "--p", "1", "--q", "0"])), 2);
    assert_eq!(code(&verify(&["--suite", "killing", "--p", "3", "--q", "2"])), 2);
    assert_eq!(code(&verify(&["--trials", "0"])), 2);
    assert_eq!(code(&verify(&["--format", "yaml", "--suite", "weyl"])), 2);
    assert_eq!(code(&verify(&["--suite", "weyl", "--p", "1"])), 2);
    assert_eq!(code(&verify(&["--suite", "weyl", "--bogus"])), 2);
}

#[test]
fn tolerance_flags_override_pinned_values() {
    let o = verify(&[
        "--suite",
        "sphere_curvature",
        "--p",
        "1",
        "--q",
        "0",
        "--trials",
        "5",
        "--tol-fd",
        "1e-12",
    ]);
    assert_eq!(code(&o), 1);
    let o = verify(&[
        "--suite",
        "sphere_curvature",
        "--p",
        "1",
        "--q",
        "0",
        "--trials",
        "5",
        "--tol",
        "1e-30",
    ]);
    assert_eq!(code(&o), 0);
}
