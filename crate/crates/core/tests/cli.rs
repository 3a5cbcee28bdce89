use serde_json::Value;
use std::path::PathBuf;
use std::process::Command;

fn input(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/inputs").join(name)
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_lieinv")).args(args).output().expect("binary runs");
    let report: Value = serde_json::from_slice(&out.stdout).expect("report on stdout");
    (out.status.code().expect("exit code"), report)
}

fn run_files(cmd: &str, files: &[&str], extra: &[&str]) -> (i32, Value) {
    let paths: Vec<String> = files.iter().map(|f| input(f).display().to_string()).collect();
    let mut args = vec![cmd];
    args.extend(paths.iter().map(String::as_str));
    args.extend(extra);
    run(&args)
}

#[test]
fn check_reports_series() {
    let (code, r) = run_files("check", &["g6_99.json"], &[]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["solvable"], true);
    assert_eq!(r["result"]["nilpotent"], false);
    let (code, r) = run_files("check", &["abelian6.json"], &[]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["nilpotent"], true);
}

#[test]
fn bad_inputs_have_distinct_codes() {
    let (code, r) = run_files("check", &["corrupted.json"], &[]);
    assert_eq!(code, 1);
    assert!(r["result"]["error"].as_str().unwrap().contains("line"));
    let (code, r) = run_files("count", &["broken.json"], &[]);
    assert_eq!(code, 2);
    assert!(!r["result"]["detail"]["jacobi_violations"].as_array().unwrap().is_empty());
    let (code, _) = run_files("check", &["does-not-exist.json"], &[]);
    assert_eq!(code, 1);
}

#[test]
fn counts() {
    for (file, n) in [("g6_65.json", 2), ("g6_99.json", 0), ("abelian6.json", 6)] {
        let (code, r) = run_files("count", &[file], &["--trials", "5"]);
        assert_eq!(code, 0);
        assert_eq!(r["result"]["invariant_count"], n, "{file}");
    }
}

#[test]
fn verify_exit_codes() {
    let (code, r) = run_files("verify", &["g6_65.json", "g6_65_invariants.json"], &[]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["verdict"], "pass");
    let (code, r) = run_files("verify", &["g6_65.json", "x1.json"], &[]);
    assert_eq!(code, 3);
    assert_eq!(r["result"]["invariants"][0]["verdict"], "fail");
    let (code, _) = run_files("verify", &["g6_99.json", "empty.json"], &[]);
    assert_eq!(code, 0);
}

#[test]
fn catalog_single_entries() {
    let (code, r) = run(&["catalog", "--id", "g6_53"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["entries"][0]["outcome"], "pass");
    let (code, r) = run(&["catalog", "--id", "g6_34"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["entries"][0]["outcome"], "quarantined");
    let (code, _) = run(&["catalog", "--id", "g6_100"]);
    assert_eq!(code, 1);
}

#[test]
fn catalog_regression_exit_code() {
    // mark a broken row as verified
    let mut cat: Value = serde_json::from_str(lieinv::catalog::BUILTIN_JSON).unwrap();
    for a in cat["algebras"].as_array_mut().unwrap() {
        if a["id"] == "g6_72" {
            a["status"] = "verified".into();
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("catalog.json");
    std::fs::write(&path, cat.to_string()).unwrap();
    let (code, r) = run(&["catalog", "--id", "g6_72", "--catalog", path.to_str().unwrap()]);
    assert_eq!(code, 4);
    assert_eq!(r["result"]["summary"]["regressions"][0], "g6_72");
}

#[test]
fn family_commands() {
    let (code, r) = run(&["family", "theorem2", "--m", "3"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["count"]["computed"], 4);
    let (code, r) = run(&["family", "theorem3", "--m", "2", "--alphas", "0,0", "--x1-action", "zero"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["dichotomy"]["case"], 2);
    assert_eq!(r["result"]["dichotomy"]["center_invariant_passes"], true);
    let (code, r) = run(&["family", "theorem3", "--m", "2", "--x1-action", "nonzero"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["dichotomy"]["invariant_count"], 0);
    assert_eq!(r["result"]["det_identity"]["holds"], true);
    let (code, _) = run(&["family", "theorem3", "--m", "3", "--alphas", "0,1,0,1"]);
    assert_eq!(code, 2);
}

#[test]
fn derivation_files() {
    // diagonal derivations of g_4 ⊕ 𝕂 have weights (a, b, a+b, 2a+b, c)
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    let diag = |w: [i64; 5]| {
        let rows: Vec<Vec<i64>> = (0..5).map(|i| (0..5).map(|k| if i == k { w[i] } else { 0 }).collect()).collect();
        serde_json::json!({ "derivation": rows }).to_string()
    };
    std::fs::write(&path, diag([1, -1, 0, 0, 0])).unwrap();
    let (code, _) = run(&["family", "theorem2", "--m", "2", "--derivation-file", path.to_str().unwrap()]);
    assert_eq!(code, 2);
    std::fs::write(&path, diag([1, -1, 0, 1, 0])).unwrap();
    let (code, r) = run(&["family", "theorem2", "--m", "2", "--derivation-file", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{r}");
    assert_eq!(r["result"]["count"]["computed"], 2);
}

#[test]
fn reports_are_reproducible() {
    let strip = |mut v: Value| {
        v["wall_time_ms"] = 0.into();
        v
    };
    for args in [vec!["family", "theorem3", "--m", "3", "--seed", "9"], vec!["catalog", "--id", "g6_65", "--seed", "4"]] {
        let (_, a) = run(&args);
        let (_, b) = run(&args);
        assert_eq!(strip(a), strip(b));
    }
}
