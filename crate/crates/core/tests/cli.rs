use std::path::Path;
use std::process::{Command, Output};

fn weylkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylkit"))
        .args(args)
        .env("WEYLKIT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    let o = weylkit(&["frobnicate"]);
    assert_eq!(code(&o), 2);
    let o = weylkit(&["decay", "--alpha", "-1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--alpha"));
    let o = weylkit(&["transform", "--symbol", "e:0,0", "--eps", "0", "--out", "x.json"]);
    assert_eq!(code(&o), 2);
    let o = weylkit(&["transform", "--symbol", "nonsense", "--out", "x.json"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn transform_of_unit_basis_function() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e00.json");
    let o = weylkit(&["transform", "--symbol", "e:0,0", "-N", "6", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("wrote 6x6 matrix"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["N"], 6);
    assert_eq!(v["eps"], 1.0);
    for m in 0..6 {
        for n in 0..6 {
            let re = v["re"][m][n].as_f64().unwrap();
            let im = v["im"][m][n].as_f64().unwrap();
            let want = if (m, n) == (0, 0) { 1.0 } else { 0.0 };
            assert!((re - want).abs() < 1e-12 && im.abs() < 1e-12, "({m},{n}) {re} {im}");
        }
    }
}

#[test]
fn transform_then_inverse() {
    let dir = tempfile::tempdir().unwrap();
    let mat = dir.path().join("a.json");
    let csv = dir.path().join("f.csv");
    let o = weylkit(&["transform", "--symbol", "0.5*gauss:2", "--eps", "0.5", "-N", "8", "--out", path_str(&mat)]);
    assert_eq!(code(&o), 0);
    let o = weylkit(&["inverse", "--in", path_str(&mat), "--extent", "1", "--points", "3", "--out", path_str(&csv)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,re,im");
    assert_eq!(lines.len(), 10);
    // centre of the grid: 0.5·e^0 reconstructed from an 8×8 truncation
    let centre: Vec<f64> = lines[5].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!((centre[0], centre[1]), (0.0, 0.0));
    assert!((centre[2] - 0.5).abs() < 1e-3, "{centre:?}");
}

#[test]
fn decay_row_at_unit_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let o = weylkit(&["decay", "--alpha", "0", "--tmax", "5", "--steps", "21", "--out", path_str(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut rows = text.lines();
    assert_eq!(rows.next(), Some("t,measured,reference,rel_deviation"));
    let row: Vec<f64> = rows.nth(4).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(row[0], 1.0);
    assert!((row[1] - 0.7071068).abs() < 1e-6);
    assert!((row[2] - 0.7071068).abs() < 1e-6);

    // same inputs, same bytes
    let again = dir.path().join("d2.csv");
    let o = weylkit(&["decay", "--alpha", "0", "--tmax", "5", "--steps", "21", "--out", path_str(&again)]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn numerical_failures_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.csv");
    let o = weylkit(&["decay", "--alpha", "0", "--n-start", "64", "--n-max", "128", "--out", path_str(&out)]);
    assert_eq!(code(&o), 1);
    let s = dir.path().join("s.csv");
    let o = weylkit(&["spectral", "--lambda", "2", "--j", "-1", "--sizes", "16,32", "--tol", "1e-300", "--out", path_str(&s)]);
    assert_eq!(code(&o), 1);
    assert!(s.exists());
}

#[test]
fn io_errors_exit_3_and_name_the_path() {
    let o = weylkit(&["inverse", "--in", "/nonexistent/weylkit/a.json", "--out", "f.csv"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/weylkit/a.json"));
    let o = weylkit(&["basis-table", "-N", "2", "--points", "2", "--out", "/nonexistent/weylkit/t.csv"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/weylkit/t.csv"));
}

#[test]
fn tables() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.csv");
    let o = weylkit(&["basis-table", "-N", "3", "--points", "3", "--out", path_str(&t)]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&t).unwrap();
    assert_eq!(text.lines().count(), 1 + 9 * 9);
    assert!(text.starts_with("m,n,xi_x,xi_y,re,im\n"));

    let s = dir.path().join("s.csv");
    let o = weylkit(&["spectral", "--kind", "rotation", "--lambda", "1.5", "--j", "2", "--eps", "0.5", "--sizes", "16,24", "--out", path_str(&s)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let text = std::fs::read_to_string(&s).unwrap();
    let row: Vec<f64> = text.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[0], 16.0);
    assert!((row[2] - 1.0).abs() < 1e-10);
}

#[test]
fn selftest_exit_codes() {
    assert_eq!(code(&weylkit(&["selftest", "--only", "5"])), 0);
    assert_eq!(code(&weylkit(&["selftest", "--only", "5", "--perturb", "5"])), 1);
    assert_eq!(code(&weylkit(&["selftest", "--only", "7", "--perturb", "7"])), 1);
    // the diagonal-oscillator claim does not hold; see tests/acceptance.rs
    let o = weylkit(&["selftest", "--only", "2"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).contains("[FAIL]  2"));
}
