use std::path::Path;
use std::process::{Command, Output};

fn hexspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hexspec")).args(args).output().expect("spawn hexspec")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn half_flux_graph_bands_json() {
    let out = hexspec(&["bands", "--flux", "1/2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["operator"], "H");
    let bands = v["bands"].as_array().unwrap();
    assert_eq!(bands.len(), 4);
    // the two middle bands meet at the Dirac point (pi/2)^2
    let d = (std::f64::consts::PI / 2.0).powi(2);
    assert!((bands[1][1].as_f64().unwrap() - d).abs() < 1e-9);
    assert!((bands[2][0].as_f64().unwrap() - d).abs() < 1e-9);
}

#[test]
fn decimal_flux_matches_fraction() {
    let a = hexspec(&["bands", "--flux", "0.25", "--operator", "q", "--format", "json"]);
    let b = hexspec(&["bands", "--flux", "1/4", "--operator", "q", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bad_input_exits_with_one() {
    for args in [
        &["bands", "--flux", "1/0"][..],
        &["bands", "--flux", "abc"],
        &["bands", "--flux", "1/2", "--potential", "cosine"],
        &["bands", "--flux", "1/2", "--potential", "file:/nonexistent/v.txt"],
        &["frobnicate"],
        &["bands"],
    ] {
        let out = hexspec(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
    assert_eq!(hexspec(&["--help"]).status.code(), Some(0));
}

#[test]
fn zero_threads_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_hexspec"))
        .args(["bands", "--flux", "1/2"])
        .env("HEXSPEC_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

fn butterfly_with_threads(dir: &Path, threads: &str) -> (Vec<u8>, Vec<u8>) {
    let csv = dir.join(format!("b{threads}.csv"));
    let status = Command::new(env!("CARGO_BIN_EXE_hexspec"))
        .args(["butterfly", "--qmax", "12", "--hill-bands", "2", "-o"])
        .arg(&csv)
        .env("HEXSPEC_THREADS", threads)
        .status()
        .unwrap();
    assert!(status.success());
    let sidecar = dir.join(format!("b{threads}.dirichlet.json"));
    (std::fs::read(csv).unwrap(), std::fs::read(sidecar).unwrap())
}

#[test]
fn butterfly_is_thread_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    let one = butterfly_with_threads(dir.path(), "1");
    let two = butterfly_with_threads(dir.path(), "3");
    assert_eq!(one, two);
    let text = String::from_utf8(one.0).unwrap();
    assert!(text.starts_with("p,q,hill_band,lo,hi\n"));
    let sidecar: serde_json::Value = serde_json::from_slice(&one.1).unwrap();
    assert_eq!(sidecar["dirichlet_lines"].as_array().unwrap().len(), 2);
}

#[test]
fn missing_output_directory_is_a_usage_error() {
    let out = hexspec(&["butterfly", "--qmax", "3", "-o", "/nonexistent/dir/b.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn loopstate_reports_json() {
    let out = hexspec(&["loopstate", "--potential", "mathieu:20", "--phi", "1.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v.is_object());
}

#[test]
fn lyapunov_csv_header() {
    let out = hexspec(&["lyapunov", "--lambda", "10", "--max-n", "1024"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("lambda,L,converged"));
    let l: f64 = lines.next().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(l > 0.2);
}
