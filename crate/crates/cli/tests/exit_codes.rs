use std::path::PathBuf;
use std::process::Command;

fn nkslag(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_nkslag")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("nkslag-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn verify_passes_and_reports_schema() {
    let (code, out) = nkslag(&["verify", "exotic"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["pass"], true);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(nkslag(&["verify", "torus"]).0, 2);
    assert_eq!(nkslag(&["scan", "k9"]).0, 2);
    assert_eq!(nkslag(&["frobnicate"]).0, 2);
    let bad = scratch("bad.json", "{\"matrix\": [[1, 0]");
    assert_eq!(nkslag(&["canon", "--basis", bad.to_str().unwrap()]).0, 2);
}

#[test]
fn failing_checks_exit_1() {
    assert_eq!(nkslag(&["identities", "--samples", "5", "--corrupt"]).0, 1);
    assert_eq!(nkslag(&["identities", "--samples", "5"]).0, 0);
    assert_eq!(nkslag(&["identities", "--samples", "0"]).0, 0);
}

#[test]
fn canon_reads_standard_subspace() {
    let one = "[1, 0]";
    let zero = "[0, 0]";
    let m = format!("[[{one},{zero},{zero}],[{zero},{one},{zero}],[{zero},{zero},{one}]]");
    let f = scratch("r3.json", &m);
    let (code, out) = nkslag(&["canon", "--basis", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["data"]["n_w"], 2);
    assert!((v["data"]["theta"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
}

#[test]
fn csv_output_and_artifacts() {
    let dir = std::env::temp_dir().join(format!("nkslag-cli-out-{}", std::process::id()));
    let (code, _) = nkslag(&["scan", "k3", "--output", "csv", "--out-dir", dir.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = std::fs::read_to_string(dir.join("report.csv")).unwrap();
    assert!(report.starts_with("name,value,target,source,residual,pass"));
    let roots = std::fs::read_to_string(dir.join("scan_k3.csv")).unwrap();
    assert_eq!(roots.lines().count(), 4);
}
