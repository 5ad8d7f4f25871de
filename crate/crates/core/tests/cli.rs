use std::path::Path;
use std::process::{Command, Output};

use supereight::cli::OrbitFile;

fn bin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supereight"))
        .args(args)
        .current_dir(dir)
        .env("CHOREO_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bounds_table_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["bounds", "--resolution", "24"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("total_collision ≈ 9.153"));
    assert!(s.contains("test_path < 5: PASS"));

    let o = bin(&["bounds", "--json", "--resolution", "24"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert!(rows.iter().any(|r| r["name"] == "total_collision"));
    for r in rows {
        assert!(r["formula_value"].is_f64() && r["oracle_value"].is_f64());
    }
}

#[test]
fn minimize_verify_export_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "minimize", "--k", "8", "--m", "128", "--seeds", "3", "-o", "orbit.json", "--log", "log.csv",
    ];
    let o = bin(&args, dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let first = std::fs::read(dir.path().join("orbit.json")).unwrap();
    let log = std::fs::read_to_string(dir.path().join("log.csv")).unwrap();
    assert!(log.starts_with("seed,rung,iter,eps,action,grad_norm,min_sep\n"));
    assert_eq!(log.lines().filter(|l| l.starts_with("# start")).count(), 3);

    let file = OrbitFile::read(&dir.path().join("orbit.json")).unwrap();
    assert!(file.diagnostics.converged);
    assert_eq!(file.truncation, 8);
    let text = std::str::from_utf8(&first).unwrap();
    assert!(text.starts_with("{\n  \"format_version\": 1,\n  \"period\": 6.283185307179586,"));
    assert_eq!(OrbitFile::from_json(text).unwrap().to_json().unwrap(), text);

    bin(&args, dir.path());
    assert_eq!(std::fs::read(dir.path().join("orbit.json")).unwrap(), first);

    let o = bin(&["verify", "orbit.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("choreography"));
    let o = bin(&["verify", "orbit.json", "--json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["choreography"].as_f64().unwrap() < 1e-8);

    let o = bin(&["export", "orbit.json", "--samples", "512", "--format", "csv"], dir.path());
    let csv = stdout(&o);
    assert_eq!(csv.lines().count(), 513);
    assert_eq!(csv.lines().next().unwrap(), "t,q1x,q1y,q2x,q2y,q3x,q3y,q4x,q4y");
    let o = bin(&["export", "orbit.json", "--samples", "7", "--format", "json", "-o", "e.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("e.json")).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 7);
}

#[test]
fn non_convergence_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(
        &["minimize", "--k", "6", "--m", "64", "--seeds", "1", "--max-iters", "3", "-o", "o.json", "--log", "l.csv"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(dir.path().join("l.csv").exists());
    let o = bin(&["verify", "o.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn input_errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(&["verify", "missing.json"], dir.path()).status.code(), Some(3));
    std::fs::write(dir.path().join("bad.json"), "{\"format_version\": 1}").unwrap();
    assert_eq!(bin(&["export", "bad.json"], dir.path()).status.code(), Some(3));
    assert_eq!(bin(&["minimize", "--k", "8", "--m", "10"], dir.path()).status.code(), Some(3));
    assert_eq!(bin(&["scaling", "--d", "-1"], dir.path()).status.code(), Some(3));
    assert_eq!(bin(&["no-such-command"], dir.path()).status.code(), Some(3));
}

#[test]
fn scaling_and_levi_civita_commands() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["scaling", "--d", "0", "--branch", "+"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("-1.5707963"));
    let o = bin(&["scaling", "--d", "1", "--branch", "-", "--json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let diff = v["theta_extrapolated"].as_f64().unwrap() - v["theta_closed_form"].as_f64().unwrap();
    assert!(diff.abs() < 1e-2);

    let o = bin(&["levi-civita", "--q2", "1,0", "--p2", "0,-1", "--json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["quadrant_sign"], "positive");
    let o = bin(&["levi-civita", "--q2", "0,0"], dir.path());
    assert_eq!(o.status.code(), Some(3));
}
