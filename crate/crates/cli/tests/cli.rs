use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sim")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str) -> String {
    let out = sim(&["config", name]);
    assert!(out.status.success());
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, &out.stdout).unwrap();
    path.to_str().unwrap().to_string()
}

/// Annulus benchmark shrunk to run in well under a second.
fn small_annulus(dir: &Path) -> String {
    let text = fs::read_to_string(write_config(dir, "annulus-harmonic")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["geometry"]["angular_elements"] = 24.into();
    for side in ["rotor", "stator"] {
        v["geometry"][side]["bands"][0]["elements"] = 6.into();
    }
    let path = dir.join("small.json");
    fs::write(&path, v.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn error_kind(out: &Output) -> String {
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn run_writes_torque_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_annulus(dir.path());
    let out = dir.path().join("run");
    let o = sim(&["run", "--config", &config, "--out", out.to_str().unwrap(), "--scheme", "implicit-euler", "--nt", "6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("torque.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,delta_deg,torque");
    assert_eq!(lines.len(), 8);
    // 17 significant digits
    let first = lines[1].split(',').next().unwrap();
    assert!(first.contains("e"), "{first}");
    assert_eq!(first.split('e').next().unwrap().trim_start_matches('-').len(), 18);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("run-summary.json")).unwrap()).unwrap();
    assert_eq!(summary["manifest"]["scheme"], "implicit-euler");
    assert_eq!(summary["manifest"]["n_intervals"], 6);
    assert!(summary["static_l2_error"]["relative"].as_f64().unwrap() < 1e-2);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_annulus(dir.path());
    let mut files = Vec::new();
    for (i, threads) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("r{i}"));
        let o = sim(&["--threads", threads, "run", "--config", &config, "--out", out.to_str().unwrap(), "--nt", "4"]);
        assert!(o.status.success());
        files.push(fs::read(out.join("torque.csv")).unwrap());
    }
    assert_eq!(files[0], files[1]);
}

#[test]
fn pm_benchmark_has_41_breakpoints() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "pm-benchmark");
    let out = dir.path().join("pm");
    let o = sim(&["run", "--config", &config, "--out", out.to_str().unwrap(), "--scheme", "static-sweep"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("torque.csv")).unwrap();
    assert_eq!(csv.lines().count(), 42);
}

#[test]
fn condition_table_starts_at_the_zero_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cond");
    let o = sim(&["condition", "--out", out.to_str().unwrap(), "--k-max", "10"]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out.join("condition.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "k,kappa_unscaled,kappa_scaled");
    assert!(lines[1].starts_with("0,"));
    assert_eq!(lines.len(), 12);
}

#[test]
fn single_level_convergence_has_no_order() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_annulus(dir.path());
    let out = dir.path().join("conv");
    let o = sim(&["convergence", "--config", &config, "--out", out.to_str().unwrap(), "--levels", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("convergence.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[1].ends_with(','));
}

#[test]
fn config_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x");
    let missing = sim(&["run", "--config", "/nonexistent.json", "--out", out.to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(error_kind(&missing), "config");

    let config = small_annulus(dir.path());
    let text = fs::read_to_string(&config).unwrap().replace("\"geometry\"", "\"extra\": 1, \"geometry\"");
    let bad = dir.path().join("bad.json");
    fs::write(&bad, text).unwrap();
    let o = sim(&["run", "--config", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    let o = sim(&["run", "--config", &config, "--out", out.to_str().unwrap(), "--scheme", "leapfrog"]);
    assert_eq!(o.status.code(), Some(2));
    let o = sim(&["condition", "--out", out.to_str().unwrap(), "--r1", "0.05", "--r2", "0.04"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn torque_compare_writes_three_traces() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_annulus(dir.path());
    let out = dir.path().join("cmp");
    let o = sim(&["torque-compare", "--config", &config, "--out", out.to_str().unwrap(), "--nt", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("torque-compare.csv")).unwrap();
    assert!(csv.starts_with("t,delta_deg,static_sweep,implicit_euler,space_time\n"));
    assert_eq!(csv.lines().count(), 6);
    assert!(out.join("compare-summary.json").exists());
}
