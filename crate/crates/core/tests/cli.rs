use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holonomy-lab")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn list_scenarios_names_every_builtin() {
    let out = lab(&["list-scenarios"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["abelian_ramp", "static_solenoid", "su2_two_color", "pure_gauge"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn builtin_run_writes_both_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&["run", "--scenario", "su2_two_color", "--resolution", "64", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("identities.csv")).unwrap();
    assert!(csv.starts_with("scenario,color,term,value,residual_name,residual,resolution\n"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
}

#[test]
fn forced_cancellation_on_static_flux_is_a_residual_failure() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = lab(&["run", "--scenario", "static_solenoid", "--resolution", "64", "--out", d]);
    assert_eq!(code(&out), 0);
    let out = lab(&[
        "run",
        "--scenario",
        "static_solenoid",
        "--resolution",
        "64",
        "--expect-cancellation",
        "true",
        "--out",
        d,
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn malformed_config_exits_one_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.ini");
    std::fs::write(&cfg, "[field]\nflux_max = lots\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = lab(&["run", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(!Path::new(&out_dir).exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&lab(&["frobnicate"])), 1);
    assert_eq!(code(&lab(&["run"])), 1);
    assert_eq!(code(&lab(&["run", "--scenario", "no_such_scenario"])), 1);
    assert_eq!(code(&lab(&["--help"])), 0);
}

#[test]
fn quantize_prints_json() {
    let out = lab(&["quantize", "--flux", "3.141592653589793"]);
    assert_eq!(code(&out), 0);
    let q: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(q["nearest_n"], 1);
    assert_eq!(q["constrained"], true);
    let out = lab(&["quantize", "--flux", "0.3", "--time-dependent"]);
    let q: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(q["constrained"], false);
    assert_eq!(q["phase"], 0.0);
}

#[test]
fn probe_prints_one_row_per_scale() {
    let out = lab(&["probe-higher-order", "--scenario", "su2_two_color", "--scales", "0.5,1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 3);
}

#[test]
fn convergence_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&[
        "convergence",
        "--scenario",
        "abelian_ramp",
        "--resolutions",
        "16,32",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    assert!(csv.starts_with("scenario,residual_name,resolution,residual,fitted_order\n"));
}
