use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn nevcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nevcert")).args(args).output().expect("binary runs")
}

fn write_temp(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("nevcert-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn check_is_deterministic() {
    let path = scenario("conic_quadric.json");
    let args = ["check", "--scenario", path.to_str().unwrap(), "--format", "json", "--seed", "3"];
    let a = nevcert(&args);
    let b = nevcert(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["status"], "certified");
    assert_eq!(report["spot_checks"].as_array().unwrap().len(), 5);
}

#[test]
fn csv_has_one_row_per_radius() {
    let path = scenario("points_on_line.json");
    let out = nevcert(&["check", "--scenario", path.to_str().unwrap(), "--grid", "0:3:1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("rho,T,N_0,N_trunc_0,m_0"));
    // the two radii past the last breakpoint (0) already lie on the grid
    assert_eq!(lines.len(), 1 + 4);
    assert!(lines[1].starts_with("0,"));
}

#[test]
fn hilbert_table_of_a_conic() {
    let path = scenario("conic_lines.json");
    let out = nevcert(&["hilbert", "--scenario", path.to_str().unwrap()]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "d,H\n1,3\n2,5\n3,7\n4,9\n5,11\n6,13\n");
}

#[test]
fn malformed_polynomial_reports_position() {
    let text = std::fs::read_to_string(scenario("points_on_line.json")).unwrap().replace("\"x0 + x1\"", "\"x0 + * x1\"");
    let path = write_temp("malformed.json", &text);
    let out = nevcert(&["check", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 1, column 6"), "{err}");
    assert!(err.contains("hypersurfaces[2]"), "{err}");
}

#[test]
fn malformed_json_reports_position() {
    let path = write_temp("broken.json", "{\n  \"field\": {\"kind\": \"padic\", \"p\": 5},\n  \"map\": [,]\n}");
    let out = nevcert(&["check", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 3"));
}

#[test]
fn undetermined_position_exit_codes() {
    let text = std::fs::read_to_string(scenario("conic_quadric.json"))
        .unwrap()
        .replace("x0^2 + 2*x1^2 + 3*x2^2", "x1^2 + x0*x2 + 5*x2^2")
        .replace("\"N\": 1", "\"N\": 1, \"degree_bound\": 3");
    let path = write_temp("undetermined.json", &text);
    let p = path.to_str().unwrap();
    assert_eq!(nevcert(&["check", "--scenario", p]).status.code(), Some(2));
    assert_eq!(nevcert(&["check", "--scenario", p, "--strict"]).status.code(), Some(1));
}

#[test]
fn failed_position_is_an_error() {
    let text = std::fs::read_to_string(scenario("points_on_line.json")).unwrap().replace("\"x0 + x1\"", "\"3*x1\"");
    let path = write_temp("position.json", &text);
    let out = nevcert(&["check", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("subgeneral position"));
}

#[test]
fn nochka_and_wronskian_subcommands() {
    let path = scenario("subgeneral.json");
    let out = nevcert(&["nochka", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let w: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(w["omega"].as_array().unwrap().len(), 5);
    let path = scenario("frobenius.json");
    let out = nevcert(&["wronskian", "--scenario", path.to_str().unwrap()]);
    let c: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(c["kappa0"], 6);
    assert_eq!(c["certificate"]["gammas"], serde_json::json!([[0], [3]]));
}

#[test]
fn selftest_passes() {
    let out = nevcert(&["selftest", "--cases", "8", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}
