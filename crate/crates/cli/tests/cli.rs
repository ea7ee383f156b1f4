use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hec"))
        .args(args)
        .env_remove("HEC_NUMERIC_POLICY")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const FLAT3: &str = r#"{"name": "flat3", "algebra": {"dim": 3, "brackets": []}, "isotropy": [], "complement": [0, 1, 2]}"#;

#[test]
fn flat_space_is_ricci_flat_einstein() {
    let dir = tempfile::tempdir().unwrap();
    let space = write(dir.path(), "flat.json", FLAT3);
    let metric = write(dir.path(), "g.json", r#"{"gram": [[1,0,0],[0,1,0],[0,0,1]]}"#);
    let o = hec(&["--format", "json", "check", "--space", &space, "--metric", &metric, "--einstein"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let r = &v["report"]["einstein-residual"];
    assert_eq!(r["c"], Value::String("0".into()));
    assert_eq!(r["residual"].as_f64(), Some(0.0));
    assert_eq!(v["config"]["global"]["backend"], "rational");
}

#[test]
fn unknown_case_suggests_nearby_rows() {
    let o = hec(&["describe", "Sl2C/U2"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("did you mean"), "{err}");
    assert!(err.contains("Sl2C/U1"), "{err}");
}

#[test]
fn malformed_json_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\n  \"name\": \"x\",\n  \"algebra\": [1, 2,\n}");
    let o = hec(&["ricci", "--space", &bad]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 4"), "{err}");
    assert!(err.contains("column"), "{err}");
}

#[test]
fn no_audit_selected_is_a_usage_error() {
    let o = hec(&["check", "--case", "Sl2C/U1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn describe_shows_equivalent_modules() {
    let o = hec(&["describe", "Sl2C/U1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.starts_with("# config: "));
    assert!(out.contains("q(2)≃p(2) ⊕ p(1)*"), "{out}");
    assert!(out.contains("(agrees)"));
    assert!(out.contains("q1 ~ p1"));
}

#[test]
fn metadata_rows_describe_without_structure_constants() {
    let o = hec(&["describe", "G2/SU3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("metadata only"));
}

#[test]
fn ricci_of_catalog_case_matches_between_backends() {
    let exact = hec(&["--format", "json", "ricci", "--case", "Sl2C/U1"]);
    let float = hec(&["--format", "json", "--backend", "float", "ricci", "--case", "Sl2C/U1"]);
    assert_eq!(exact.status.code(), Some(0), "{}", stderr(&exact));
    assert_eq!(float.status.code(), Some(0), "{}", stderr(&float));
    let a: Value = serde_json::from_str(&stdout(&exact)).unwrap();
    let b: Value = serde_json::from_str(&stdout(&float)).unwrap();
    let sa = a["report"]["scalar-curvature"].as_str().unwrap().parse::<f64>().unwrap();
    let sb = b["report"]["scalar-curvature"].as_f64().unwrap();
    assert!((sa - sb).abs() < 1e-9, "{sa} vs {sb}");
}

#[test]
fn catalog_verification_is_deterministic_for_a_seed() {
    let args = ["--seed", "42", "--format", "json", "verify-paper", "--case", "Sl2RxSl2R/Dpq", "--family-members", "3"];
    let a = hec(&args);
    let b = hec(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["report"]["cases"].as_array().unwrap().len(), 3);
}

#[test]
fn catalog_verification_flags_the_failing_sign_argument() {
    let o = hec(&["verify-paper", "--case", "SU21/Dpq", "--family-members", "2", "--search-starts", "2"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stdout(&o).contains("mismatch"));
}

#[test]
fn sweep_writes_csv_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write(
        dir.path(),
        "grid.json",
        r#"{"a": {"min": "1/2", "max": 2, "steps": 3}, "b": {"min": 1, "max": 2, "steps": 2}, "d": {"min": -2, "max": -1, "steps": 2}}"#,
    );
    let out = dir.path().join("sweep.csv");
    let o = hec(&["--format", "csv", "--out", out.to_str().unwrap(), "sweep", "theta-d11", "--grid", &grid]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# config: "));
    assert_eq!(lines[1], "a,b,d,displayed_r11,displayed_combination,computed_r11,computed_combination");
    assert_eq!(lines.len(), 2 + 3 * 2 * 2);
}

#[test]
fn sweep_claim_holds_for_entry_sign() {
    let o = hec(&["sweep", "sl2c-u1-entry", "--claim", "entry_sign_is_sign_d"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("claim entry_sign_is_sign_d: holds"));
}

#[test]
fn unknown_sweep_claim_is_rejected() {
    let o = hec(&["sweep", "sl2c-u1-entry", "--claim", "nonzero"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("entry_sign_is_sign_d"));
}

#[test]
fn csv_is_rejected_where_unsupported() {
    let o = hec(&["--format", "csv", "describe", "Sl2R"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tolerance_outside_unit_interval_is_rejected() {
    let o = hec(&["--tol", "2", "list"]);
    assert_eq!(o.status.code(), Some(2));
}
