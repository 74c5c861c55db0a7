use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use coupler_cli::table::Document;

const BIN: &str = env!("CARGO_BIN_EXE_coupler");

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn coupler(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("COUPLER_OUT_DIR");
    if let Some(dir) = env_out {
        cmd.env("COUPLER_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

const RABI: &str = r#"{
  "name": "rabi-small",
  "params": { "omega_a": 2.0, "omega_r": 1.0, "n_c": 4.0, "sweep": { "detuning": 0.0 } },
  "experiment": { "kind": "rabi", "times": { "linspace": { "start": 0.0, "end": 3.141592653589793, "count": 3 } } }
}"#;

#[test]
fn rabi_csv_has_header_plus_rows_and_meta() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_scenario(tmp.path(), "s.json", RABI);
    let out = tmp.path().join("out");
    let res = coupler(&["run", path.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(out.join("rabi-small.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[0], "t,n1,n2,n1_exact,n2_exact,n2_bogoliubov");
    let peak: f64 = lines[2].split(',').nth(4).unwrap().parse().unwrap();
    assert!((peak - 4.0).abs() < 1e-12);
    let meta: Document = serde_json::from_str(&fs::read_to_string(out.join("rabi-small.meta.json")).unwrap()).unwrap();
    assert!(meta.summary.passed);
    assert!(meta.table.is_none());
    assert_eq!(meta.scenario.integration.unwrap().rel_tol, 1e-10);
}

#[test]
fn json_output_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_scenario(tmp.path(), "s.json", RABI);
    let res =
        coupler(&["run", path.to_str().unwrap(), "--format", "json", "--out", tmp.path().to_str().unwrap()], None);
    assert!(res.status.success());
    let doc: Document = serde_json::from_str(&fs::read_to_string(tmp.path().join("rabi-small.json")).unwrap()).unwrap();
    let scenario = coupler_cli::Scenario::from_json(RABI, &path).unwrap();
    let report = coupler_cli::run_scenario(&scenario).unwrap();
    assert_eq!(doc.table.unwrap(), report.table);
    assert_eq!(doc.summary, report.summary);
}

#[test]
fn empty_grid_is_a_config_error_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let body = RABI.replace("\"count\": 3", "\"count\": 0");
    let path = write_scenario(tmp.path(), "s.json", &body);
    let out = tmp.path().join("out");
    let res = coupler(&["run", path.to_str().unwrap(), "--out", out.to_str().unwrap()], None);
    assert_eq!(res.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn unknown_key_and_missing_file() {
    let tmp = tempfile::tempdir().unwrap();
    let body = RABI.replace("\"n_c\"", "\"nc\"");
    let path = write_scenario(tmp.path(), "s.json", &body);
    let res = coupler(&["validate", path.to_str().unwrap()], None);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("s.json"));

    let res = coupler(&["run", tmp.path().join("absent.json").to_str().unwrap()], None);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("absent.json"));
}

#[test]
fn out_flag_beats_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_scenario(tmp.path(), "s.json", RABI);
    let env_dir = tmp.path().join("env");
    let flag_dir = tmp.path().join("flag");

    let res = coupler(&["run", path.to_str().unwrap()], Some(&env_dir));
    assert!(res.status.success());
    assert!(env_dir.join("rabi-small.csv").exists());

    fs::remove_dir_all(&env_dir).unwrap();
    let res = coupler(&["run", path.to_str().unwrap(), "--out", flag_dir.to_str().unwrap()], Some(&env_dir));
    assert!(res.status.success());
    assert!(flag_dir.join("rabi-small.csv").exists());
    assert!(!env_dir.exists());
}

#[test]
fn narrow_landau_zener_window_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let body = r#"{
      "name": "lz",
      "params": { "omega_a": 0.0, "omega_r": 0.0, "n_c": 1.0, "sweep": { "detuning": 0.0 } },
      "experiment": { "kind": "lz-scaling", "g": 1.0, "density": 1.0, "rates": [1.0], "edge": 5.0 }
    }"#;
    let path = write_scenario(tmp.path(), "s.json", body);
    let res = coupler(&["validate", path.to_str().unwrap()], None);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn shipped_scenarios_validate() {
    let mut seen = 0;
    for entry in fs::read_dir(scenarios_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            let res = coupler(&["validate", path.to_str().unwrap()], None);
            assert!(res.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&res.stderr));
            seen += 1;
        }
    }
    assert!(seen >= 7);
}

#[test]
fn list_experiments_names_every_kind() {
    let res = coupler(&["list-experiments"], None);
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    for kind in [
        "rabi",
        "bogoliubov-compare",
        "lz-scaling",
        "oracle-fidelity",
        "entanglement",
        "kerr-breakdown",
        "field-profile",
    ] {
        assert!(text.lines().any(|l| l.starts_with(kind)), "{kind}");
    }
}

#[test]
fn schema_lists_the_same_experiments() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/scenario.schema.json");
    let schema: serde_json::Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    let kinds: Vec<&str> = schema["$defs"]["experiment"]["oneOf"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v["properties"]["kind"]["const"].as_str().unwrap())
        .collect();
    let known: Vec<&str> = coupler_cli::scenario::EXPERIMENTS.iter().map(|(k, _)| *k).collect();
    assert_eq!(kinds, known);
}
