mod common;

use std::process::{Command, Output};

use common::scenario_path;
use kkverify::cli::{run_pipeline, Options, Scenario, Status, CHECK_IDS};
use serde_json::Value;

const BUNDLED: [&str; 5] = [
    "flat.json",
    "uniform_field.json",
    "winding.json",
    "nonlinear.json",
    "curved.json",
];

fn kkverify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kkverify"))
        .args(args)
        .output()
        .unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.display().to_string()
}

fn edited(name: &str, edit: impl FnOnce(&mut Value)) -> String {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(scenario_path(name)).unwrap()).unwrap();
    edit(&mut v);
    v.to_string()
}

#[test]
fn bundled_scenarios_exit_zero() {
    for name in BUNDLED {
        let out = kkverify(&["verify", scenario_path(name).to_str().unwrap()]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn json_is_byte_identical_across_runs() {
    for name in BUNDLED {
        let path = scenario_path(name);
        let a = kkverify(&["verify", path.to_str().unwrap(), "--format", "json"]);
        let b = kkverify(&["verify", path.to_str().unwrap(), "--format", "json"]);
        assert_eq!(a.stdout, b.stdout, "{name}");
        assert!(!a.stdout.is_empty());
    }
}

#[test]
fn every_check_appears_exactly_once() {
    for name in BUNDLED {
        let r = run_pipeline(&Scenario::load(&scenario_path(name)).unwrap(), &Options::default());
        let ids: Vec<&str> = r.checks.iter().map(|c| c.id).collect();
        assert_eq!(ids, CHECK_IDS.to_vec(), "{name}");
        for c in &r.checks {
            if c.status == Status::Skip {
                assert!(c.values.contains_key("reason"), "{name} {}", c.id);
            }
        }
    }
}

#[test]
fn report_schema_fields() {
    let out = kkverify(&[
        "verify",
        scenario_path("uniform_field.json").to_str().unwrap(),
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["schema_version", "scenario", "seed", "checks", "summary"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let c = &v["checks"][0];
    for key in ["id", "eq", "status", "values", "tol", "witness"] {
        assert!(c.get(key).is_some(), "{key}");
    }
    let anti = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "kaluza.field_antisymmetry")
        .unwrap();
    assert_eq!(anti["values"]["field_tensor"]["F^1_2"], "-B/2");
    assert_eq!(anti["values"]["field_tensor"]["F^2_1"], "B/2");
}

#[test]
fn seed_flag_overrides_file_seed() {
    let path = scenario_path("uniform_field.json");
    let a = kkverify(&["verify", path.to_str().unwrap(), "--format", "json", "--seed", "99"]);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["seed"], 99);
    let b = kkverify(&["verify", path.to_str().unwrap(), "--format", "json"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("report.json");
    let out = kkverify(&[
        "verify",
        scenario_path("flat.json").to_str().unwrap(),
        "--format",
        "json",
        "--out",
        dest.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dest).unwrap()).unwrap();
    assert_eq!(v["summary"]["fail"], 0);
}

#[test]
fn unwritable_destination_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("missing").join("report.json");
    let out = kkverify(&[
        "verify",
        scenario_path("flat.json").to_str().unwrap(),
        "--out",
        dest.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("writing"));
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let body = edited("uniform_field.json", |v| v["metric"]["g11"] = "1 + x5^2".into());
    let path = write_temp(&dir, "bent.json", &body);
    let out = kkverify(&["verify", &path, "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let status = |id: &str| v["checks"].as_array().unwrap().iter().find(|c| c["id"] == id).unwrap()["status"].clone();
    assert_eq!(status("kaluza.cylinder"), "fail");
    assert_eq!(status("kaluza.reduction_identity"), "skip");
    assert_eq!(status("kaluza.fifth_shift"), "skip");
}

#[test]
fn unquantized_path_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let body = edited("flat.json", |v| v["one_forms"][0][3] = "0.3*hbar".into());
    let out = kkverify(&["verify", &write_temp(&dir, "q.json", &body)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn load_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let no_seed = edited("flat.json", |v| {
        v.as_object_mut().unwrap().remove("seed");
    });
    let out = kkverify(&["verify", &write_temp(&dir, "a.json", &no_seed)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));

    let bad = edited("flat.json", |v| v["metric"]["g11"] = "r^".into());
    let out = kkverify(&["verify", &write_temp(&dir, "b.json", &bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("metric.g11") && err.contains("offset 2"), "{err}");

    let out = kkverify(&["verify", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(2));

    let out = kkverify(&[
        "verify",
        scenario_path("flat.json").to_str().unwrap(),
        "--tolerance-scale",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tolerance_scale_loosens_checks() {
    let dir = tempfile::tempdir().unwrap();
    // Phase 4π(1 + 3e-7) misses the default 1e-6 window by about 3.8e-6.
    let body = edited("flat.json", |v| v["one_forms"][0][3] = "hbar*(1 + 3/10000000)".into());
    let path = write_temp(&dir, "near.json", &body);
    assert_eq!(kkverify(&["verify", &path]).status.code(), Some(1));
    assert_eq!(
        kkverify(&["verify", &path, "--tolerance-scale", "10"]).status.code(),
        Some(0)
    );
}

#[test]
fn schema_and_version() {
    let out = kkverify(&["schema"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["properties"]["seed"].is_object());
    let out = kkverify(&["--version"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(
        text.contains(env!("CARGO_PKG_VERSION")) && text.contains("schema 1"),
        "{text}"
    );
}

#[test]
fn text_report_is_grouped_by_stage() {
    let out = kkverify(&["verify", scenario_path("winding.json").to_str().unwrap()]);
    let text = String::from_utf8_lossy(&out.stdout);
    let order: Vec<usize> = ["[geometry]", "[kaluza]", "[symmetry]", "[holonomy]"]
        .iter()
        .map(|h| text.find(h).unwrap())
        .collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]));
    assert!(text.contains("\"n\":3"));
}
