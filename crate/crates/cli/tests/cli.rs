//! End-to-end runs of the `kds` binary: exit codes and schema conformance.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};

fn kds() -> Command {
    Command::new(env!("CARGO_BIN_EXE_kds"))
}

fn schema(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../schemas")
        .join(format!("{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_conforms(name: &str, doc: &Value) {
    let validator = jsonschema::validator_for(&schema(name)).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

struct Run {
    code: i32,
    out: PathBuf,
    stderr: String,
    _dir: tempfile::TempDir,
}

fn run(command: &str, config: &str, extra: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.path().join("out");
    let output = kds()
        .arg(command)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap();
    Run {
        code: output.status.code().unwrap(),
        out,
        stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
        _dir: dir,
    }
}

fn reference(a: f64) -> Value {
    json!({"spacetime": {"lambda": 0.06, "a": a, "mass": 1.0}})
}

#[test]
fn params_reference_and_overrotating() {
    let ok = run("params", &reference(0.0).to_string(), &[]);
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    let p = read_json(&ok.out.join("params.json"));
    assert_conforms("params", &p);
    assert_conforms("manifest", &read_json(&ok.out.join("manifest.json")));
    assert_eq!(p["subextremal"], true);
    assert!((p["horizons"]["r_e"].as_f64().unwrap() - 2.218326460698341).abs() < 1e-9);

    let bad = run("params", &json!({"spacetime": {"lambda": 0.2, "a": 0.0, "mass": 1.0}}).to_string(), &[]);
    assert_eq!(bad.code, 2);
    let p = read_json(&bad.out.join("params.json"));
    assert_conforms("params", &p);
    assert_eq!(p["subextremal"], false);
    assert_eq!(read_json(&bad.out.join("manifest.json"))["exit_code"], 2);
}

#[test]
fn malformed_config_reports_position() {
    let r = run("params", "{\n  \"spacetime\": {\n    \"lambda\": 0.06,,\n", &[]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);

    let r = run("params", &json!({"spacetime": {"lambda": 0.06, "a": 0.1, "mass": 1.0}, "bogus": 1}).to_string(), &[]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("bogus"), "{}", r.stderr);
}

#[test]
fn missing_arguments_are_usage_errors() {
    let out = kds().arg("params").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = kds().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = kds().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn trap_outputs_conform_and_seed_overrides() {
    let mut cfg = reference(0.3);
    cfg["seed"] = json!(11);
    cfg["trap"] = json!({
        "frames": [{"kind": "midpoint"}, {"kind": "radius", "value": 4.0}],
        "census": {"count": 50},
        "contrast": {"count": 20, "offset": 0.0, "max_parameter": 10.0}
    });
    let r = run("trap", &cfg.to_string(), &["--seed", "5"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let t = read_json(&r.out.join("trap.json"));
    assert_conforms("trap", &t);
    assert_eq!(t["seed"], 5);
    assert_eq!(t["verdict"], "PASS");
    assert!(t["contrast"]["trapped"].as_u64().unwrap() > 0);
    let m = read_json(&r.out.join("manifest.json"));
    assert_conforms("manifest", &m);
    assert_eq!(m["seed"], 5);
    let census = std::fs::read_to_string(r.out.join("census.csv")).unwrap();
    assert_eq!(census.lines().count(), 4);

    cfg["trap"]["census"]["count"] = json!(0);
    assert_eq!(run("trap", &cfg.to_string(), &[]).code, 1);
}

#[test]
fn qnm_outputs_conform() {
    let mut cfg = reference(0.0);
    cfg["qnm"] = json!({
        "m": 0,
        "grid": {"nr": 24, "ntheta": 4},
        "window": {"re_max": 0.5, "im_min": -0.12, "im_max": 0.5},
        "regularity": 2.0,
        "eigenfunctions": true
    });
    let r = run("qnm", &cfg.to_string(), &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let q = read_json(&r.out.join("qnm.json"));
    assert_conforms("qnm", &q);
    assert_conforms("manifest", &read_json(&r.out.join("manifest.json")));
    let modes = q["modes"].as_array().unwrap();
    let found = modes.iter().any(|m| {
        (m["sigma"]["re"].as_f64().unwrap() - 0.063455951595).abs() < 1e-5
            && (m["sigma"]["im"].as_f64().unwrap() + 0.094825312332).abs() < 1e-5
    });
    assert!(found, "{modes:?}");
    assert!(r.out.join("eigenfunctions.csv").exists());

    cfg["qnm"]["grid"] = json!({"nr": 4, "ntheta": 4});
    assert_eq!(run("qnm", &cfg.to_string(), &[]).code, 1);
}

fn small_certify(a_values: Value, frames: Value) -> Value {
    let mut cfg = reference(0.3);
    cfg["certify"] = json!({
        "a_values": a_values,
        "frames": frames,
        "convexity_samples": 100,
        "escape_grid": {"nr": 40, "ntheta": 8, "npsi": 8},
        "radial_thetas": 8,
        "ergo_nr": 200,
        "ergo_ntheta": 16,
        "degeneracy_samples": 200,
        "split_trajectories": 4
    });
    cfg
}

#[test]
fn certify_outputs_conform() {
    let cfg = small_certify(json!([0.0, 0.3]), json!([{"kind": "event_horizon"}, {"kind": "midpoint"}]));
    let r = run("certify", &cfg.to_string(), &[]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let c = read_json(&r.out.join("certify.json"));
    assert_conforms("certify", &c);
    assert_conforms("manifest", &read_json(&r.out.join("manifest.json")));
    assert_eq!(c["verdict"], "PASS");
    let csv = std::fs::read_to_string(r.out.join("certify.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + c["claims"].as_array().unwrap().len());
}

#[test]
fn certify_rejects_frame_outside_the_horizons() {
    let cfg = small_certify(json!([0.3]), json!([{"kind": "midpoint"}, {"kind": "radius", "value": 7.0}]));
    let r = run("certify", &cfg.to_string(), &[]);
    assert_eq!(r.code, 1, "{}", r.stderr);
    assert!(!r.out.join("certify.json").exists());
}

#[test]
fn manifest_is_a_valid_config() {
    let mut cfg = reference(0.15);
    cfg["trap"] = json!({"frames": [{"kind": "midpoint"}], "census": {"count": 10}, "contrast": null});
    let first = run("trap", &cfg.to_string(), &["--seed", "9"]);
    assert_eq!(first.code, 0, "{}", first.stderr);
    let manifest = std::fs::read_to_string(first.out.join("manifest.json")).unwrap();
    let second = run("trap", &manifest, &[]);
    assert_eq!(second.code, 0, "{}", second.stderr);
    assert_eq!(
        std::fs::read(first.out.join("trap.json")).unwrap(),
        std::fs::read(second.out.join("trap.json")).unwrap()
    );
}
