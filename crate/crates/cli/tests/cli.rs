use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;
use tempfile::TempDir;

fn hirota(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hirota"))
        .args(args)
        .env_remove("HIROTA_THREADS")
        .output()
        .expect("spawn hirota")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}\nstderr: {}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schema").join(format!("{name}.json"))
}

fn assert_schema(name: &str, doc: &Value) {
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(schema_path(name)).unwrap()).unwrap();
    let compiled = JSONSchema::compile(&schema).expect("schema compiles");
    if let Err(errors) = compiled.validate(doc) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{name} schema violations: {msgs:?}\n{doc:#}");
    };
}

fn ok_json(args: &[&str], schema: &str) -> Value {
    let out = hirota(args);
    assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    assert!(!out.stderr.is_empty(), "summary expected on stderr");
    let doc = stdout_json(&out);
    assert_schema(schema, &doc);
    doc
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn generator_counts_per_mode() {
    for (mode, g, count) in [("per-point", 3, 19), ("deduped", 3, 10), ("reduced", 3, 7), ("reduced", 5, 31)] {
        let doc = ok_json(&["generators", "--genus", &g.to_string(), "--mode", mode], "generators");
        assert_eq!(doc["count"], count, "{mode} g={g}");
        assert_eq!(doc["generators"].as_array().unwrap().len(), count);
    }
}

#[test]
fn generators_document_round_trips_through_file() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("gens.json");
    let res = hirota(&["generators", "--genus", "2", "--mode", "deduped", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&res), 0);
    assert!(res.stdout.is_empty(), "--out must keep stdout clean");
    let text = std::fs::read_to_string(&out).unwrap();
    let set = hirota_core::io::parse_generators(&text).unwrap();
    assert_eq!(hirota_core::io::generators_json(&set).unwrap(), text);
}

#[test]
fn param_verify_invert_pipeline() {
    let dir = TempDir::new().unwrap();
    let params_path = dir.path().join("params.json");
    let point = ok_json(&["param", "--genus", "3", "--seed", "11", "--params-out", params_path.to_str().unwrap()], "point");
    let params: Value = serde_json::from_str(&std::fs::read_to_string(&params_path).unwrap()).unwrap();
    assert_schema("params", &params);
    let point_path = write(&dir, "point.json", &point.to_string());

    for mode in ["per-point", "deduped", "reduced"] {
        let v = ok_json(&["verify", "--point", &point_path, "--genus", "3", "--mode", mode], "verify");
        assert_eq!(v["vanishing"], true);
    }
    let back = ok_json(&["param", "--invert", &point_path], "params");
    assert_eq!(back, params);

    let again = ok_json(&["param", "--params", params_path.to_str().unwrap()], "point");
    assert_eq!(again, point);
}

#[test]
fn perturbed_point_fails_verification_with_exit_1() {
    let dir = TempDir::new().unwrap();
    let mut point = ok_json(&["param", "--genus", "2", "--seed", "5"], "point");
    point["w"][0] = Value::String("12345/7".into());
    let path = write(&dir, "bad.json", &point.to_string());
    let out = hirota(&["verify", "--point", &path, "--genus", "2"]);
    assert_eq!(code(&out), 1);
    let doc = stdout_json(&out);
    assert_schema("verify", &doc);
    assert_eq!(doc["vanishing"], false);
    let labels: Vec<&str> = doc["nonvanishing"].as_array().unwrap().iter().map(|n| n["label"].as_str().unwrap()).collect();
    assert!(labels.contains(&"10"), "{labels:?}");
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("10"), "{stderr}");

    let inv = hirota(&["param", "--invert", &path]);
    assert_eq!(code(&inv), 2, "a point off the image is an input error");
}

#[test]
fn certify_modular_and_exact() {
    for mode in ["modular", "exact"] {
        let doc = ok_json(&["certify", "--genus", "4", "--mode", mode, "--seed", "2"], "cert_report");
        assert_eq!(doc["verdict"], true);
        assert_eq!(doc["jacobian_rank"], 15);
        assert_eq!(doc["main_component_dim_projective"], 12);
        assert!(doc.get("timings_ms").is_none());
    }
    let timed = ok_json(&["certify", "--genus", "3", "--timings"], "cert_report");
    assert!(timed["timings_ms"].is_object());
}

#[test]
fn certify_rejects_unsupported_genus() {
    assert_eq!(code(&hirota(&["certify", "--genus", "10"])), 2);
    assert_eq!(code(&hirota(&["certify", "--genus", "7", "--mode", "exact"])), 2);
    assert_eq!(code(&hirota(&["certify", "--genus", "3", "--mode", "approximate"])), 2);
}

#[test]
fn certify_off_variety_point_is_false() {
    let dir = TempDir::new().unwrap();
    let mut point = ok_json(&["param", "--genus", "3", "--seed", "9"], "point");
    point["u"][1] = Value::String("1/3".into());
    let path = write(&dir, "bad.json", &point.to_string());
    let out = hirota(&["certify", "--genus", "3", "--point", &path]);
    assert_eq!(code(&out), 1);
    let doc = stdout_json(&out);
    assert_schema("cert_report", &doc);
    assert_eq!(doc["generators_vanish"], false);
}

#[test]
fn soliton_checks() {
    let doc = ok_json(&["soliton-check", "--k", "2", "--n", "5", "--seed", "4"], "soliton_check");
    assert_eq!(doc["vanishes"], true);
    assert_eq!(doc["tau_terms"], 10);

    let dir = TempDir::new().unwrap();
    let path = write(&dir, "sol.json", &doc["soliton"].to_string().replacen('{', "{\"schema\":1,", 1));
    let from_file = ok_json(&["soliton-check", "--soliton", &path], "soliton_check");
    assert_eq!(from_file, doc);

    let eq = ok_json(&["soliton-check", "--genus", "3", "--seed", "4"], "soliton_check");
    assert_eq!(eq["equal"], true);
}

#[test]
fn soliton_from_pluecker_coordinates() {
    let dir = TempDir::new().unwrap();
    // Gr(1,3): any positive weights give a soliton.
    let body = r#"{"schema":1,"k":1,"n":3,"kappa":["-1","0","2"],"pluecker":{"2":"3","0":"1","1":"1/2"}}"#;
    let path = write(&dir, "sol.json", body);
    let doc = ok_json(&["soliton-check", "--soliton", &path], "soliton_check");
    assert_eq!(doc["vanishes"], true);
    let keys: Vec<&String> = doc["soliton"]["pluecker"].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["0", "1", "2"]);

    // Violates the Plücker relation p01 p23 − p02 p13 + p03 p12 = 0.
    let bad = r#"{"schema":1,"k":2,"n":4,"kappa":["0","1","2","3"],
        "pluecker":{"0,1":"1","0,2":"1","0,3":"1","1,2":"1","1,3":"1","2,3":"5"}}"#;
    let path = write(&dir, "bad.json", bad);
    let out = hirota(&["soliton-check", "--soliton", &path]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout_json(&out)["vanishes"], false);
}

#[test]
fn kp_check_with_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("grid.csv");
    let doc = ok_json(
        &["kp-check", "--genus", "2", "--seed", "3", "--points", "4", "--csv", csv.to_str().unwrap()],
        "kp_check",
    );
    assert_eq!(doc["within_tolerance"], true);
    assert!(doc["max_relative"].as_f64().unwrap() <= 1e-4);
    assert!(doc["refinement_ratio"].as_f64().unwrap() >= 50.0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,t,p,residual"));
    assert_eq!(lines.count(), 4);

    let sol = ok_json(&["kp-check", "--k", "2", "--n", "4", "--seed", "3", "--points", "3"], "kp_check");
    assert_eq!(sol["within_tolerance"], true);
}

#[test]
fn kp_check_from_point_file() {
    let dir = TempDir::new().unwrap();
    let params = r#"{"schema":1,"genus":2,"lambda":["1","2"],"kappa":["2","1","-1","-5/2"]}"#;
    let params_path = write(&dir, "params.json", params);
    let point = ok_json(&["param", "--params", &params_path], "point");
    let point_path = write(&dir, "point.json", &point.to_string());
    let doc = ok_json(&["kp-check", "--point", &point_path, "--points", "3"], "kp_check");
    assert_eq!(doc["within_tolerance"], true);
}

#[test]
fn relations_hold_on_image() {
    let dir = TempDir::new().unwrap();
    let listed = ok_json(&["relations", "--genus", "4"], "relations");
    assert!(listed["count"].as_u64().unwrap() > 1);
    assert!(listed.get("all_vanish").is_none());

    let point = ok_json(&["param", "--genus", "4", "--seed", "1"], "point");
    let path = write(&dir, "p.json", &point.to_string());
    let checked = ok_json(&["relations", "--genus", "4", "--check", &path], "relations");
    assert_eq!(checked["all_vanish"], true);
    assert_eq!(checked["count"], listed["count"]);

    let capped = ok_json(&["relations", "--genus", "4", "--budget", "1"], "relations");
    assert_eq!(capped["count"], 1);
    assert_eq!(capped["truncated"], true);
}

#[test]
fn abel_values_and_input_errors() {
    let doc = ok_json(&["abel", "--kappa", "1,2,-3/2,4", "--ys", "1/3"], "abel");
    assert_eq!(doc["genus"], 2);
    assert_eq!(doc["values"].as_array().unwrap().len(), 2);

    for bad in [
        vec!["abel", "--kappa", "0.5,1"],
        vec!["abel", "--kappa", "1,2,3"],
        vec!["abel", "--kappa", "1,2", "--ys", "1"],
        vec!["abel", "--kappa", "1/0,2"],
    ] {
        let out = hirota(&bad);
        assert_eq!(code(&out), 2, "{bad:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn malformed_documents_exit_2() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("missing.json", None),
        ("garbage.json", Some("not json")),
        ("schema2.json", Some(r#"{"schema":2,"genus":1,"a":["1","1"],"u":["1"],"v":["1"],"w":["1"]}"#)),
        ("float.json", Some(r#"{"schema":1,"genus":1,"a":[1.5,"1"],"u":["1"],"v":["1"],"w":["1"]}"#)),
        ("decimal.json", Some(r#"{"schema":1,"genus":1,"a":["0.5","1"],"u":["1"],"v":["1"],"w":["1"]}"#)),
        ("short.json", Some(r#"{"schema":1,"genus":2,"a":["1","1"],"u":["1"],"v":["1"],"w":["1"]}"#)),
    ];
    for (name, body) in cases {
        let path = match body {
            Some(b) => write(&dir, name, b),
            None => dir.path().join(name).to_str().unwrap().to_string(),
        };
        let out = hirota(&["verify", "--point", &path, "--genus", "1"]);
        assert_eq!(code(&out), 2, "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["bogus"],
        vec![],
        vec!["generators"],
        vec!["generators", "--genus", "3", "--mode", "fast"],
        vec!["generators", "--genus", "0"],
        vec!["generators", "--genus", "8", "--mode", "per-point"],
        vec!["soliton-check"],
        vec!["soliton-check", "--k", "2"],
        vec!["soliton-check", "--k", "3", "--n", "3"],
        vec!["kp-check", "--genus", "2", "--step", "0"],
        vec!["--threads", "0", "generators", "--genus", "2"],
    ] {
        assert_eq!(code(&hirota(&args)), 2, "{args:?}");
    }
    assert_eq!(code(&hirota(&["--help"])), 0);
}

#[test]
fn identical_runs_are_byte_identical() {
    let runs: [&[&str]; 6] = [
        &["param", "--genus", "5", "--seed", "42"],
        &["certify", "--genus", "5", "--seed", "42"],
        &["certify", "--genus", "4", "--mode", "exact", "--seed", "42"],
        &["soliton-check", "--k", "3", "--n", "6", "--seed", "42"],
        &["kp-check", "--k", "2", "--n", "4", "--seed", "42", "--points", "3"],
        &["generators", "--genus", "4", "--mode", "deduped"],
    ];
    for args in runs {
        let a = hirota(args);
        let b = hirota(args);
        assert_eq!(code(&a), 0, "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.stderr, b.stderr, "{args:?}");
    }
    let c = hirota(&["param", "--genus", "5", "--seed", "43"]);
    assert_ne!(c.stdout, hirota(&["param", "--genus", "5", "--seed", "42"]).stdout);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["certify", "--genus", "5", "--seed", "3"];
    let one = Command::new(env!("CARGO_BIN_EXE_hirota")).args(args).env("HIROTA_THREADS", "1").output().unwrap();
    let four = hirota(&["--threads", "4", "certify", "--genus", "5", "--seed", "3"]);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn certify_genus_nine() {
    let doc = ok_json(&["certify", "--genus", "9", "--mode", "modular", "--seed", "42"], "cert_report");
    assert_eq!(doc["jacobian_rank"], 511);
    assert_eq!(doc["verdict"], true);
}

#[test]
fn rational_inputs_are_canonicalized() {
    let dir = TempDir::new().unwrap();
    let params = r#"{"schema":1,"genus":1,"lambda":["3/6"],"kappa":["4/2","-1"]}"#;
    let path = write(&dir, "p.json", params);
    let point = ok_json(&["param", "--params", &path], "point");
    let point_path = write(&dir, "pt.json", &point.to_string());
    let back = ok_json(&["param", "--invert", &point_path], "params");
    assert_eq!(back["lambda"][0], "1/2");
    assert_eq!(back["kappa"][0], "2/1");
}
