use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn example(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtrans")).args(args).output().expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str, body: &Value) -> String {
    let dir = std::env::temp_dir().join(format!("qtrans-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body.to_string()).unwrap();
    path.display().to_string()
}

#[test]
fn verdicts() {
    let v = json_of(&["qtcheck", &example("4lines.json"), "--fiber", "0"]);
    assert_eq!(v["fiber_dimension"], 4);
    assert_eq!(v["verdict"], "not_quasi_transitive_at_fiber");

    let v = json_of(&["qtcheck", &example("cubic.json"), "--fiber", "0", "--generic"]);
    assert_eq!(v["fiber_report"]["fiber_dimension"], 3);
    assert_eq!(v["fiber_report"]["verdict"], "quasi_transitive_at_fiber");
    assert_eq!(v["generic"]["generic_fiber_dimension"], 3);

    let v = json_of(&["qtcheck", &example("psi4.json"), "--fiber", "0,0"]);
    assert_eq!(v["fiber_dimension"], 5);
    let v = json_of(&["qtcheck", &example("blowchart.json"), "--fiber", "0,0"]);
    assert_eq!(v["fiber_dimension"], 3);
}

#[test]
fn kernels() {
    let v = json_of(&["kernel", &example("psi4.json")]);
    assert_eq!(v["fields"].as_array().unwrap().len(), 3);
    assert_eq!(json_of(&["kernel", &example("blowchart.json")])["fields"], json!([]));

    let constant = scratch("constant.json", &json!({"source_vars": ["x", "y"], "components": ["3"]}));
    assert_eq!(json_of(&["kernel", &constant])["fields"], json!([["0", "1"], ["1", "0"]]));
}

#[test]
fn bphi_and_ideals() {
    let v = json_of(&["bphi", &example("xy.json")]);
    assert_eq!(v["dimension"], 3);
    assert_eq!(v["generators"], json!(["x*xi1 - y*xi2"]));
    assert_eq!(v["vars"].as_array().unwrap().len(), 4);

    assert_eq!(json_of(&["dim", &example("circle.json")])["dimension"], 1);
    let gb = json_of(&["gb", &example("circle.json"), "--order", "lex"]);
    assert_eq!(gb["basis"], json!(["x^2 + y^2 - 1"]));

    let twisted = scratch("twisted.json", &json!({"vars": ["x", "y", "z"], "generators": ["y - x^2", "z - x^3"]}));
    let est = json_of(&["oracle-dim", &twisted]);
    assert_eq!(est["estimate"], 1);
    assert_eq!(est["consistent"], true);
}

#[test]
fn stratify_and_round_trip() {
    let v = json_of(&["stratify", &example("xy.json"), "--audit-fiber", "0"]);
    assert_eq!(v["audit"]["strongThom"], true);
    assert_eq!(v["audit"]["coarse"], true);

    let source = scratch("source.json", &v["source"]);
    let check = json_of(&["stratify", &source]);
    assert_eq!(check, v["source_validation"]);
    assert_eq!(check["valid"], true);

    let parsed: qtrans::StratDatumJson = serde_json::from_value(v["source"].clone()).unwrap();
    let back = qtrans::StratDatumJson::from_datum(&parsed.to_datum().unwrap());
    assert_eq!(serde_json::to_value(back).unwrap(), v["source"]);
}

#[test]
fn measures() {
    let v = json_of(&["push", &example("unit_ball.json"), &example("blowchart.json")]);
    assert_eq!(v["values"], json!({"0,0": "1/2", "1,0": "1/4", "1,1": "1/4"}));

    let f = json_of(&["fourier", &example("mu1.json")]);
    assert_eq!(f["points"].as_array().unwrap().len(), 64);
    assert_eq!(f["points"][0]["rational"], "1/4");

    assert_eq!(json_of(&["germrank", &example("mu_squared_family.json")])["germ_rank"], 5);
    assert_eq!(json_of(&["supportgerms", &example("direction_balls.json")])["support_germs"], 3);
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["stratify".to_string(), example("cubic.json"), "--audit-fiber".into(), "0".into()],
        vec!["fourier".into(), example("mu1.json")],
        vec!["germrank".into(), example("mu_squared_family.json")],
    ] {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = run(&args).stdout;
        assert_eq!(first, run(&args).stdout);
        for threads in ["1", "4"] {
            let mut with = vec!["--threads", threads];
            with.extend(&args);
            assert_eq!(first, run(&with).stdout, "{args:?} with {threads} threads");
        }
    }
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("qtrans-out-{}.json", std::process::id()));
    let out = run(&["--out", path.to_str().unwrap(), "dim", &example("circle.json")]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["dimension"], 1);
    std::fs::remove_file(path).ok();
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["qtcheck", "missing.json"]).status.code(), Some(2));
    assert_eq!(run(&["qtcheck", "--bogus"]).status.code(), Some(2));
    let bad = scratch("bad.json", &json!({"vars": ["x"], "generators": ["x^"]}));
    assert_eq!(run(&["dim", &bad]).status.code(), Some(2));
    let out = run(&["oracle-dim", &example("circle.json"), "--primes", "10007,10009", "--oracle-budget", "100"]);
    assert_eq!(out.status.code(), Some(3));
}
