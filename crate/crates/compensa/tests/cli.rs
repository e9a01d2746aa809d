use std::process::{Command, Output};

use serde_json::Value;

fn compensa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compensa")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    compensa(args).status.code().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json-out");
    let out = compensa(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const TRACE: &str = r#"{"type":"dyadic","depth":2,"leaves":["2/5","-1/10","-3/10","1/5"]}"#;

#[test]
fn cantor_hand_trace() {
    let v = json(&["compensate", "cantor", "--in", TRACE]);
    assert_eq!(v["leaves"], serde_json::json!(["1/5", "0", "0", "0"]));
    let text = String::from_utf8(compensa(&["compensate", "cantor", "--in", TRACE]).stdout).unwrap();
    assert!(text.contains("leaves: [1/5, 0, 0, 0]"));
}

#[test]
fn atomic_and_float_modes() {
    let m = r#"{"type":"atomic","points":["a","b","c"],"weights":["1/2","-1/4","1/4"]}"#;
    let v = json(&["compensate", "atomic", "--in", m]);
    assert_eq!(v["weights"], serde_json::json!(["1/3", "0", "1/6"]));
    let v = json(&["compensate", "single", "--in", m, "--float", "--tol", "1e-12"]);
    let w: f64 = v["weights"][0].as_str().unwrap().parse().unwrap();
    assert!((w - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let f = r#"{"points":["a","b","c"],"values":[1,"0.9",-1]}"#;
    let mu = r#"{"type":"atomic","points":["a","b","c"],"weights":["1/2","1/2",0]}"#;
    assert_eq!(code(&["repair", "functional", "--f", f, "--mu", mu, "--eps", "4/5"]), 0);
    assert_eq!(code(&["repair", "functional", "--f", f, "--mu", mu, "--eps", "1/2"]), 1);
    assert_eq!(code(&["compensate", "cantor", "--in", r#"{"type":"dyadic","depth":1,"leaves":["1/0","1"]}"#]), 3);
    assert_eq!(code(&["compensate", "cantor", "--in", r#"{"type":"dyadic","depth":2,"leaves":["1"]}"#]), 3);
    assert_eq!(code(&["verify", "no-such-suite"]), 3);
    assert_eq!(code(&["frobnicate"]), 3);
    assert_eq!(code(&["--help"]), 0);
    let space = r#"{"points":["a","b","c"],"distances":[[0,1,5],[1,0,1],[5,1,0]]}"#;
    assert_eq!(code(&["closeness", "--mode", "metric", "--space", space, "--triples", r#"[["a","b","c"]]"#]), 3);
    let flips = r#"{"points":["a","b"],"coordinates":[0,1]}"#;
    assert_eq!(code(&["closeness", "--mode", "metric", "--space", flips, "--triples", r#"[["a","b","a"]]"#]), 0);
}

#[test]
fn repairs_report_certificates() {
    let f = r#"{"points":["a","b","c"],"values":[1,"0.9",-1]}"#;
    let mu = r#"{"type":"atomic","points":["a","b","c"],"weights":["1/2","1/2",0]}"#;
    let v = json(&["repair", "functional", "--f", f, "--mu", mu, "--eps", "4/5"]);
    assert_eq!(v["certificates"]["pairing"], "1");
    assert_eq!(v["certificates"]["hahn_compatible"], true);
    let t = r#"{"points":["a","b"],"rows":[["1","0"],["0","1/2"]]}"#;
    let f = r#"{"points":["a","b"],"values":["1","1/2"]}"#;
    let mu = r#"{"type":"atomic","points":["a","b"],"weights":[1,0]}"#;
    let v = json(&["repair", "operator", "--T", t, "--f", f, "--mu", mu, "--eps", "1/2"]);
    assert_eq!(v["certificates"]["radius"], "1");
    assert_eq!(v["certificates"]["pairing"], "1");
}

#[test]
fn transfer_closeness_and_agamma() {
    let phi = r#"{"phi":{"x1":"y","x2":"y","x3":"z"},"weights":{"y":{"x1":"1/3","x2":"2/3"},"z":{"x3":1}}}"#;
    let mu = r#"{"type":"atomic","points":["y","z"],"weights":["1/2","-1/4"]}"#;
    let v = json(&["transfer", "--phi", phi, "--in", mu]);
    assert_eq!(v["weights"], serde_json::json!(["1/4", "0"]));

    let space = r#"{"points":["a","b","c"],"coordinates":[0,1,3]}"#;
    let v = json(&["closeness", "--mode", "metric", "--space", space, "--triples", r#"[["a","b","c"],["a","a","c"]]"#]);
    assert_eq!(v["values"][0]["value"], "2/3");
    assert_eq!(v["values"][1]["value"], "1");
    assert_eq!(v["axioms"]["passed"], true);
    let v = json(&["closeness", "--mode", "derived", "--space", space, "--triples", r#"[["a","b","c"]]"#]);
    assert_eq!(v["axioms"]["passed"], true);

    let field = r#"{"f_infinity":{"atoms":{"g1":"1","inf":"-1/2"}},"exceptions":{"5":{"atoms":{"g2":"1"}}}}"#;
    let v = json(&["agamma", "compensate", "--in", field]);
    assert_eq!(v["xi_infinity"]["atoms"]["g1"], "1/2");
    assert_eq!(v["exceptions"]["5"]["atoms"]["g2"], "1");
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "all", "--cases", "15", "--seed", "11", "--depth", "4", "--json-out"];
    let a = compensa(&args);
    let b = compensa(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let reports: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), compensa::suite::SUITES.len());
    assert_eq!(code(&["verify", "cantor-lemmas", "--cases", "10", "--seed", "1", "--depth", "0"]), 0);
    assert_eq!(code(&["verify", "operator-repair", "--cases", "20", "--float"]), 0);
}

#[test]
fn replay_reproduces_a_recorded_violation() {
    let input = r#"{"input":{"f":{"points":["a"],"values":["1"]},"mu":{"type":"atomic","points":["a"],"weights":["1"]},"sigma":"2","eps":"1/2"}}"#;
    let out = compensa(&["verify", "split-bounds", "--replay", input, "--json-out"]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["violation"].is_string());
}
