use std::process::Command;

use serde_json::Value;

use cdcurv::cli::{run, EXIT_INPUT, EXIT_OK, EXIT_VERDICT};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("cdcurv").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = call(args);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out:?} {err:?}"));
    (code, v)
}

const POWER1: &str = r#"{"kind":"power","alpha":"1"}"#;
const POWER2: &str = r#"{"kind":"power","alpha":"2"}"#;
const POWER3: &str = r#"{"kind":"power","alpha":"3"}"#;
const EXP_PERTURBED: &str = r#"{"kind":"exp_poly","base":{"kind":"power","alpha":"2"},"poly":["0","1"]}"#;
const HOMOGENEOUS_FRAME: &str = r#"{"h0":{"kind":"power","alpha":"1"},"h1":{"kind":"power","alpha":"3"}}"#;

#[test]
fn curvature_of_szego_metric() {
    let (code, out, _) = call(&["curvature", "--spec", POWER1, "--order", "8"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), r#"{"coefficients":["-1","-2","-3","-4","-5","-6","-7","-8"]}"#);
}

#[test]
fn lemma_output_is_exact() {
    let (code, out, _) = call(&["lemma-2n", "--n", "10"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.trim(), r#"{"value":"1/5","expected":"1/5","ok":true}"#);
}

#[test]
fn exp_perturbation_is_certified() {
    let (code, v) = json(&["similar", "--t", EXP_PERTURBED, "--s", POWER2]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["verdict"], "CERTIFIED");
    let psi: Vec<&str> = v["psi"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert_eq!(psi[1], "1");
    assert!(psi.iter().enumerate().all(|(i, c)| i == 1 || *c == "0"));
}

#[test]
fn raised_exponent_is_a_verdict_failure() {
    let (code, v) = json(&["similar", "--t", POWER3, "--s", POWER2]);
    assert_eq!(code, EXIT_VERDICT);
    assert_eq!(v["verdict"], "NOT_CERTIFIED");
}

#[test]
fn two_level_report_carries_flags() {
    let (code, v) = json(&[
        "similar", "--t", POWER1, "--t1", POWER3, "--s", POWER1, "--s1", POWER3, "--dim", "40",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["verdict"], "CERTIFIED");
    assert_eq!(v["flags"]["hypercontraction_ok"], true);
    assert_eq!(v["flags"]["condition2_ok"], true);
    assert_eq!(v["flags"]["remark_consistent"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["pd-check", "--spec", r#"{"kind":"coeffs","a":["1","-1"]}"#]).0, EXIT_VERDICT);
    assert_eq!(call(&["pd-check", "--spec", POWER2]).0, EXIT_OK);
    assert_eq!(call(&["curvature", "--spec", "{not json"]).0, EXIT_INPUT);
    assert_eq!(call(&["curvature", "--spec", r#"{"kind":"power","alpha":"1","x":1}"#]).0, EXIT_INPUT);
    assert_eq!(call(&["curvature", "--spec", POWER1, "--order", "3"]).0, EXIT_INPUT);
    assert_eq!(call(&["similar", "--t", POWER1, "--s", POWER1, "--grid", "0.5,1.0"]).0, EXIT_INPUT);
    assert_eq!(call(&["no-such-command"]).0, EXIT_INPUT);
    assert_eq!(call(&["curvature"]).0, EXIT_INPUT);
    assert_eq!(call(&["fb3", "--spec", HOMOGENEOUS_FRAME]).0, EXIT_INPUT);
    assert_eq!(call(&["homogeneous", "--h0", POWER1, "--h1", POWER2]).0, EXIT_VERDICT);
    assert_eq!(call(&["shift", "--spec", POWER1, "--hyper", "2", "--dim", "20"]).0, EXIT_VERDICT);
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("curvature"));
}

#[test]
fn input_errors_go_to_stderr() {
    let (code, out, err) = call(&["curvature", "--spec", "@/nonexistent/spec.json"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(out.is_empty());
    assert!(err.contains("nonexistent"));
}

#[test]
fn spec_from_file() {
    let dir = std::env::temp_dir().join(format!("cdcurv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("power.json");
    std::fs::write(&path, POWER1).unwrap();
    let arg = format!("@{}", path.display());
    let (code, out, _) = call(&["curvature", "--spec", &arg, "--order", "8"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains(r#""-8""#));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn frame_reports() {
    let (code, v) = json(&["fb2", "--spec", HOMOGENEOUS_FRAME, "--order", "12"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["equal"], true);
    assert_eq!(v["trace_curv"][0], "-4");
    assert_eq!(v["det"][0], "2");
    assert_eq!(v["additive"], true);
    assert_eq!(v["lambda"], "1");
    assert_eq!(v["theta_sq"][0], "1/2");

    let fb3 = r#"{"h0":{"kind":"power","alpha":"1"},"h1":{"kind":"power","alpha":"3"},"h2":{"kind":"power","alpha":"5"},"k":"4/3"}"#;
    let (code, v) = json(&["fb3", "--spec", fb3, "--order", "10"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["equal"], true);
    assert_eq!(v["trace_curv"][0], "-9");
}

#[test]
fn kernel_commands() {
    let (_, v) = json(&["logk", "--spec", POWER1, "--order", "4"]);
    assert_eq!(v["b"], serde_json::json!(["1", "1/2", "1/3", "1/4"]));

    let (code, v) = json(&["pd-bound", "--spec", r#"{"kind":"coeffs","a":["1","1","1"]}"#, "--n", "1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["bound"], "1/4");
    assert_eq!(v["consistent"], true);

    let (code, v) = json(&["theorem-p", "--p", "2", "--order", "16"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["holds"], true);
    assert_eq!(v["solve_matches"], true);
    assert_eq!(v["ell_closed_form"], true);

    let (code, v) = json(&["theorem-p", "--p", "1", "--spec", POWER1]);
    assert_eq!(code, EXIT_VERDICT);
    assert_eq!(v["holds"], false);
}

#[test]
fn operator_commands() {
    let (code, v) = json(&["shift", "--spec", POWER2, "--hyper", "2", "--dim", "30"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["defect"][0], "1");
    assert_eq!(v["nonneg"], true);

    let (code, v) = json(&["homogeneous", "--h0", POWER1, "--h1", POWER3, "--a", "1/2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["alpha"], 1);

    let (code, v) = json(&["rigidity", "--k0", "1", "--k1", "5"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["exponent"], "-1");
    assert!((v["fitted_slope"].as_f64().unwrap() + 1.0).abs() < 0.05);
}

#[test]
fn numeric_check() {
    let (code, v) = json(&["hs-check", "--spec", POWER1, "--w", "0.3"]);
    assert_eq!(code, EXIT_OK);
    assert!((v["hs_sq"].as_f64().unwrap() - 1.207583).abs() < 1e-5);
    let (code, v) = json(&["hs-check", "--spec", HOMOGENEOUS_FRAME, "--w", "0"]);
    assert_eq!(code, EXIT_OK);
    assert!((v["hs_sq"].as_f64().unwrap() - 4.0).abs() < 1e-5);
    assert_eq!(call(&["hs-check", "--spec", POWER1, "--w", "1.5"]).0, EXIT_INPUT);
}

#[test]
fn randomized_commands_follow_the_seed() {
    let a = call(&["det-identity", "--trials", "20", "--seed", "5"]);
    let b = call(&["det-identity", "--trials", "20", "--seed", "5"]);
    assert_eq!(a, b);
    assert_eq!(a.0, EXIT_OK);

    let t = |seed: &str| call(&["tensor", "--spec", POWER1, "--order", "6", "--seed", seed]);
    assert_eq!(t("1"), t("1"));
    assert_ne!(t("1").1, t("2").1);

    let (code, v) = json(&["series-check", "--trials", "5", "--order", "12"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["ok"], true);

    let (code, v) = json(&["tensor", "--spec", HOMOGENEOUS_FRAME, "--sections", r#"[["1","1"]]"#, "--order", "6"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["additive"], true);
}

#[test]
fn json_round_trips_byte_identically() {
    let cases: &[&[&str]] = &[
        &["curvature", "--spec", POWER1, "--order", "8"],
        &["lemma-2n", "--n", "7"],
        &["similar", "--t", EXP_PERTURBED, "--s", POWER2],
        &["similar", "--t", POWER3, "--s", POWER2],
        &["fb2", "--spec", HOMOGENEOUS_FRAME, "--order", "8"],
        &["rigidity", "--k0", "1", "--k1", "3", "--m-max", "1000"],
        &["hs-check", "--spec", POWER2, "--w", "0.6i"],
        &["homogeneous", "--h0", POWER1, "--h1", POWER3],
        &["det-identity", "--trials", "5"],
    ];
    for args in cases {
        let (_, out, _) = call(args);
        let line = out.trim_end_matches('\n');
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(serde_json::to_string(&v).unwrap(), line, "{args:?}");
    }
}

#[test]
fn table_format() {
    let (code, out, _) = call(&["lemma-2n", "--n", "4", "--format", "table"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().any(|l| l.starts_with("value") && l.ends_with("1/2")));
}

#[test]
fn binary_reads_order_from_environment() {
    let bin = env!("CARGO_BIN_EXE_cdcurv");
    let out = Command::new(bin)
        .args(["curvature", "--spec", POWER1])
        .env("CDCURV_ORDER", "5")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 5);

    let out = Command::new(bin)
        .args(["curvature", "--spec", POWER1, "--order", "6"])
        .env("CDCURV_ORDER", "5")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 6);

    let out = Command::new(bin).args(["lemma-2n", "--n", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(EXIT_INPUT));
}
