mod common;

use std::fs;
use std::process::Command;

use astrogibbs::heavytail::TailMixture;
use astrogibbs::orbit::OrbitSummary;
use astrogibbs_cli::{replay, CliError};
use common::*;
use serde_json::Value;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_astrogibbs"))
}

#[test]
fn filaments_detect_writes_segments_and_stats() {
    let tmp = tempfile::tempdir().unwrap();
    let cat = tmp.path().join("gal.csv");
    let cfg = tmp.path().join("bisous.json");
    write_catalog(&cat, true, 11);
    write_json(&cfg, &filament_settings(300));
    let out = tmp.path().join("out");
    let code = run_cli(&[
        "filaments",
        "detect",
        "--catalog",
        s(&cat),
        "--config",
        s(&cfg),
        "--seed",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code, 0);
    let det: Value =
        serde_json::from_str(&fs::read_to_string(out.join("detection.json")).unwrap()).unwrap();
    let n = det["stats"]["n_total"].as_u64().unwrap();
    assert_eq!(det["segments"].as_array().unwrap().len() as u64, n);
    let seg = fs::read_to_string(out.join("segments.csv")).unwrap();
    assert!(seg.starts_with("x,y,z,axis_x,axis_y,axis_z,half_length,radius,connected_ends\n"));
    assert_eq!(seg.lines().count() as u64, n + 1);

    let m = manifest(&out);
    assert_eq!(m.pipeline, "filaments");
    assert_eq!(m.seed, 1);
    assert_eq!(m.inputs.len(), 1);
    assert_eq!(
        m.inputs[0].sha256,
        astrogibbs_cli::sha256_file(&cat).unwrap()
    );
    assert!(m.inputs[0].path.is_absolute());
    let files: Vec<_> = m.outputs.iter().map(|o| o.file.as_str()).collect();
    assert_eq!(
        files,
        ["detection.json", "segments.csv", "trace.csv", "trace.json"]
    );
}

#[test]
fn same_seed_same_bytes_and_replay() {
    let tmp = tempfile::tempdir().unwrap();
    let cat = tmp.path().join("gal.csv");
    let cfg = tmp.path().join("bisous.json");
    write_catalog(&cat, true, 3);
    write_json(&cfg, &filament_settings(200));
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for out in [&a, &b] {
        let code = run_cli(&[
            "filaments",
            "detect",
            "--catalog",
            s(&cat),
            "--config",
            s(&cfg),
            "--seed",
            "4",
            "--out",
            s(out),
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(result_bytes(&a), result_bytes(&b));

    let c = tmp.path().join("c");
    let m = replay(&a.join("manifest.json"), Some(&c)).unwrap();
    assert_eq!(m.outputs, manifest(&a).outputs);
    assert_eq!(result_bytes(&a), result_bytes(&c));

    // a different seed changes the trace
    let d = tmp.path().join("d");
    run_cli(&[
        "filaments",
        "detect",
        "--catalog",
        s(&cat),
        "--config",
        s(&cfg),
        "--seed",
        "5",
        "--out",
        s(&d),
    ]);
    assert_ne!(manifest(&a).outputs, manifest(&d).outputs);

    // edited input is refused
    write_catalog(&cat, false, 3);
    let err = replay(&a.join("manifest.json"), Some(&c)).unwrap_err();
    assert!(matches!(err, CliError::InputChanged { .. }), "{err}");
}

#[test]
fn replay_detects_tampered_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let vals = tmp.path().join("v.csv");
    write_values(
        &vals,
        &astrogibbs::heavytail::simulate(&light_truth(), 2000, &mut astrogibbs::rng::from_seed(1)),
    );
    let out = tmp.path().join("out");
    assert_eq!(
        run_cli(&["tails", "fit", "--values", s(&vals), "--out", s(&out)]),
        0
    );
    let mut m = manifest(&out);
    m.outputs[0].sha256 = "0".repeat(64);
    fs::write(
        out.join("manifest.json"),
        serde_json::to_string(&m).unwrap(),
    )
    .unwrap();
    let err = replay(&out.join("manifest.json"), Some(&tmp.path().join("again"))).unwrap_err();
    match err {
        CliError::ReplayMismatch { files } => assert_eq!(files, ["mixture.json"]),
        other => panic!("{other}"),
    }
}

#[test]
fn orbit_fit_writes_summary_layout() {
    let tmp = tempfile::tempdir().unwrap();
    let obs = tmp.path().join("obs.csv");
    let prior = tmp.path().join("prior.json");
    write_observations(&obs, 2024);
    write_prior(&prior);
    let out = tmp.path().join("out");
    let code = run_cli(&[
        "orbit",
        "fit",
        "--obs",
        s(&obs),
        "--prior",
        s(&prior),
        "--steps",
        "5000",
        "--burn-in",
        "1000",
        "--seed",
        "7",
        "--out",
        s(&out),
    ]);
    assert_eq!(code, 0);
    let summary: OrbitSummary =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.columns, ["Min.", "Median", "Mean", "Max."]);
    let labels: Vec<_> = summary.rows.iter().map(|r| r.label.as_str()).collect();
    assert_eq!(labels[0], "Period, days");
    assert_eq!(labels[6], "Time of periapsis, RJD");
    assert_eq!(summary.n_samples, 4000);
    let chain = fs::read_to_string(out.join("chain_0.csv")).unwrap();
    assert!(chain.starts_with("step,move,accepted,temperature,log_target,period,"));
    assert_eq!(chain.lines().count(), 5001);
}

#[test]
fn tails_validate_with_fixed_model() {
    let tmp = tempfile::tempdir().unwrap();
    let vals = tmp.path().join("v.csv");
    let model = tmp.path().join("model.json");
    write_values(
        &vals,
        &astrogibbs::heavytail::simulate(&light_truth(), 3000, &mut astrogibbs::rng::from_seed(2)),
    );
    write_json(&model, &light_truth());
    let out = tmp.path().join("out");
    let code = run_cli(&[
        "tails",
        "validate",
        "--values",
        s(&vals),
        "--model",
        s(&model),
        "--n-rep",
        "30",
        "--out",
        s(&out),
    ]);
    assert_eq!(code, 0);
    let cov: Value =
        serde_json::from_str(&fs::read_to_string(out.join("coverage.json")).unwrap()).unwrap();
    assert_eq!(cov["model"], "fixed");
    assert_eq!(cov["n_rep"], 30);
    assert!(
        cov["fraction"].as_f64().unwrap() > 0.5,
        "{}",
        cov["fraction"]
    );
    assert_eq!(manifest(&out).inputs.len(), 2);
    // a fitted model is written out and can be read back
    let out2 = tmp.path().join("out2");
    assert_eq!(
        run_cli(&[
            "tails",
            "validate",
            "--values",
            s(&vals),
            "--n-rep",
            "20",
            "--out",
            s(&out2)
        ]),
        0
    );
    let m: TailMixture =
        serde_json::from_str(&fs::read_to_string(out2.join("mixture.json")).unwrap()).unwrap();
    m.validate().unwrap();
}

#[test]
fn tails_map_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("p.csv");
    fs::write(&p, {
        let mut t = String::from("i_deg,w_deg,value\n");
        let v = astrogibbs::heavytail::simulate(
            &light_truth(),
            400,
            &mut astrogibbs::rng::from_seed(3),
        );
        for (k, x) in v.iter().enumerate() {
            t.push_str(&format!("{},{},{x}\n", 10 * (k % 2), 0));
        }
        t.push_str("50,90,1.0\n");
        t
    })
    .unwrap();
    let out = tmp.path().join("out");
    assert_eq!(
        run_cli(&[
            "tails",
            "map",
            "--perturbations",
            s(&p),
            "--n-rep",
            "10",
            "--out",
            s(&out)
        ]),
        0
    );
    let csv = fs::read_to_string(out.join("map.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "i_deg,w_deg,coverage,regime");
    assert_eq!(lines.len(), 4);
    // the one-value cell cannot be fitted
    assert_eq!(lines[3], "50,90,,missing");
}

#[test]
fn failures_report_json_on_stderr() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");

    let missing = binary()
        .args([
            "filaments",
            "detect",
            "--catalog",
            "/nonexistent.csv",
            "--out",
            s(&out),
        ])
        .output()
        .unwrap();
    assert!(!missing.status.success());
    let err: Value = serde_json::from_slice(&missing.stderr).unwrap();
    assert!(err["error"]["message"]
        .as_str()
        .unwrap()
        .contains("nonexistent.csv"));

    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "x,y,z\n1,2,3\n1,NaN,3\n").unwrap();
    let parse = binary()
        .args([
            "filaments",
            "detect",
            "--catalog",
            s(&bad),
            "--out",
            s(&out),
        ])
        .output()
        .unwrap();
    assert_eq!(parse.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&parse.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "parse");
    assert!(
        err["error"]["message"].as_str().unwrap().contains(":3:"),
        "{err}"
    );

    let obs = tmp.path().join("obs.csv");
    fs::write(&obs, "epoch_rjd,dx_km,dy_km,sigma_km\n1,0,0,1\n1,0,0,1\n").unwrap();
    let dup = binary()
        .args(["orbit", "fit", "--obs", s(&obs), "--out", s(&out)])
        .output()
        .unwrap();
    assert_eq!(dup.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&dup.stderr).unwrap();
    assert!(
        err["error"]["message"]
            .as_str()
            .unwrap()
            .contains("increasing"),
        "{err}"
    );

    let usage = binary().args(["orbit", "fit"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&usage.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "usage");

    let ok = binary().arg("--help").output().unwrap();
    assert!(ok.status.success());
    assert!(String::from_utf8_lossy(&ok.stdout).contains("replay"));
}

#[test]
fn unknown_config_fields_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cat = tmp.path().join("gal.csv");
    let cfg = tmp.path().join("bisous.json");
    write_catalog(&cat, false, 1);
    fs::write(&cfg, r#"{"modle": {}}"#).unwrap();
    let code = run_cli(&[
        "filaments",
        "detect",
        "--catalog",
        s(&cat),
        "--config",
        s(&cfg),
        "--out",
        s(&tmp.path().join("o")),
    ]);
    assert_eq!(code, 1);
}
