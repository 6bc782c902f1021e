use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mlfrac(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlfrac"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn error_json(out: &Output, code: i32) -> Value {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    assert_eq!(v["error"]["exit_code"], code);
    v
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn column(path: &Path, idx: usize) -> Vec<f64> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

const RUN: &str = r#"{"alpha":0.5,"sigma":1.0,"lambda":0.5,"Lambda":2.0,"a":-2.0,"b":0.0,"kappa":16,
"L":2.0,"N":33,"g":"zero","u0":"gaussian:1,0.5","far_field":"zero"}"#;

#[test]
fn ml_eval_at_origin_prints_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&mlfrac(
        &["ml-eval", "--alpha", "1", "--beta", "1", "--z", "0"],
        dir.path(),
    ));
    assert_eq!(out.trim(), "1.0");
}

#[test]
fn ml_eval_grid_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    ok(&mlfrac(
        &[
            "ml-eval", "--alpha", "0.5", "--beta", "1", "--grid", "-2:0:5", "--csv", "ml.csv",
        ],
        dir.path(),
    ));
    let text = std::fs::read_to_string(dir.path().join("ml.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("z,value,method,est_error"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    // E_{1/2,1}(−1) = e·erfc(1)
    let v: f64 = rows[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - 0.427583576155807).abs() < 1e-13);
    assert!(rows.iter().all(|r| r.split(',').count() == 4));
}

#[test]
fn kernel_verify_caputo_ratio_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    ok(&mlfrac(
        &[
            "kernel-verify",
            "--kind",
            "caputo",
            "--alpha",
            "0.5",
            "--horizon",
            "4",
            "--samples",
            "64",
            "--json",
            "k.json",
        ],
        dir.path(),
    ));
    let r = read_json(&dir.path().join("k.json"));
    let lo = r["lambda_emp"].as_f64().unwrap();
    let hi = r["Lambda_emp"].as_f64().unwrap();
    assert!((hi - lo).abs() <= 1e-12 * hi);
    assert_eq!(r["symmetry_ok"], true);
    assert_eq!(r["grid"].as_array().unwrap().len(), 64);
}

#[test]
fn kernel_verify_ml_reports_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&mlfrac(
        &[
            "kernel-verify",
            "--kind",
            "ml",
            "--alpha",
            "0.5",
            "--horizon",
            "4",
            "--samples",
            "16",
        ],
        dir.path(),
    ));
    let r: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(r["holds"], true);
    assert!(r["lambda_emp"].as_f64().unwrap() > 0.0);
    assert!(r["Lambda_emp"].as_f64().unwrap() >= r["lambda_emp"].as_f64().unwrap());
}

#[test]
fn unknown_flag_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let v = error_json(
        &mlfrac(&["ml-eval", "--alpha", "1", "--beta", "1", "--bogus", "2"], dir.path()),
        1,
    );
    assert_eq!(v["error"]["kind"], "validation");
}

#[test]
fn bad_parameter_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    error_json(
        &mlfrac(&["ml-eval", "--alpha", "-1", "--beta", "1", "--z", "0"], dir.path()),
        1,
    );
    error_json(
        &mlfrac(
            &["kernel-verify", "--kind", "ml", "--alpha", "1.5", "--samples", "8"],
            dir.path(),
        ),
        1,
    );
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(&mlfrac(&["--help"], dir.path()));
    assert!(out.contains("pde-solve"));
}

#[test]
fn fode_solution_feeds_ab_apply() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("h.csv"), "t,h\n0,0\n1,1\n").unwrap();
    ok(&mlfrac(
        &[
            "fode-solve",
            "--alpha",
            "0.5",
            "--c0",
            "1",
            "--c1",
            "0",
            "--h",
            "csv:h.csv",
            "--u0",
            "0",
            "--start",
            "0",
            "--end",
            "1",
            "--kappa",
            "32",
            "--out",
            "u.csv",
            "--residual-report",
            "r.json",
        ],
        d,
    ));
    let r = read_json(&d.join("r.json"));
    assert_eq!(r["solver"], "c1_zero");
    assert!(r["max_residual"].as_f64().unwrap() < 1e-3);

    // h(0) = 0 keeps u continuous at the start, so the operator applied to u gives back h(t) = t
    ok(&mlfrac(
        &[
            "ab-apply", "--form", "history", "--alpha", "0.5", "--a", "0", "--b", "1", "--kappa", "32", "--input",
            "u.csv", "--output", "l.csv",
        ],
        d,
    ));
    let l = column(&d.join("l.csv"), 1);
    assert_eq!(l.len(), 33);
    for (k, v) in l.iter().enumerate() {
        let t = k as f64 / 32.0;
        assert!((v - t).abs() < 1e-4, "t={t} got {v}");
    }
}

#[test]
fn ab_apply_rejects_mismatched_grid() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("s.csv"), "t,u\n0,1\n0.5,1\n1,1\n").unwrap();
    ok(&mlfrac(
        &[
            "ab-apply", "--form", "discrete", "--alpha", "0.5", "--a", "0", "--b", "1", "--kappa", "2", "--input",
            "s.csv", "--output", "o.csv",
        ],
        d,
    ));
    assert!(column(&d.join("o.csv"), 1).iter().all(|v| *v == 0.0));
    error_json(
        &mlfrac(
            &[
                "ab-apply", "--form", "discrete", "--alpha", "0.5", "--a", "0", "--b", "1", "--kappa", "4", "--input",
                "s.csv", "--output", "o.csv",
            ],
            d,
        ),
        1,
    );
}

#[test]
fn fode_general_reports_arbitration() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("h.csv"), "t,h\n0,0\n0.3,1\n0.6,0\n1,0\n").unwrap();
    ok(&mlfrac(
        &[
            "fode-solve",
            "--alpha",
            "0.6",
            "--c0",
            "1",
            "--c1",
            "1",
            "--h",
            "csv:h.csv",
            "--u0",
            "0.5",
            "--start",
            "0",
            "--end",
            "1",
            "--kappa",
            "64",
            "--out",
            "u.csv",
            "--residual-report",
            "r.json",
        ],
        d,
    ));
    let r = read_json(&d.join("r.json"));
    assert_eq!(r["solver"], "general");
    assert_eq!(r["candidates"].as_array().unwrap().len(), 2);
    assert_eq!(r["residual"].as_array().unwrap().len(), 65);
}

#[test]
fn space_apply_constant_field_is_annihilated() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut text = String::from("x,u\n");
    for j in 0..17 {
        text.push_str(&format!("{},2.5\n", -2.0 + 0.25 * j as f64));
    }
    std::fs::write(d.join("f.csv"), text).unwrap();
    for op in ["lap", "mplus", "mminus"] {
        ok(&mlfrac(
            &[
                "space-apply",
                "--op",
                op,
                "--sigma",
                "1.2",
                "--lambda",
                "0.5",
                "--Lambda",
                "2",
                "--field",
                "f.csv",
                "--far-field",
                "constant:2.5",
                "--out",
                "o.csv",
            ],
            d,
        ));
        assert!(column(&d.join("o.csv"), 1).iter().all(|v| v.abs() < 1e-9), "{op}");
    }
}

#[test]
fn space_apply_pucci_ordering() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut text = String::from("x,u\n");
    for j in 0..33 {
        let x = -4.0 + 0.25 * j as f64;
        text.push_str(&format!("{x},{}\n", (-x * x).exp()));
    }
    std::fs::write(d.join("f.csv"), text).unwrap();
    let mut res = Vec::new();
    for op in ["mminus", "mplus"] {
        ok(&mlfrac(
            &[
                "space-apply",
                "--op",
                op,
                "--sigma",
                "1",
                "--lambda",
                "0.5",
                "--Lambda",
                "2",
                "--field",
                "f.csv",
                "--out",
                "o.csv",
            ],
            d,
        ));
        res.push(column(&d.join("o.csv"), 1));
    }
    assert!(res[0].iter().zip(&res[1]).all(|(m, p)| m <= p));
}

#[test]
fn pde_solve_then_diagnose() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("run.json"), RUN).unwrap();
    ok(&mlfrac(
        &[
            "pde-solve",
            "--config",
            "run.json",
            "--out",
            "field.csv",
            "--diag",
            "diag.json",
        ],
        d,
    ));
    let diag = read_json(&d.join("diag.json"));
    assert_eq!(diag["summary"]["steps"], 16);
    assert_eq!(diag["steps"].as_array().unwrap().len(), 16);
    assert!(diag["summary"]["min_value"].as_f64().unwrap() >= 0.0);

    std::fs::write(d.join("h.json"), r#"{"alpha":0.5,"sigma":1.0,"kappa":0.5}"#).unwrap();
    ok(&mlfrac(
        &[
            "diagnose",
            "--field",
            "field.csv",
            "--mode",
            "holder",
            "--params",
            "h.json",
            "--out",
            "h_rep.json",
        ],
        d,
    ));
    let h = read_json(&d.join("h_rep.json"));
    assert_eq!(h["mode"], "holder");
    assert!(h["seminorm"].as_f64().unwrap() > 0.0);

    std::fs::write(d.join("o.json"), r#"{"alpha":0.5,"sigma":1.0,"depth":2,"ratio":0.5}"#).unwrap();
    ok(&mlfrac(
        &[
            "diagnose",
            "--field",
            "field.csv",
            "--mode",
            "osc",
            "--params",
            "o.json",
            "--out",
            "o_rep.json",
        ],
        d,
    ));
    let o = read_json(&d.join("o_rep.json"));
    assert_eq!(o["oscillations"].as_array().unwrap().len(), 3);
}

#[test]
fn coarse_cylinders_are_a_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("run.json"), RUN).unwrap();
    ok(&mlfrac(&["pde-solve", "--config", "run.json", "--out", "field.csv"], d));
    std::fs::write(d.join("o.json"), r#"{"alpha":0.5,"sigma":1.0,"depth":6}"#).unwrap();
    let v = error_json(
        &mlfrac(
            &[
                "diagnose",
                "--field",
                "field.csv",
                "--mode",
                "osc",
                "--params",
                "o.json",
                "--out",
                "o_rep.json",
            ],
            d,
        ),
        2,
    );
    assert_eq!(v["error"]["kind"], "numerical");
    assert!(!d.join("o_rep.json").exists());
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let bad = RUN.replacen('{', r#"{"extra":1,"#, 1);
    std::fs::write(d.join("run.json"), bad).unwrap();
    let v = error_json(
        &mlfrac(&["pde-solve", "--config", "run.json", "--out", "field.csv"], d),
        1,
    );
    assert_eq!(v["error"]["source"], "schema");
    assert!(!d.join("field.csv").exists());

    std::fs::write(d.join("p.json"), r#"{"alpha":0.5,"sigma":1.0,"mu":0.5,"seed":1}"#).unwrap();
    error_json(
        &mlfrac(
            &[
                "diagnose",
                "--mode",
                "point-estimate",
                "--params",
                "p.json",
                "--out",
                "r.json",
            ],
            d,
        ),
        1,
    );
}

#[test]
fn initial_and_forcing_specs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut text = String::from("x,u\n");
    for j in 0..9 {
        text.push_str(&format!("{},3\n", -1.0 + 0.25 * j as f64));
    }
    std::fs::write(d.join("u0.csv"), text).unwrap();
    let run = r#"{"alpha":0.7,"sigma":1.5,"lambda":0.1,"Lambda":10,"a":0,"b":1,"kappa":8,"L":1,"N":9,
        "g":"zero","u0":"csv:u0.csv","far_field":"constant:3","max_history":4}"#;
    std::fs::write(d.join("run.json"), run).unwrap();
    ok(&mlfrac(&["pde-solve", "--config", "run.json", "--out", "field.csv"], d));
    let last: Vec<f64> = std::fs::read_to_string(d.join("field.csv"))
        .unwrap()
        .lines()
        .last()
        .unwrap()
        .split(',')
        .skip(1)
        .map(|c| c.parse().unwrap())
        .collect();
    assert!(last.iter().all(|v| (v - 3.0).abs() < 1e-10));

    for (g, u0) in [
        ("const:1", "2"),
        ("gaussian:1,0.3", "\"indicator:-0.5,0.5\""),
        ("csv:field.csv", "\"const:0\""),
    ] {
        let run = format!(
            r#"{{"alpha":0.7,"sigma":1.5,"lambda":0.1,"Lambda":10,"a":0,"b":1,"kappa":8,"L":1,"N":9,
            "g":"{g}","u0":{u0},"far_field":"zero"}}"#
        );
        std::fs::write(d.join("run2.json"), run).unwrap();
        ok(&mlfrac(&["pde-solve", "--config", "run2.json", "--out", "f2.csv"], d));
    }
    std::fs::write(d.join("run3.json"), RUN.replace("gaussian:1,0.5", "sombrero:1")).unwrap();
    error_json(
        &mlfrac(&["pde-solve", "--config", "run3.json", "--out", "f3.csv"], d),
        1,
    );
}

#[test]
fn outputs_are_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("run.json"), RUN).unwrap();
    ok(&mlfrac(
        &[
            "--threads",
            "1",
            "pde-solve",
            "--config",
            "run.json",
            "--out",
            "a.csv",
            "--diag",
            "a.json",
        ],
        d,
    ));
    ok(&mlfrac(
        &[
            "--threads",
            "4",
            "pde-solve",
            "--config",
            "run.json",
            "--out",
            "b.csv",
            "--diag",
            "b.json",
        ],
        d,
    ));
    assert_eq!(
        std::fs::read(d.join("a.csv")).unwrap(),
        std::fs::read(d.join("b.csv")).unwrap()
    );
    assert_eq!(
        std::fs::read(d.join("a.json")).unwrap(),
        std::fs::read(d.join("b.json")).unwrap()
    );

    let k = ["kernel-verify", "--kind", "ml", "--alpha", "0.3", "--samples", "8"];
    assert_eq!(ok(&mlfrac(&k, d)), ok(&mlfrac(&k, d)));
}

#[test]
fn acceptance_subset_runs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = ok(&mlfrac(&["acceptance", "--only", "1,4", "--json", "acc.json"], d));
    assert!(out.contains("2/2 passed"));
    let r = read_json(&d.join("acc.json"));
    assert_eq!(r["criteria"].as_array().unwrap().len(), 2);
    assert!(r["criteria"][0].get("seconds").is_none());
    error_json(&mlfrac(&["acceptance", "--only", "13"], d), 1);
}
