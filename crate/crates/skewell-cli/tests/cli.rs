//! End-to-end CLI checks driven through the compiled binary.

use std::process::{Command, Output};

fn skewell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_skewell"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn pdf_standard_normal_column() {
    let out = skewell(&[
        "pdf",
        "--model",
        "skew-normal(delta=[0.0])",
        "--grid",
        "-3:3:61",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "y_1,pdf");
    let mut rows = 0;
    for line in lines {
        let mut cols = line.split(',');
        let y: f64 = cols.next().unwrap().parse().unwrap();
        let p: f64 = cols.next().unwrap().parse().unwrap();
        let phi = (-0.5 * y * y).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((p - phi).abs() < 1e-12, "y={y}: {p} vs {phi}");
        rows += 1;
    }
    assert_eq!(rows, 61);
}

#[test]
fn pdf_bivariate_shape_contract() {
    let out = skewell(&[
        "pdf",
        "--model",
        "skew-t(nu=4,rho=0.5,delta=[0.3,0.3])",
        "--grid",
        "-2:2:21,-2:2:21",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "y_1,y_2,pdf");
    assert_eq!(lines.len(), 1 + 441);
    for line in &lines[1..] {
        let v: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(v > 0.0);
    }
}

#[test]
fn pdf_reflection_mirrors_tables() {
    let plus = skewell(&[
        "pdf",
        "--model",
        "skew-normal(rho=0.3,delta=[0.5,0.2])",
        "--grid",
        "-2:2:9,-2:2:9",
    ]);
    let minus = skewell(&[
        "pdf",
        "--model",
        "skew-normal(rho=0.3,delta=[-0.5,-0.2])",
        "--grid",
        "2:-2:9,2:-2:9",
    ]);
    assert!(plus.status.success() && minus.status.success());
    let a = stdout(&plus);
    let b = stdout(&minus);
    for (la, lb) in a.lines().skip(1).zip(b.lines().skip(1)) {
        let va: f64 = la.rsplit(',').next().unwrap().parse().unwrap();
        let vb: f64 = lb.rsplit(',').next().unwrap().parse().unwrap();
        assert!((va - vb).abs() <= 1e-12 * va.abs(), "{la} vs {lb}");
    }
}

#[test]
fn taildep_symmetric_value_and_reflection_swap() {
    let out = skewell(&["taildep", "--model", "skew-t(nu=1,rho=0,delta=[0,0])"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let b = v["b_upper"].as_f64().unwrap();
    assert!((b - 0.29289).abs() < 1e-4, "b_upper {b}");

    let plus = skewell(&["taildep", "--model", "skew-t(nu=2,rho=0.3,delta=[0.5,0.5])"]);
    let minus = skewell(&[
        "taildep",
        "--model",
        "skew-t(nu=2,rho=0.3,delta=[-0.5,-0.5])",
    ]);
    let vp: serde_json::Value = serde_json::from_str(&stdout(&plus)).unwrap();
    let vm: serde_json::Value = serde_json::from_str(&stdout(&minus)).unwrap();
    assert_eq!(vp["b_upper"], vm["b_lower"]);
    assert_eq!(vp["b_lower"], vm["b_upper"]);
}

#[test]
fn taildep_missing_nu_is_config_error() {
    let out = skewell(&["taildep", "--model", "skew-t(rho=0,delta=[0,0])"]);
    assert!(!out.status.success());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_default_suite_exits_zero() {
    let out = skewell(&["validate"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    for line in text.lines() {
        let r: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(r["passed"], true, "{line}");
    }
}

#[test]
fn validate_sabotaged_tolerance_exits_one() {
    let dir = std::env::temp_dir().join("skewell_cli_test_sabotage");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("suite.json");
    std::fs::write(
        &cfg,
        r#"{"checks":[{"name":"sampler_mean","params":{"delta":0.5},"tolerance":1e-15,"n":20000}]}"#,
    )
    .unwrap();
    let out = skewell(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validate_list_prints_names() {
    let out = skewell(&["validate", "--list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "heavy_limit"));
    assert!(text.lines().any(|l| l == "empirical_taildep"));
}

#[test]
fn sample_is_byte_deterministic() {
    let args = [
        "sample",
        "--model",
        "skew-t(nu=4,rho=0.5,delta=[0.3,0.3])",
        "--n",
        "50",
        "--seed",
        "9",
    ];
    let a = skewell(&args);
    let b = skewell(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let mut other = args;
    other[6] = "10";
    let c = skewell(&other);
    assert_ne!(a.stdout, c.stdout);
    // shape: header + 50 rows
    assert_eq!(stdout(&a).lines().count(), 51);
}

#[test]
fn config_file_supplies_defaults_flags_override() {
    let dir = std::env::temp_dir().join("skewell_cli_test_cfg");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("pdf.json");
    std::fs::write(
        &cfg,
        r#"{"model":"skew-normal(delta=[0.0])","grid":"-1:1:3","format":"json"}"#,
    )
    .unwrap();
    let from_cfg = skewell(&["pdf", "--config", cfg.to_str().unwrap()]);
    assert!(from_cfg.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&from_cfg)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    // the flag wins over the config grid
    let overridden = skewell(&[
        "pdf",
        "--config",
        cfg.to_str().unwrap(),
        "--grid",
        "-1:1:5",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&overridden)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 5);
}

#[test]
fn copula_tail_csv_header_and_mixture() {
    let out = skewell(&[
        "copula-tail",
        "--model",
        "mixture(rho=0.4,eta=1.0)",
        "--grid",
        "0.2:1:3,0.2:1:3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "w_1,w_2,lambda");
    assert_eq!(text.lines().count(), 10);
    // lower tail of the mixture is not exposed
    let lower = skewell(&[
        "copula-tail",
        "--model",
        "mixture(rho=0.4,eta=1.0)",
        "--grid",
        "0.2:1:3,0.2:1:3",
        "--orientation",
        "lower",
    ]);
    assert_eq!(lower.status.code(), Some(2));
}

#[test]
fn tail_grid_export_with_k_override() {
    let out = skewell(&[
        "tail",
        "--model",
        "skew-t(nu=2,rho=0.5,delta=[0.3,0.3])",
        "--grid",
        "0.5:2:4,0.5:2:4",
        "--k",
        "1.0",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), "w_1,w_2,lambda");
    assert_eq!(text.lines().count(), 17);
}
