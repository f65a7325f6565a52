use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use thickspray::dispersion::RootReport;

fn thickspray(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thickspray"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str], cwd: &Path) {
    let out = thickspray(args, cwd);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn data_rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect()
}

fn error_report(out: &Output) -> Value {
    serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap()
}

#[test]
fn empty_config_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    for body in ["", "{}", "[1, 2]"] {
        fs::write(dir.path().join("c.json"), body).unwrap();
        let out = thickspray(&["--config", "c.json"], dir.path());
        assert_eq!(out.status.code(), Some(2), "{body:?}");
        let e = error_report(&out);
        assert_eq!(e["exit_code"], 2);
        assert_eq!(e["kind"], "ConfigError");
    }
    assert_eq!(thickspray(&[], dir.path()).status.code(), Some(2));
    assert_eq!(thickspray(&["--config", "missing.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn invalid_fields_and_params_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"command": "roots", "params": {"c0": 1, "rho0": 1, "kappa": 0.1}, "bogus": 1}"#,
        r#"{"command": "roots", "params": {"c0": -1, "rho0": 1, "kappa": 0.1}}"#,
        r#"{"command": "roots", "params": {"c0": 1, "rho0": 1, "kappa": 2.0}}"#,
        r#"{"command": "roots"}"#,
        r#"{"command": "stability-check"}"#,
        r#"{"command": "roots", "params": {"c0": 1, "rho0": 1, "kappa": 0.1, "alpha0": 0.5}}"#,
    ];
    for c in cases {
        fs::write(dir.path().join("c.json"), c).unwrap();
        let out = thickspray(&["--config", "c.json", "--out", "o"], dir.path());
        assert_eq!(out.status.code(), Some(2), "{c}");
    }
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = thickspray(&["simulate", "--scenario", "maxwellian-stable", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let e = error_report(&out);
    assert_eq!(e["kind"], "NoUnstableRoot");
    assert_eq!(e["exit_code"], 3);
}

#[test]
fn maxwellian_roots_are_damped() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["--scenario", "maxwellian-stable", "--out", "o", "--quiet"], dir.path());
    let text = fs::read_to_string(dir.path().join("o/roots.json")).unwrap();
    let roots: Vec<RootReport> = serde_json::from_str(&text).unwrap();
    assert_eq!(roots.len(), 2);
    assert!(roots.iter().all(|r| r.sigma.im < 0.0 && r.is_decay_rate()));
    // re-serializing the parsed result reproduces the file
    assert_eq!(serde_json::to_string_pretty(&roots).unwrap() + "\n", text);
    let m = read_json(&dir.path().join("o/manifest.json"));
    let warnings = m["warnings"].as_array().unwrap();
    assert!(warnings.iter().any(|w| w.as_str().unwrap().contains("alpha0")));
    assert_eq!(m["config_sha256"].as_str().unwrap().len(), 64);
    assert!(m["defaults"]["quadrature"]["nodes"].is_number());
}

#[test]
fn bump_roots_include_an_unstable_one() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["roots", "--scenario", "bump-unstable", "--out", "o", "--quiet"], dir.path());
    let roots: Vec<RootReport> = serde_json::from_str(&fs::read_to_string(dir.path().join("o/roots.json")).unwrap()).unwrap();
    assert!(roots.iter().any(|r| r.sigma.im > 0.0));
}

#[test]
fn config_file_overrides_scenario() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("c.json"),
        r#"{"seed_scenario": "maxwellian-stable", "params": {"kappa": 0.0}, "output_dir": "o"}"#,
    )
    .unwrap();
    run_ok(&["--config", "c.json", "--quiet", "--workers", "2"], dir.path());
    let m = read_json(&dir.path().join("o/manifest.json"));
    assert_eq!(m["config"]["params"]["kappa"], 0.0);
    assert_eq!(m["config"]["params"]["c0"], 1.0);
    let roots: Vec<RootReport> = serde_json::from_str(&fs::read_to_string(dir.path().join("o/roots.json")).unwrap()).unwrap();
    assert_eq!(roots.len(), 2);
    assert!(roots.iter().all(|r| r.sigma.im == 0.0));
}

#[test]
fn scan_heatmap_has_one_row_per_grid_point() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["dispersion-scan", "--scenario", "maxwellian-stable", "--out", "o", "--quiet"], dir.path());
    let rows = data_rows(&dir.path().join("o/plot/scan_heatmap.dat"));
    assert_eq!(rows.len(), 10_000);
    assert!(rows.iter().all(|r| r.len() == 5));
    let mut csv = csv::Reader::from_path(dir.path().join("o/scan.csv")).unwrap();
    assert_eq!(csv.headers().unwrap(), vec!["re_sigma", "im_sigma", "re_D", "im_D", "branch"]);
    let branches: Vec<String> = csv.records().map(|r| r.unwrap()[4].to_string()).collect();
    assert_eq!(branches.len(), 10_000);
    assert!(branches.iter().any(|b| b == "upper") && branches.iter().any(|b| b == "lower"));
}

#[test]
fn root_locus_has_one_file_per_branch() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["--scenario", "thin-spray-sweep", "--out", "o", "--quiet"], dir.path());
    for b in ["plus", "minus"] {
        let rows = data_rows(&dir.path().join(format!("o/plot/root_locus_{b}.dat")));
        assert_eq!(rows.len(), 16);
        // the locus stays within second-order distance of the prediction
        for r in &rows {
            let d = ((r[1] - r[3]).powi(2) + (r[2] - r[4]).powi(2)).sqrt();
            assert!(d < 0.05 * r[0], "{r:?}");
        }
    }
    let t: Value = read_json(&dir.path().join("o/thin_spray.json"));
    for branch in t.as_array().unwrap() {
        assert!(branch["root_check"]["distance"].as_f64().unwrap() < 1e-5);
    }
}

#[test]
fn illposed_demo_writes_table_and_growth_curves() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["illposed-demo", "--scenario", "bump-unstable", "--out", "o", "--quiet"], dir.path());
    let mut csv = csv::Reader::from_path(dir.path().join("o/illposed.csv")).unwrap();
    assert_eq!(csv.headers().unwrap(), vec!["k", "t_k", "init_hs_norm", "final_l2_norm", "fitted_rate"]);
    let rows: Vec<Vec<f64>> = csv
        .records()
        .map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for w in rows.windows(2) {
        assert!(w[1][2] < w[0][2]);
        assert!((w[1][4] / w[0][4] / 2.0 - 1.0).abs() < 0.05);
    }
    for k in ["8", "16", "32"] {
        let g = data_rows(&dir.path().join(format!("o/plot/growth_k{k}.dat")));
        assert!(g.len() > 10 && g.iter().all(|r| r.len() == 4));
    }
}

#[test]
fn simulate_and_landau_outputs() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["simulate", "--scenario", "bump-unstable", "--out", "o", "--quiet"], dir.path());
    let mut csv = csv::Reader::from_path(dir.path().join("o/simulate.csv")).unwrap();
    assert_eq!(csv.headers().unwrap(), vec!["t", "re_tau", "im_tau", "abs_tau", "abs_u", "kinetic_l2"]);
    assert!(csv.records().count() > 100);
    let s = &read_json(&dir.path().join("o/manifest.json"))["summary"];
    let (fit, want) = (s["fitted_rate"].as_f64().unwrap(), s["predicted_rate"].as_f64().unwrap());
    assert!((fit / want - 1.0).abs() < 0.02);

    run_ok(&["landau-compare", "--scenario", "maxwellian-stable", "--out", "l", "--quiet"], dir.path());
    let mut csv = csv::Reader::from_path(dir.path().join("l/landau_compare.csv")).unwrap();
    assert_eq!(csv.headers().unwrap().len(), 7);
    assert_eq!(csv.records().count(), 3 * 201);
}

#[test]
fn stability_check_outputs() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["--scenario", "system-prop1", "--out", "o", "--quiet"], dir.path());
    let v = read_json(&dir.path().join("o/stability.json"));
    let modes = v.as_array().unwrap();
    assert_eq!(modes.len(), 3);
    for m in modes {
        let rate = m["imag_rate"].as_f64().unwrap();
        let tracked = m["tracked_sigma"][1].as_f64().unwrap();
        assert!((tracked / 1e-4 - rate).abs() <= 0.1 * rate.abs());
    }
    run_ok(&["--scenario", "scalar-coupling", "--out", "s", "--quiet"], dir.path());
    let v = read_json(&dir.path().join("s/stability.json"));
    assert!(v[0]["tracked_sigma"][1].as_f64().unwrap() > 0.0);
}

fn strip_timestamp(mut m: Value) -> Value {
    m.as_object_mut().unwrap().remove("timestamp_unix");
    m
}

#[test]
fn scenarios_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for s in ["maxwellian-stable", "bump-unstable", "thin-spray-sweep", "scalar-coupling", "system-prop1"] {
        let (a, b) = (format!("{s}-a"), format!("{s}-b"));
        run_ok(&["--scenario", s, "--out", &a, "--quiet"], dir.path());
        run_ok(&["--scenario", s, "--out", &b, "--quiet", "--workers", "1"], dir.path());
        let ma = read_json(&dir.path().join(&a).join("manifest.json"));
        let mb = read_json(&dir.path().join(&b).join("manifest.json"));
        assert_eq!(strip_timestamp(ma.clone()), strip_timestamp(mb), "{s}");
        for f in ma["outputs"].as_array().unwrap() {
            let f = f.as_str().unwrap();
            let x = fs::read(dir.path().join(&a).join(f)).unwrap();
            let y = fs::read(dir.path().join(&b).join(f)).unwrap();
            assert_eq!(x, y, "{s}: {f}");
        }
    }
}
