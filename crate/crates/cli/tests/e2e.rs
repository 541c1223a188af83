use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn msl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(dir: &Path, id: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{id}.report.json"))).unwrap()).unwrap()
}

fn scenario_file(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn num(v: &Value) -> f64 {
    v.as_str().unwrap().parse().unwrap()
}

#[test]
fn passing_suite_exits_zero_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = msl(&["run", "--suite", "dehn_fill", "--t0", "5", "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r = report(dir.path(), "dehn_fill");
    assert_eq!(r["pass"], true);
    assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
    let a = r["assertions"].as_array().unwrap();
    let min = a.iter().find(|x| x["name"] == "scalar_minimum").unwrap();
    assert!((num(&min["measured"]) + 6.0).abs() <= 1e-6);
    let ratio = a.iter().find(|x| x["name"] == "volume_ratio").unwrap();
    assert!(num(&ratio["measured"]) < 0.928);
    assert!(a.iter().all(|x| !x["anchor"].as_str().unwrap().is_empty()));
}

#[test]
fn horizon_curvature_is_a_quarter() {
    let dir = tempfile::tempdir().unwrap();
    let o = msl(&[
        "run",
        "--suite",
        "schwarzschild_identities",
        "--mass",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let r = report(dir.path(), "schwarzschild_identities");
    let k = r["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|x| x["name"] == "horizon_gauss_curvature")
        .unwrap()
        .clone();
    assert!((num(&k["measured"]) - 0.25).abs() < 1e-12);
}

#[test]
fn collapse_inline_eps() {
    let dir = tempfile::tempdir().unwrap();
    let o = msl(&[
        "run",
        "--suite",
        "collapse",
        "--eps",
        "0.1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let r = report(dir.path(), "collapse");
    let v = r["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .find(|x| x["name"] == "volume_scaling")
        .unwrap()
        .clone();
    assert!((num(&v["measured"]) - 1e-2).abs() < 1e-12);
}

#[test]
fn deliberately_failing_tolerance_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = scenario_file(
        dir.path(),
        "tight.json",
        r#"{"schema_version": 1, "id": "tight", "check": "sphere_case_i",
            "params": {"radii": [100.0], "verdict_radii": [100.0], "tolerances": {"shape_gap_coeff": 1e-6}}}"#,
    );
    let o = msl(&["run", "--scenario", &f, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let r = report(dir.path(), "tight");
    assert_eq!(r["pass"], false);
    let failed: Vec<&Value> = r["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|a| a["pass"] == false)
        .collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["name"], "shape_gap");
    assert!(num(&failed[0]["margin"]) < 0.0);
}

#[test]
fn tolerance_scale_can_fail_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = msl(&[
        "run",
        "--suite",
        "cusp_identities",
        "--tolerance-scale",
        "1e-40",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let o = msl(&[
        "run",
        "--suite",
        "cusp_identities",
        "--tolerance-scale",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
}

#[test]
fn parse_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let bad_json = scenario_file(dir.path(), "a.json", "{ not json");
    let bad_suite = scenario_file(
        dir.path(),
        "b.json",
        r#"{"schema_version": 1, "id": "b", "check": "ricci_flow"}"#,
    );
    let bad_tol = scenario_file(
        dir.path(),
        "c.json",
        r#"{"schema_version": 1, "id": "c", "check": "cusp_identities", "params": {"tolerances": {"ricci": -1}}}"#,
    );
    let bad_field = scenario_file(
        dir.path(),
        "d.json",
        r#"{"schema_version": 1, "id": "d", "check": "collapse", "params": {"mass": 1}}"#,
    );
    for f in [&bad_json, &bad_suite, &bad_tol, &bad_field] {
        let o = msl(&["run", "--scenario", f, "--out", out]);
        assert_eq!(code(&o), 2, "{f}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(code(&msl(&["run", "--scenario", "/nonexistent/x.json"])), 2);
    assert_eq!(code(&msl(&["run"])), 2);
    assert_eq!(code(&msl(&["frobnicate"])), 2);
    // nothing was computed, so no report was written
    assert!(!dir.path().join("c.report.json").exists());
}

#[test]
fn computational_error_exits_three_with_embedded_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = msl(&[
        "run",
        "--suite",
        "dehn_fill",
        "--t0",
        "-2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    let r = report(dir.path(), "dehn_fill");
    assert_eq!(r["pass"], false);
    assert!(r["error"].as_str().unwrap().contains("cone angle"));
}

#[test]
fn batch_is_deterministic_and_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let f = scenario_file(
        dir.path(),
        "batch.json",
        r#"{"schema_version": 1, "scenarios": [
            {"schema_version": 1, "id": "z_collapse", "check": "collapse"},
            {"schema_version": 1, "id": "a_cusp", "check": "cusp_identities", "params": {"t0": 2.0}},
            {"schema_version": 1, "id": "m_conformal", "check": "conformal", "outputs": {"series": ["errors"]}}]}"#,
    );
    let mut texts = Vec::new();
    for (jobs, sub) in [("1", "one"), ("3", "three")] {
        let out = dir.path().join(sub);
        let o = msl(&["run", "--scenario", &f, "--jobs", jobs, "--out", out.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        let stdout = String::from_utf8(o.stdout).unwrap();
        let ids: Vec<&str> = stdout.lines().filter_map(|l| l.split_whitespace().nth(1)).collect();
        assert_eq!(ids, ["a_cusp", "m_conformal", "z_collapse"]);
        assert!(out.join("m_conformal.errors.csv").exists());
        let mut all = String::new();
        for id in ids {
            let text = std::fs::read_to_string(out.join(format!("{id}.report.json"))).unwrap();
            all.extend(
                text.lines()
                    .filter(|l| !l.contains("wall_time_s"))
                    .map(|l| format!("{l}\n")),
            );
        }
        texts.push(all);
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn list_suites_shows_catalog() {
    let o = msl(&["list-suites"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    for a in ["2.51", "3.8", "3.22"] {
        assert!(text.contains(a), "{a}");
    }
    assert!(text.contains("9 suites"));
    let o = msl(&["list-suites", "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 9);
}

fn read_csv(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn emit_plots_writes_selected_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = msl(&["emit-plots", "--suite", "dehn_fill", "--series", "s", "--out", out]);
    assert_eq!(code(&o), 0);
    let (header, rows) = read_csv(&dir.path().join("dehn_fill.s.csv"));
    assert_eq!(header, "r [length],s [length^-2]");
    assert!((rows[0][1] + 5.0).abs() < 1e-12);
    let last = rows.last().unwrap();
    assert!((last[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-15 && (last[1] + 6.0).abs() < 1e-12);
    assert!(!dir.path().join("dehn_fill.warpings.csv").exists());
    assert!(!dir.path().join("dehn_fill.report.json").exists());

    let o = msl(&[
        "emit-plots",
        "--suite",
        "sphere_case_i",
        "--series",
        "shape_gap",
        "--out",
        out,
    ]);
    assert_eq!(code(&o), 0);
    let (header, rows) = read_csv(&dir.path().join("sphere_case_i.shape_gap.csv"));
    assert!(header.starts_with("R [length]"));
    assert!(rows.len() >= 2 && rows.iter().all(|r| r[1] > 0.0));
}

#[test]
fn emit_plots_empty_and_unknown() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plots");
    let o = msl(&["emit-plots", "--suite", "dehn_fill", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(!out.exists());
    let o = msl(&[
        "emit-plots",
        "--suite",
        "dehn_fill",
        "--series",
        "s,nope",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("nope"));
}
