mod common;

use std::f64::consts::PI;
use std::fs;

use common::{json, load_schema, stdout, tmlab, validate};
use serde_json::Value;

fn assert_valid(schema: &str, v: &Value) {
    if let Err(e) = validate(&load_schema(schema), v, "$") {
        panic!("{schema}: {e}\n{v}");
    }
}

fn stderr_error(out: &std::process::Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stderr).expect("stderr is a JSON object");
    assert_valid("error.schema.json", &v);
    v
}

#[test]
fn bubble_table_shape() {
    let out = tmlab(&["bubble", "--r-max", "5", "--n", "100"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,phi0,w0");
    assert_eq!(lines.len(), 102);
    let last: Vec<f64> = lines[101].split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(last[0], 5.0);
    assert!((last[1] + 26f64.ln()).abs() < 1e-15);
    // 17 significant digits per cell
    for cell in lines[1].split(',') {
        assert_eq!(cell.split('e').next().unwrap().trim_start_matches('-').len(), 18);
    }
}

#[test]
fn family_csv_rows_and_columns() {
    let out = tmlab(&["family", "--alpha", "0", "--c-list", "3,4,5,6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "c,gamma,r_eps,grad_sq,l2_sq,norm1a_sq,inner,outer,phi_err,w_err,lemma1"
    );
    assert_eq!(lines.len(), 5);
    for l in &lines[1..] {
        let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(v.len(), 11);
        assert!(v.iter().all(|x| x.is_finite()));
    }
}

#[test]
fn energy_fit_on_synthetic_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fixture.csv");
    let mut csv = String::from("c,norm1a_sq\n");
    for c in [3.0f64, 4.0, 5.0, 6.0, 8.0] {
        csv.push_str(&format!("{c:.17e},{:.17e}\n", 4.0 * PI + 5.0 * PI / c.powi(4)));
    }
    fs::write(&path, csv).unwrap();
    let out = tmlab(&["energy-fit", "--in", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert_valid("energy-fit.schema.json", &v);
    assert!((v["A"].as_f64().unwrap() - 5.0 * PI).abs() < 1e-10);
    assert_eq!(v["band_check"], Value::Bool(true));
    assert_eq!(v["points"].as_array().unwrap().len(), 5);
}

#[test]
fn family_output_feeds_energy_fit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fam.csv");
    let p = path.to_str().unwrap();
    let out = tmlab(&["family", "--c-list", "4,5,6", "--out", p]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let out = tmlab(&["energy-fit", "--in", p]);
    assert!(out.status.success());
    assert_valid("energy-fit.schema.json", &json(&out));
}

#[test]
fn bvp_json_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    let out = tmlab(&["bvp", "--c", "2", "--alpha", "1", "--tol", "1e-10", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v = json(&out);
    assert_valid("bvp.schema.json", &v);
    assert_eq!(v["monotone"], Value::Bool(true));
    let csv = fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("r,u,du\n"));
    assert!(csv.lines().count() > 1000);
}

#[test]
fn extremal_and_green_outputs() {
    let out = tmlab(&["extremal", "--alpha", "0", "--eps", "6"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_valid("extremal.schema.json", &v);
    assert_eq!(v["mode"], "plain");
    assert!(v["fixed_point_residual"].is_null());

    let out = tmlab(&["extremal-ad", "--alpha", "0", "--eps", "6"]);
    assert!(out.status.success());
    let w = json(&out);
    assert_valid("extremal.schema.json", &w);
    assert_eq!(w["mode"], "adimurthi_druet");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let out = tmlab(&["green", "--alpha", "1", "--green-intervals", "1000", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let g = json(&out);
    assert_valid("green.schema.json", &g);
    assert_eq!(g["intervals"], 1000);
    let csv = fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("r,regular,green\n"));
    assert_eq!(csv.lines().count(), 1001);
}

#[test]
fn report_matches_schema() {
    let out = tmlab(&["report", "--c-list", "4,6", "--eps", "6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_valid("report.schema.json", &v);
    assert_eq!(v["family"].as_array().unwrap().len(), 2);
    assert_eq!(v["config"]["deterministic"], Value::Bool(true));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# green settings\ngreen_intervals = 600\nalpha0_tol = 1e-6\n").unwrap();
    let c = cfg.to_str().unwrap();
    let out = tmlab(&["--config", c, "green", "--alpha", "0"]);
    assert_eq!(json(&out)["intervals"], 600);
    let out = tmlab(&["green", "--config", c, "--alpha", "0", "--green-intervals", "700"]);
    assert_eq!(json(&out)["intervals"], 700);

    fs::write(&cfg, "green_intervals = lots\n").unwrap();
    let out = tmlab(&["--config", c, "green"]);
    assert_eq!(out.status.code(), Some(1));
    stderr_error(&out);
    fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(tmlab(&["--config", c, "green"]).status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(tmlab(&["--help"]).status.code(), Some(0));
    assert_eq!(tmlab(&["--version"]).status.code(), Some(0));

    for args in [
        vec!["frobnicate"],
        vec!["bvp"],
        vec!["bvp", "--c", "abc"],
        vec!["bvp", "--c", "-1"],
        vec!["bvp", "--c", "1", "--alpha", "6"],
        vec!["family", "--c-list", "5,4"],
        vec!["bubble", "--n", "0"],
        vec!["extremal", "--eps", "13"],
        vec!["bubble", "--bvp-tol", "0"],
        vec!["bubble", "--out", "/nonexistent-dir/x.csv"],
        vec!["energy-fit", "--in", "/nonexistent-file.csv"],
    ] {
        let out = tmlab(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let e = stderr_error(&out);
        assert_eq!(e["error"]["exit_code"], 1);
    }

    // solver-side failures
    for args in [vec!["bvp", "--c", "30"], vec!["family", "--c-list", "3,27"]] {
        let out = tmlab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let e = stderr_error(&out);
        assert_eq!(e["error"]["kind"], "range");
    }
    let out = tmlab(&["extremal-ad", "--alpha", "1", "--eps", "3", "--max-iter", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["error"]["kind"], "convergence");
}

#[test]
fn threads_flag_does_not_change_output() {
    let a = tmlab(&["family", "--c-list", "2,3,4", "--threads", "1"]);
    let b = tmlab(&["family", "--c-list", "2,3,4", "--threads", "3"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}
