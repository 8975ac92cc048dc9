//! End-to-end tests driving the compiled binary: exit codes, report
//! content, JSON determinism, and the region file format.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn macfeas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macfeas"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn assert_rel(actual: f64, expected: f64, rel: f64) {
    let err = (actual - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
    assert!(
        err <= rel,
        "expected {expected}, got {actual} (relative error {err:e})"
    );
}

#[test]
fn check_flags_the_original_three_user_scenario() {
    let out = macfeas(&[
        "check",
        fixture("three_user_original.toml").to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(exit_code(&out), 2);
    let report = stdout_json(&out);
    assert_eq!(report["verdict"]["feasible"], Value::Bool(false));
    assert_eq!(report["verdict"]["witness_users"], serde_json::json!([2]));
    let rates: Vec<f64> = report["required_rates_bps"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for (got, want) in rates.iter().zip([0.4394e5, 0.3377e5, 1.4647e5]) {
        assert_rel(*got, want, 1e-3);
    }
}

#[test]
fn check_accepts_the_reallocated_three_user_scenario() {
    let out = macfeas(&[
        "check",
        fixture("three_user_reallocated.toml").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FEASIBLE"), "output: {text}");
}

#[test]
fn check_methods_agree_and_are_reported() {
    let scenario = fixture("three_user_original.toml");
    for (method, expected_name) in [("brute", "brute-force"), ("sfm", "sfm")] {
        let out = macfeas(&[
            "check",
            scenario.to_str().unwrap(),
            "--method",
            method,
            "--json",
        ]);
        assert_eq!(exit_code(&out), 2, "method {method}");
        let report = stdout_json(&out);
        assert_eq!(
            report["verdict"]["method"],
            Value::String(expected_name.into())
        );
    }

    let out = macfeas(&[
        "check",
        fixture("equal_power.toml").to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(
        report["verdict"]["method"],
        Value::String("equal-power".into())
    );
    assert_eq!(report["oracle_calls"], serde_json::json!(3));
}

#[test]
fn check_equal_power_method_rejects_unequal_powers() {
    let out = macfeas(&[
        "check",
        fixture("three_user_original.toml").to_str().unwrap(),
        "--method",
        "equal-power",
    ]);
    assert_eq!(exit_code(&out), 1);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("not equal"), "stderr: {err}");
}

#[test]
fn check_single_user_with_ample_power_is_feasible() {
    let out = macfeas(&["check", fixture("single_user.toml").to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
}

#[test]
fn allocate_keep_sum_reproduces_the_two_user_reallocation() {
    let out = macfeas(&[
        "allocate",
        fixture("two_user_original.toml").to_str().unwrap(),
        "--mode",
        "keep-sum",
        "--json",
    ]);
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    let powers: Vec<f64> = report["allocation"]["powers_w"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_rel(powers[0], 0.0444, 5e-3);
    assert_rel(powers[1], 0.0156, 5e-3);
    assert_eq!(report["verification"]["feasible"], Value::Bool(true));
}

#[test]
fn allocate_optimal_reproduces_the_two_user_minimum() {
    let out = macfeas(&[
        "allocate",
        fixture("two_user_original.toml").to_str().unwrap(),
        "--mode",
        "optimal",
        "--json",
    ]);
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    assert_rel(report["threshold_w"].as_f64().unwrap(), 0.0503, 5e-3);
    let powers: Vec<f64> = report["allocation"]["powers_w"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_rel(powers[0], 0.0372, 5e-3);
    assert_rel(powers[1], 0.0131, 5e-3);
    assert_eq!(report["verification"]["feasible"], Value::Bool(true));
}

#[test]
fn allocate_keep_sum_below_threshold_exits_with_deficit() {
    let out = macfeas(&[
        "allocate",
        fixture("two_user_underpowered.toml").to_str().unwrap(),
        "--mode",
        "keep-sum",
        "--json",
    ]);
    assert_eq!(exit_code(&out), 2);
    let report = stdout_json(&out);
    assert!(report["allocation"].is_null());
    let deficit = report["deficit_w"].as_f64().unwrap();
    assert_rel(deficit, 0.0503 - 0.040, 2e-2);
    assert_rel(report["threshold_w"].as_f64().unwrap(), 0.0503, 5e-3);
}

#[test]
fn json_reports_are_deterministic_outside_meta() {
    for args in [
        vec![
            "check",
            fixture("three_user_original.toml").to_str().unwrap(),
            "--json",
        ],
        vec![
            "allocate",
            fixture("two_user_original.toml").to_str().unwrap(),
            "--mode",
            "optimal",
            "--json",
        ],
    ] {
        let mut first = stdout_json(&macfeas(&args));
        let mut second = stdout_json(&macfeas(&args));
        first.as_object_mut().unwrap().remove("meta");
        second.as_object_mut().unwrap().remove("meta");
        assert_eq!(
            serde_json::to_string(&first).unwrap(),
            serde_json::to_string(&second).unwrap(),
            "args: {args:?}"
        );
    }
}

#[test]
fn region_two_users_emits_the_pentagon_and_the_point() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("region.tsv");
    let out = macfeas(&[
        "region",
        fixture("two_user_original.toml").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
        "--resolution",
        "16",
    ]);
    assert_eq!(exit_code(&out), 0);
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.contains("outside"), "summary: {summary}");

    let content = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = content.lines();
    assert_eq!(lines.next().unwrap(), "kind\tlabel\tr1_bps\tr2_bps");
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    let vertices: Vec<&Vec<&str>> = rows.iter().filter(|r| r[0] == "vertex").collect();
    assert_eq!(vertices.len(), 5);
    assert_eq!(rows.iter().filter(|r| r[0] == "sample").count(), 16);
    let point: Vec<&Vec<&str>> = rows.iter().filter(|r| r[0] == "point").collect();
    assert_eq!(point.len(), 1);
    let r1: f64 = point[0][2].parse().unwrap();
    let r2: f64 = point[0][3].parse().unwrap();
    assert_rel(r1, 1.254e5, 1e-3);
    assert_rel(r2, 0.503e5, 1e-3);
    // The point must violate at least one emitted constraint: here the
    // per-user bound of user 1 (vertex v1's abscissa).
    let g1: f64 = vertices[1][2].parse().unwrap();
    assert!(r1 > g1);
}

#[test]
fn region_three_users_emits_vertices_and_facets() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("region3.tsv");
    let out = macfeas(&[
        "region",
        fixture("three_user_original.toml").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);

    let content = std::fs::read_to_string(&out_path).unwrap();
    let mut lines = content.lines();
    assert_eq!(
        lines.next().unwrap(),
        "kind\tlabel\tr1_bps\tr2_bps\tr3_bps\tbound_bps"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    let vertex_count = rows.iter().filter(|r| r[0] == "vertex").count();
    assert!((7..=16).contains(&vertex_count), "{vertex_count} vertices");
    let facets: Vec<&Vec<&str>> = rows.iter().filter(|r| r[0] == "facet").collect();
    assert_eq!(facets.len(), 7);
    // Full-set facet: all three coefficients one, bound = g(E).
    let full = facets.iter().find(|r| r[1] == "S={1,2,3}").unwrap();
    for coeff in &full[2..5] {
        assert_eq!(coeff.parse::<f64>().unwrap(), 1.0);
    }
    assert!(full[5].parse::<f64>().unwrap() > 0.0);
    assert_eq!(rows.iter().filter(|r| r[0] == "point").count(), 1);
}

#[test]
fn region_with_zero_powers_degenerates_to_the_origin() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("zero.toml");
    std::fs::write(
        &scenario,
        "[channel]\nbandwidth_hz = 2.0e5\nnoise_density_w_per_hz = 3.0e-7\n\
         [[users]]\narrival_rate = 1.0\ndelay_bound_s = 1.0\npower_w = 0.0\n\
         [[users]]\narrival_rate = 1.0\ndelay_bound_s = 1.0\npower_w = 0.0\n",
    )
    .unwrap();
    let out_path = dir.path().join("zero.tsv");
    let out = macfeas(&[
        "region",
        scenario.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let content = std::fs::read_to_string(&out_path).unwrap();
    let vertices: Vec<&str> = content
        .lines()
        .filter(|l| l.starts_with("vertex"))
        .collect();
    assert_eq!(vertices.len(), 1, "region should collapse to the origin");
    assert!(vertices[0].contains("0.000000000e0"));
}

#[test]
fn bench_single_user_checks_one_inequality() {
    let out = macfeas(&[
        "bench", "--n", "1", "--trials", "2", "--seed", "3", "--json",
    ]);
    assert_eq!(exit_code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["rows"][0]["traversal_subsets"], serde_json::json!(1));
}

#[test]
fn region_rejects_unsupported_user_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("region1.tsv");
    let out = macfeas(&[
        "region",
        fixture("single_user.toml").to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(!out_path.exists());
}

#[test]
fn bench_counts_are_deterministic_for_a_seed() {
    let args = [
        "bench", "--n", "3,5", "--trials", "2", "--seed", "7", "--json",
    ];
    let first = macfeas(&args);
    assert_eq!(exit_code(&first), 0);
    let second = macfeas(&args);
    let a = stdout_json(&first);
    let b = stdout_json(&second);
    for (ra, rb) in a["rows"]
        .as_array()
        .unwrap()
        .iter()
        .zip(b["rows"].as_array().unwrap())
    {
        assert_eq!(ra["sfm_oracle_calls"], rb["sfm_oracle_calls"]);
        assert_eq!(ra["traversal_subsets"], rb["traversal_subsets"]);
        assert_eq!(ra["feasible_trials"], rb["feasible_trials"]);
        assert_eq!(ra["verdicts_agree"], Value::Bool(true));
    }
}

#[test]
fn bench_rejects_oversized_requests() {
    let out = macfeas(&["bench", "--n", "40", "--trials", "2"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn parse_errors_carry_diagnostics_and_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.toml");
    std::fs::write(&path, "[channel]\nbandwidth_hz = \"fast\"\n").unwrap();
    let out = macfeas(&["check", path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 1);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2"), "stderr: {err}");

    let missing = macfeas(&["check", "/nonexistent/scenario.toml"]);
    assert_eq!(exit_code(&missing), 1);
}

#[test]
fn help_exits_zero() {
    let out = macfeas(&["--help"]);
    assert_eq!(exit_code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("check"));
}
