use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_doubled-spectral"))
        .args(args)
        .env_remove("DOUBLED_SPECTRAL_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn potential_both_matches_reduction() {
    let v = json(&["potential", "--g1", "2,2,1,1", "--g2", "1,1,1,1", "--method", "both"]);
    let expected = 2.0 * PI * PI;
    assert!((num(&v["value_closed"]) - expected).abs() < 1e-12);
    assert!((num(&v["value_numeric"]) - expected).abs() < 1e-10);
    assert!(num(&v["abs_difference"]) < 1e-10);
}

#[test]
fn potential_of_identical_metrics_is_zero() {
    let v = json(&["potential", "--g1", "0.7,1.3,0.9,1.8", "--g2", "0.7,1.3,0.9,1.8", "--level", "8"]);
    assert_eq!(num(&v["value_numeric"]), 0.0);
}

#[test]
fn potential_is_symmetric_across_runs() {
    let a = json(&["potential", "--g1", "0.7,1.3,0.9,1.8", "--g2", "1.1,0.6,1.5,1.2", "--level", "32"]);
    let b = json(&["potential", "--g1", "1.1,0.6,1.5,1.2", "--g2", "0.7,1.3,0.9,1.8", "--level", "32"]);
    let (a, b) = (num(&a["value_numeric"]), num(&b["value_numeric"]));
    assert!(a > 0.0);
    assert!((a - b).abs() <= 1e-10 * a);
}

#[test]
fn conjecture_method_agrees_with_closed() {
    let c = json(&["potential", "--g1", "1.4,1.4,0.7,0.7", "--g2", "0.9,0.9,1.2,1.2", "--method", "closed"]);
    let k = json(&["potential", "--g1", "1.4,1.4,0.7,0.7", "--g2", "0.9,0.9,1.2,1.2", "--method", "conjecture"]);
    let (c, k) = (num(&c["value_closed"]), num(&k["value_conjecture"]));
    assert!((c - k).abs() <= 1e-12 * c);
}

#[test]
fn closed_method_rejects_non_hopf_input() {
    let out = run(&["potential", "--g1", "1,2,1,1", "--g2", "1,1,1,1", "--method", "closed"]);
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "not_hopf_shaped");
}

#[test]
fn nonpositive_metric_is_a_usage_error() {
    let out = run(&["potential", "--g1", "1,0,1,1", "--g2", "1,1,1,1"]);
    assert!(!out.status.success());
}

#[test]
fn level_below_minimum_is_rejected() {
    let out = run(&["--level", "2", "potential", "--g1", "1,1,1,1", "--g2", "2,2,2,2"]);
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "level_too_low");
}

#[test]
fn action_records() {
    let base = ["action", "--g1", "1,1,1,1", "--g2", "1,1,1,1", "--lambda", "1", "--c", "1", "--level", "8"];
    let mut args = base.to_vec();
    args.extend(["--phi", "1", "--kappa", "1"]);
    let v = json(&args);
    assert!((num(&v["kinetic"]) - 4.0 * PI * PI).abs() < 1e-12);
    assert_eq!(num(&v["potential"]), 0.0);
    assert_eq!(num(&v["lambda_e_sq"]), 0.0);
    assert_eq!(num(&v["density"]), 0.0);

    let mut plus = base.to_vec();
    plus.extend(["--phi", "0.5", "--kappa", "1"]);
    let mut minus = base.to_vec();
    minus.extend(["--phi", "0.5", "--kappa", "-1"]);
    assert_eq!(num(&json(&plus)["alpha"]), -num(&json(&minus)["alpha"]));

    let mut zero_phi = base.to_vec();
    zero_phi.extend(["--phi", "0"]);
    let v = json(&zero_phi);
    assert_eq!(num(&v["alpha"]), 0.0);
    assert_eq!(num(&v["density"]), num(&v["lambda_e_sq"]) * num(&v["kinetic"]));
}

#[test]
fn action_rejects_zero_c_and_bad_kappa() {
    let base = ["action", "--g1", "1,1,1,1", "--g2", "1,1,1,1", "--lambda", "1", "--phi", "1", "--level", "8"];
    let mut zero_c = base.to_vec();
    zero_c.extend(["--c", "0"]);
    assert!(!run(&zero_c).status.success());
    let mut bad_kappa = base.to_vec();
    bad_kappa.extend(["--c", "1", "--kappa", "2"]);
    assert!(!run(&bad_kappa).status.success());
}

#[test]
fn series_zero_perturbation() {
    let v = json(&["series", "--omega", "2", "--eps", "0,0,0,0,0,0,0,0,0,0", "--order", "4", "--level", "8"]);
    let expected = PI * PI;
    for key in ["value_candidate", "value_exact", "value_quadrature"] {
        assert!((num(&v[key]) - expected).abs() < 1e-13, "{key}");
    }
}

#[test]
fn series_diagonal_perturbation_within_tail_bound() {
    let v = json(&["series", "--eps", "0.05,0,0,0,0.05,0,0,-0.05,0,-0.05", "--order", "4", "--level", "32"]);
    let gap = (num(&v["value_exact"]) - num(&v["value_quadrature"])).abs();
    assert!(gap <= num(&v["tail_bound"]), "{gap}");
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    assert!((num(&rows[2]["ratio"]) - 4.0).abs() < 1e-12);
}

#[test]
fn series_rejects_invalid_perturbations() {
    for eps in ["0.1,0,0,0,0,0,0,0,0,0", "1,0,0,0,1,0,0,-1,0,-1", "1,2,3"] {
        let out = run(&["series", "--eps", eps, "--level", "8"]);
        assert!(!out.status.success(), "{eps}");
    }
}

#[test]
fn moments_table() {
    let v = json(&["moments", "--m", "1"]);
    assert_eq!(v["c_m_over_pi_sq"], "1/2");
    assert_eq!(v["n_enumerated"], 0);
    let v = json(&["moments", "--m", "3"]);
    assert_eq!(v["n_enumerated"], 8);
    assert_eq!(v["n_inclusion_exclusion"], 8);
    assert!(!run(&["moments", "--m", "9"]).status.success());
}

#[test]
fn sweep_a_equal_reduction() {
    let out = run(&["sweep", "--g1", "1,1,1,1", "--g2", "1,1,1,1", "--axis", "b:0.5:2:7", "--level", "32"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("g1_0,g1_1,g1_2,g1_3,v_numeric,v_closed,v_prime\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 7);
    for r in rows {
        let b1: f64 = r[0].parse().unwrap();
        let numeric: f64 = r[4].parse().unwrap();
        let closed: f64 = r[5].parse().unwrap();
        let expected = 2.0 * PI * PI * (b1 - 1.0).powi(2);
        assert!((numeric - expected).abs() < 1e-8, "{b1}");
        assert!((closed - expected).abs() < 1e-8, "{b1}");
    }
}

#[test]
fn sweep_single_point_and_non_hopf() {
    let out = run(&["sweep", "--g1", "1,1,1,1", "--g2", "1,2,1,1", "--axis", "axis0:1.5:1.5:1", "--level", "8"]);
    assert!(out.status.success());
    let rows = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][5], "");
}

#[test]
fn sweep_is_continuous_across_singular_surface() {
    // g2 = (1,1,1,1), a₁ = 1.5: the singular surface sits at b₁ = 1.5.
    let out = run(&["sweep", "--g1", "1,1,1.5,1.5", "--g2", "1,1,1,1", "--axis", "b:1.49:1.51:21", "--level", "32"]);
    assert!(out.status.success());
    let rows = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    let closed: Vec<f64> = rows.iter().map(|r| r[5].parse().unwrap()).collect();
    for w in closed.windows(2) {
        assert!((w[1] - w[0]).abs() < 1e-2 * w[0], "{w:?}");
    }
    let mid: f64 = rows[10][4].parse().unwrap();
    assert!((closed[10] - mid).abs() < 1e-8 * mid);
}

#[test]
fn sweep_two_axes_and_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let path_s = path.to_str().unwrap();
    let args = [
        "sweep", "--g1", "1,1,1,1", "--g2", "1,1,1,1", "--axis", "b:0.5:1:2", "--axis", "a:1:2:3", "--level", "8",
        "--output", path_s,
    ];
    let out = run(&args);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv_rows(&text).len(), 6);
}

#[test]
fn sweep_rejects_bad_grids_and_paths() {
    let base = ["sweep", "--g1", "1,1,1,1", "--g2", "1,1,1,1", "--level", "8"];
    let mut three = base.to_vec();
    three.extend(["--axis", "axis0:1:2:2", "--axis", "axis1:1:2:2", "--axis", "axis2:1:2:2"]);
    assert!(!run(&three).status.success());
    let mut bad = base.to_vec();
    bad.extend(["--axis", "axis0:2:1:2"]);
    assert!(!run(&bad).status.success());
    let mut unwritable = base.to_vec();
    unwritable.extend(["--axis", "axis0:1:2:2", "--output", "/nonexistent-dir/x.csv"]);
    let out = run(&unwritable);
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "io");
}

#[test]
fn hypothesis_report_and_determinism() {
    let args = ["hypothesis", "--trials", "3", "--seed", "7", "--level", "32"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["trials"], 3);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["rng"], "ChaCha8Rng(seed_from_u64)");
}

#[test]
fn hypothesis_zero_tolerance_reports_noise() {
    let v = json(&["hypothesis", "--trials", "2", "--level", "16", "--tol", "0"]);
    assert!(!v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn hopf_family_checks_closed_form() {
    let v = json(&["hypothesis", "--trials", "3", "--family", "hopf", "--level", "64"]);
    assert!(num(&v["max_closed_form"]) < 1e-8);
    assert!(v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["potential", "--g1", "0.7,1.3,0.9,1.8", "--g2", "1.1,0.6,1.5,1.2", "--level", "24"];
    let one = run(&args);
    let mut four_args = args.to_vec();
    four_args.extend(["--threads", "4"]);
    let four = run(&four_args);
    assert_eq!(one.stdout, four.stdout);
    let env = Command::new(env!("CARGO_BIN_EXE_doubled-spectral"))
        .args(args)
        .env("DOUBLED_SPECTRAL_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(one.stdout, env.stdout);
}

#[test]
fn emit_config_goes_to_stderr() {
    let out = run(&["--emit-config", "--threads", "2", "moments", "--m", "2"]);
    assert!(out.status.success());
    let cfg: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(cfg["subcommand"], "moments");
    assert_eq!(cfg["threads"], 2);
    assert_eq!(cfg["format"], "json");
    assert!(serde_json::from_slice::<Value>(&out.stdout).is_ok());
}

#[test]
fn csv_format_for_single_records() {
    let out = run(&["--format", "csv", "moments", "--m", "4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("m,c_m_over_pi_sq,"));
    assert_eq!(text.lines().count(), 1 + 5);
}

#[test]
fn help_documents_scale_factor_convention() {
    let out = run(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("scale factors"));
}
