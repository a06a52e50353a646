use std::process::{Command, Output};

use serde_json::Value;

fn mns(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mns")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json_lines(out: &Output) -> Vec<Value> {
    stdout(out).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn weak_harmonic_sum() {
    let out = mns(&["sum", "--mode", "weak", "--indices", "1", "--N", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "11/6");
}

#[test]
fn strict_double_sum() {
    let out = mns(&["sum", "--mode", "strict", "--indices", "1,1", "--N", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "1/2");
}

#[test]
fn empty_product_is_one() {
    let out = mns(&["sum", "--N", "4", "--m", "2"]);
    assert_eq!(stdout(&out).trim(), "1");
}

#[test]
fn sum_json_with_bruteforce() {
    let out = mns(&["sum", "--indices", "-1,2", "--N", "5", "--bruteforce", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = &json_lines(&out)[0];
    assert_eq!(v["value"], v["bruteforce"]);
    assert_eq!(v["k"], 2);
}

#[test]
fn factor_file_matches_indices() {
    let dir = std::env::temp_dir().join(format!("mns-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("h.txt");
    std::fs::write(&path, "1\n1/2\n1/3\n1/4\n").unwrap();
    let from_file = mns(&["sum", "--factor-file", path.to_str().unwrap(), "--indices", "1", "--N", "4"]);
    let from_indices = mns(&["sum", "--indices", "1,1", "--N", "4"]);
    assert_eq!(code(&from_file), 0);
    assert_eq!(stdout(&from_file), stdout(&from_indices));
}

#[test]
fn table_json_shape() {
    let out = mns(&["table", "--indices", "1", "--N", "3"]);
    let v = &json_lines(&out)[0];
    assert_eq!(v["n"], 3);
    assert_eq!(v["rows"][2][0], "11/6");
    assert_eq!(v["rows"][2][2], "1/3");
}

#[test]
fn nonpositive_n_is_usage_error() {
    let out = mns(&["sum", "--mode", "weak", "--indices", "1", "--N", "0"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    assert_eq!(code(&mns(&["sum", "--indices", "1", "--N", "-3"])), 2);
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(code(&mns(&["sum", "--indices", "0", "--N", "3"])), 2);
    assert_eq!(code(&mns(&["sum", "--indices", "1", "--N", "3", "--m", "4"])), 2);
    assert_eq!(code(&mns(&["frobnicate"])), 2);
    assert_eq!(code(&mns(&["inverse", "--a", "1,0"])), 2);
    assert_eq!(code(&mns(&["eigen", "--a", "1,x"])), 2);
    assert_eq!(code(&mns(&["converge", "--exponents", "1,2", "--N", "10"])), 2);
}

#[test]
fn bruteforce_guard_refuses() {
    let out = mns(&["sum", "--indices", "1,1,1,1", "--N", "200", "--bruteforce", "--guard", "1000"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn verify_sa_two_random() {
    let out = mns(&["verify", "sa-two", "--random", "100", "--seed", "7", "--max-n", "10"]);
    assert_eq!(code(&out), 0);
    let reports = json_lines(&out);
    assert_eq!(reports.len(), 100);
    assert!(reports.iter().all(|r| r["equal"] == true && r["lhs"] == r["rhs"]));
}

#[test]
fn verify_dilcher_report() {
    let out = mns(&["verify", "dilcher", "--N", "15", "--k", "4"]);
    assert_eq!(code(&out), 0);
    let r = &json_lines(&out)[0];
    assert_eq!(r["identity"], "dilcher");
    assert_eq!(r["params"]["N"], 15);
    assert_eq!(r["params"]["k"], 4);
    assert_eq!(r["equal"], true);
}

#[test]
fn verify_partial_fraction_all_pairs() {
    let out = mns(&["verify", "partial-fraction", "--n", "8", "--seed", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_lines(&out).len(), 36);
}

#[test]
fn verify_explicit_sequences() {
    let out = mns(&["verify", "two-factor", "--seq", "1,2/3,-5", "--seq", "3,4,1/7"]);
    assert_eq!(code(&out), 0);
    let r = &json_lines(&out)[0];
    assert_eq!(r["lhs"]["rows"][1], serde_json::json!(["-1", "1"]));
    let out = mns(&["verify", "sa-three", "--seq", "1,2,3", "--seq", "1,1,1", "--seq", "2,2,2", "--m", "1"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn verify_all_plain() {
    let out = mns(&["verify", "all", "--random", "2", "--seed", "11", "--format", "plain"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(!text.contains("FAIL"));
    for name in ["two-factor", "three-factor", "butler-karasik", "symmetric-expansion", "general-dilcher", "walk"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn verify_is_deterministic_per_seed() {
    let args = ["verify", "three-factor", "--random", "5", "--seed", "99"];
    assert_eq!(stdout(&mns(&args)), stdout(&mns(&args)));
    let other = mns(&["verify", "three-factor", "--random", "5", "--seed", "100"]);
    assert_ne!(stdout(&mns(&args)), stdout(&other));
}

#[test]
fn verify_duplicate_eigenvalues_fails_check() {
    let out = mns(&["verify", "eigen", "--seq", "1,2,1"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn walk_example() {
    let out = mns(&["walk", "--N", "2", "--a", "1", "--k", "1", "--samples", "1000000", "--seed", "42"]);
    assert_eq!(code(&out), 0);
    let v = &json_lines(&out)[0];
    assert_eq!(v["exact"], "3/4");
    assert_eq!(v["samples"], 1_000_000);
    assert_eq!(v["seed"], 42);
    let est = v["estimate"].as_f64().unwrap();
    let se = v["stderr"].as_f64().unwrap();
    assert!((est - 0.75).abs() <= 4.0 * se, "estimate {est} stderr {se}");
}

#[test]
fn walk_is_deterministic_per_seed() {
    let args = ["walk", "--N", "4", "--a", "2", "--k", "2", "--samples", "20000", "--seed", "5"];
    assert_eq!(stdout(&mns(&args)), stdout(&mns(&args)));
}

#[test]
fn converge_csv_approaches_limit() {
    let out = mns(&["converge", "--exponents", "2,1", "--N", "2000"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,value"));
    let last = text.lines().last().unwrap();
    let (n, value) = last.split_once(',').unwrap();
    assert_eq!(n, "2000");
    let value: f64 = value.parse().unwrap();
    assert!((value - 2.404_113_806).abs() < 0.01, "{value}");
}

#[test]
fn eigen_example() {
    let out = mns(&["eigen", "--a", "2,1"]);
    assert_eq!(code(&out), 0);
    let v = &json_lines(&out)[0];
    assert_eq!(v["D"]["rows"], serde_json::json!([["1"], ["1", "1"]]));
    assert_eq!(v["E"]["rows"], serde_json::json!([["1"], ["-1", "1"]]));
}

#[test]
fn eigen_power_matches_repeated_product() {
    let out = mns(&["eigen", "--a", "1/2,3,-2", "--power", "2"]);
    let v = &json_lines(&out)[0];
    // (S_a^2)_{2,1} = a_2 a_1 + a_2 a_2
    assert_eq!(v["power"]["matrix"]["rows"][1][0], "21/2");
}

#[test]
fn eigen_duplicates_exit_one() {
    let out = mns(&["eigen", "--a", "1,1"]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("duplicate"), "{err}");
}

#[test]
fn inverse_is_bidiagonal() {
    let out = mns(&["inverse", "--a", "2,3,5"]);
    let v = &json_lines(&out)[0];
    assert_eq!(v["rows"], serde_json::json!([["1/2"], ["-1/2", "1/3"], ["0", "-1/3", "1/5"]]));
}

#[test]
fn rationals_round_trip() {
    let out = mns(&["inverse", "--a", "-7/3,22/7"]);
    let v = &json_lines(&out)[0];
    let diag = format!("{},{}", v["rows"][0][0].as_str().unwrap(), v["rows"][1][1].as_str().unwrap());
    assert_eq!(diag, "-3/7,7/22");
    let again = mns(&["inverse", "--a", &diag]);
    let w = &json_lines(&again)[0];
    assert_eq!(w["rows"][0][0], "-7/3");
    assert_eq!(w["rows"][1][1], "22/7");
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("mns-out-{}.txt", std::process::id()));
    let out = mns(&["sum", "--indices", "2", "--N", "2", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap().trim(), "5/4");
    std::fs::remove_file(path).ok();
}
