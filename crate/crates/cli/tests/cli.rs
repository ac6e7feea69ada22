use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn holodet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_holodet")).args(args).env_remove("HOLODET_BUDGET").output().expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn json_stderr(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn write_temp(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn cycles_on_symbolic_two_cycle() {
    let out = holodet(&[
        "det",
        "--example",
        "two_cycle",
        "--symbolic",
        "--mode",
        "symbolic",
        "--method",
        "cycles",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert_eq!(v["value"], "x1*x2 - x1*x2*u*v");
    assert_eq!(v["method"], "cycles");
    assert_eq!(v["mode"], "symbolic");
    assert!(v["time_ms"].is_number());
}

#[test]
fn compare_figure5_agrees() {
    let out = holodet(&["compare", "--example", "figure5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["agree"], true);
    assert_eq!(v["max_discrepancy"], 0.0);
    let ran: Vec<&str> = v["methods"].as_array().unwrap().iter().map(|m| m["method"].as_str().unwrap()).collect();
    for m in ["oracle", "cycles", "vector-fields", "euler-finite"] {
        assert!(ran.contains(&m), "{m} missing from {ran:?}");
    }
}

#[test]
fn compare_float_random_instance() {
    let inst = holodet(&["random", "--seed", "11", "--p", "3", "--max-edges", "5", "--max-rank", "2"]);
    assert!(inst.status.success());
    let f = write_temp(std::str::from_utf8(&inst.stdout).unwrap());
    let path = f.path().to_str().unwrap();
    for mode in ["float", "exact"] {
        let out = holodet(&["compare", "-i", path, "--mode", mode, "--format", "json"]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json_stdout(&out)["agree"], true);
    }
}

#[test]
fn primes_on_acyclic_is_empty() {
    let out = holodet(&["primes", "--example", "acyclic", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_stdout(&out);
    assert_eq!(v["primes"], Value::Array(vec![]));
    assert_eq!(v["finite"], true);
}

#[test]
fn primes_on_figure5_lists_two_cycles() {
    let out = holodet(&["primes", "--example", "figure5", "--format", "json"]);
    let v = json_stdout(&out);
    assert_eq!(v["count"], 2);
    let lengths: Vec<u64> = v["primes"].as_array().unwrap().iter().map(|c| c["length"].as_u64().unwrap()).collect();
    assert_eq!(lengths, vec![4, 4]);
}

#[test]
fn charpoly_symbolic_two_cycle() {
    let out = holodet(&["charpoly", "--example", "two_cycle", "--symbolic", "--mode", "symbolic", "--format", "json"]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert_eq!(v["polynomial"], "x1*x2 - x1*x2*u*v + x2*t1 + x1*t2 + t1*t2");
    assert_eq!(v["oracle_agrees"], true);
}

#[test]
fn exact_values_are_canonical_strings() {
    let f = write_temp(
        r#"{"p": 2, "ranks": [1, 1],
            "edges": [{"id": "a", "src": 1, "tgt": 2, "weight": "1/2", "matrix": [["1/2+1/3i"]]},
                      {"id": "b", "src": 2, "tgt": 1, "weight": "3/2", "matrix": [[1]]}]}"#,
    );
    let out = holodet(&["det", "-i", f.path().to_str().unwrap(), "--method", "cycles", "--format", "json"]);
    assert!(out.status.success());
    // z1 z2 - x_a x_b U_a U_b = 3/4 - 3/4 (1/2 + i/3)
    assert_eq!(json_stdout(&out)["value"], "3/8-1/4i");
}

#[test]
fn float_values_are_re_im() {
    let out = holodet(&["det", "--example", "unicyclic", "--mode", "float", "--method", "oracle", "--format", "json"]);
    let v = json_stdout(&out);
    assert!(v["value"]["re"].is_number() && v["value"]["im"].is_number());
}

#[test]
fn euler_truncated_with_kappa() {
    let f = write_temp(
        r#"{"p": 2, "ranks": [1, 1],
            "edges": [{"id": "a", "src": 1, "tgt": 2, "weight": 1, "matrix": [[1]]},
                      {"id": "b", "src": 2, "tgt": 1, "weight": 1, "matrix": [[1]]},
                      {"id": "c", "src": 1, "tgt": 2, "weight": 1, "matrix": [[1]]}]}"#,
    );
    let path = f.path().to_str().unwrap();
    let out = holodet(&[
        "det",
        "-i",
        path,
        "--mode",
        "float",
        "--method",
        "euler-truncated",
        "--kappa",
        "2,2",
        "--format",
        "json",
    ]);
    let v = json_stdout(&out);
    // det [[4,-2],[-1,3]] = 10
    let re = v["value"]["re"].as_f64().unwrap();
    let bound = v["error_bound"].as_f64().unwrap();
    assert!((re - 10.0).abs() <= bound.max(1e-9), "{re} vs 10 within {bound}");
}

#[test]
fn euler_truncated_needs_float() {
    let out = holodet(&["det", "--example", "two_cycle", "--method", "euler-truncated"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json_stderr(&out)["error"]["kind"], "refused");
}

#[test]
fn kappa_rejected_for_other_methods() {
    let out = holodet(&["det", "--example", "two_cycle", "--method", "oracle", "--kappa", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validation_failure_exits_2() {
    let f = write_temp(
        r#"{"p": 2, "ranks": [1, 1],
            "edges": [{"id": "a", "src": 1, "tgt": 3, "weight": 1, "matrix": [[1]]}]}"#,
    );
    let out = holodet(&["det", "-i", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = json_stderr(&out);
    assert_eq!(err["error"]["kind"], "invalid-input");
    assert!(err["error"]["message"].as_str().unwrap().contains("a"));
}

#[test]
fn unparsable_input_exits_2() {
    let f = write_temp("{not json");
    let out = holodet(&["det", "-i", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn size_refusal_exits_3() {
    let out = holodet(&["det", "--example", "figure5", "--method", "trace-formal"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn budget_env_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_holodet"))
        .args(["det", "--example", "figure5", "--method", "vector-fields"])
        .env("HOLODET_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(json_stderr(&out)["error"]["message"].as_str().unwrap().contains("budget"));
}

#[test]
fn parallel_matches_sequential() {
    let base = ["det", "--example", "figure5", "--method", "vector-fields", "--format", "json", "--no-timing"];
    let seq = holodet(&base);
    let mut par_args = base.to_vec();
    par_args.push("--parallel");
    let par = holodet(&par_args);
    assert_eq!(seq.stdout, par.stdout);
}

#[test]
fn reports_are_byte_stable() {
    let args = ["compare", "--example", "unicyclic", "--rank", "2", "--format", "json", "--no-timing"];
    assert_eq!(holodet(&args).stdout, holodet(&args).stdout);
    let r = ["random", "--seed", "5"];
    assert_eq!(holodet(&r).stdout, holodet(&r).stdout);
}

#[test]
fn moments_exact_sides_agree() {
    let out = holodet(&["moments", "--example", "two_cycle", "--k", "2", "--format", "json"]);
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert_eq!(v["lhs"], v["rhs"]);
    assert_eq!(v["support"], 4);
}

#[test]
fn moments_monte_carlo_reports_estimates() {
    let out = holodet(&[
        "moments",
        "--example",
        "two_cycle",
        "--k",
        "1",
        "--mc-samples",
        "500",
        "--seed",
        "9",
        "--format",
        "json",
    ]);
    let v = json_stdout(&out);
    let mc = &v["monte_carlo"];
    assert_eq!(mc["samples"], 500);
    let (l, r) = (mc["lhs"]["re"].as_f64().unwrap(), mc["rhs"]["re"].as_f64().unwrap());
    assert!((l - r).abs() < 1e-9);
}

#[test]
fn example_round_trips_through_input() {
    let out = holodet(&["example", "unicyclic", "--rank", "2"]);
    assert!(out.status.success());
    let f = write_temp(std::str::from_utf8(&out.stdout).unwrap());
    let from_file = holodet(&["det", "-i", f.path().to_str().unwrap(), "--format", "json", "--no-timing"]);
    let built_in = holodet(&["det", "--example", "unicyclic", "--rank", "2", "--format", "json", "--no-timing"]);
    assert_eq!(from_file.stdout, built_in.stdout);
}

#[test]
fn text_output_has_value_line() {
    let out = holodet(&["det", "--example", "two_cycle", "--symbolic", "--mode", "symbolic"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "value: x1*x2 - x1*x2*u*v"), "{text}");
}
