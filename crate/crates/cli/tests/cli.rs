use std::process::{Command, Output};

use ends_core::report::Report;
use serde_json::Value;

fn endsctl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_endsctl")).args(args).output().expect("endsctl runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn free_group_counts_grow_by_three() {
    let out = endsctl(&["ends", "estimate", "--group", "free(2)", "--rmax", "6", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let counts: Vec<u64> = v["results"]["counts"].as_array().unwrap().iter().map(|c| c[1].as_u64().unwrap()).collect();
    assert_eq!(counts, [12, 36, 108, 324]);
    assert_eq!(v["results"]["verdict"], "many");
}

#[test]
fn integers_have_two_ends() {
    let out = endsctl(&["ends", "estimate", "--group", "free_abelian(1)", "--rmax", "6", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"]["verdict"], "two");
}

#[test]
fn notame_on_a_single_element() {
    let out = endsctl(&["verify", "notame", "--chain", "sum_z2", "--N", "12", "--g", "e2", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] == "verified_exact"));
}

#[test]
fn unknown_constructor_is_a_usage_error() {
    let out = endsctl(&["ends", "estimate", "--group", "heisenberg(3)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("heisenberg"));
    assert!(out.stdout.is_empty());
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(endsctl(&["verify", "frobnicate"]).status.code(), Some(2));
    assert_eq!(endsctl(&["ends", "estimate", "--group", "free(2)", "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn refutations_exit_one_with_a_witness() {
    let out = endsctl(&[
        "verify",
        "biends",
        "--group",
        "free_product([cyclic(2), cyclic(2)])",
        "--set",
        "first(1)",
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let check = &v["checks"][0];
    assert_eq!(check["status"], "refuted");
    assert!(check["witness"]["detail"].is_string());
}

#[test]
fn same_seed_same_bytes() {
    let args = ["verify", "coupme", "--factors", "cyclic(2)", "cyclic(3)", "cyclic(4)", "--pairs", "300", "--seed", "7", "--quiet"];
    let (a, b) = (endsctl(&args), endsctl(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let cardbool = ["verify", "cardbool", "--count", "30", "--seed", "3", "--quiet"];
    assert_eq!(endsctl(&cardbool).stdout, endsctl(&cardbool).stdout);
}

#[test]
fn reports_round_trip() {
    let out = endsctl(&["verify", "tree-disjoint", "--H", "cyclic(3)", "--L", "cyclic(2)", "--depth", "5", "--radius", "4", "--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let report = Report::from_json(&text).unwrap();
    assert_eq!(report.to_json(), text.trim_end());
    assert_eq!(report.command[0], "verify");
}

#[test]
fn estimate_csv_is_a_table() {
    let out = endsctl(&["ends", "estimate", "--group", "free_abelian(2)", "--rmax", "7", "--format", "csv", "--quiet"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,components");
    assert_eq!(lines.last(), Some(&"verdict,one"));
}

#[test]
fn table_goes_to_stderr_unless_quiet() {
    let args = ["verify", "commensurated", "--group", "free(2)", "--set", "cone(a)"];
    let loud = endsctl(&args);
    assert!(String::from_utf8_lossy(&loud.stderr).contains("left commensurated"));
    let mut quiet = args.to_vec();
    quiet.push("--quiet");
    assert!(endsctl(&quiet).stderr.is_empty());
}

#[test]
fn resource_cap_fails_loudly() {
    let out = endsctl(&["ends", "estimate", "--group", "free(3)", "--rmax", "10", "--max-elements", "500"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("500"));
}

#[test]
fn timing_is_opt_in() {
    let args = ["ends", "split", "--group", "free(2)", "--depth", "3", "--quiet"];
    assert!(json(&endsctl(&args)).get("timing_ms").is_none());
    let mut timed = args.to_vec();
    timed.push("--timing");
    assert!(json(&endsctl(&timed))["timing_ms"].is_number());
}

#[test]
fn metric_reads_pair_files() {
    let path = std::env::temp_dir().join(format!("endsctl-pairs-{}.txt", std::process::id()));
    std::fs::write(&path, "# x y\n|a b|a\n|ab |ba\nB|ba |aB\n").unwrap();
    let out = endsctl(&["ends", "metric", "--group", "free(2)", "--pairs", path.to_str().unwrap(), "--triples", "50", "--quiet"]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(0));
    let depths: Vec<Value> = json(&out)["results"].as_array().unwrap().iter().map(|r| r["depth"].clone()).collect();
    assert_eq!(depths, [Value::from(0), Value::from(0), Value::from(2)]);
}
