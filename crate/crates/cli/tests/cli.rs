use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};

struct Run {
    code: i32,
    report: Value,
    stdout: String,
    stderr: String,
}

fn overgroup(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_overgroup")).current_dir(dir).args(args).output().expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    Run {
        code: out.status.code().unwrap(),
        report: serde_json::from_str(&stdout).unwrap_or(Value::Null),
        stdout,
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn here(args: &[&str]) -> Run {
    overgroup(Path::new("."), args)
}

fn write(dir: &Path, name: &str, v: &Value) {
    std::fs::write(dir.join(name), v.to_string()).unwrap();
}

fn max_root(case: &str) -> Value {
    here(&["info", "--case", case]).report["result"]["max_root"].clone()
}

fn negated(v: &Value) -> Value {
    v.as_array().unwrap().iter().map(|x| json!(-x.as_i64().unwrap())).collect()
}

#[test]
fn info_for_e7() {
    let r = here(&["info", "--case", "c", "--weights"]);
    assert_eq!(r.code, 0);
    let res = &r.report["result"];
    assert_eq!((res["roots"].as_u64(), res["weights"].as_u64()), (Some(126), Some(56)));
    assert_eq!(res["components"], json!([1, 27, 27, 1]));
    assert_eq!(res["root_list"].as_array().unwrap().len(), 126);
    assert_eq!(res["weight_list"][0]["component"], json!(0));
    assert_eq!(res["max_root"], json!([2, 2, 3, 4, 3, 2, 1]));
}

#[test]
fn lemmas_pass_and_check_rank() {
    let r = here(&["lemmas", "--case", "a", "--l", "5"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.report["suites"].as_array().unwrap().iter().all(|s| s["pass"] == json!(true)));
    assert_eq!(here(&["lemmas", "--case", "a", "--l", "4"]).code, 2);
    assert_eq!(here(&["lemmas", "--case", "a"]).code, 2);
    assert_eq!(here(&["lemmas", "--case", "x"]).code, 2);
}

#[test]
fn lemmas_for_e7_cover_every_root_pair() {
    let r = here(&["lemmas", "--case", "c"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let steinberg: Vec<&Value> = r.report["suites"].as_array().unwrap().iter().filter(|s| s["name"].as_str().unwrap().contains("steinberg")).collect();
    assert!(!steinberg.is_empty());
    assert!(steinberg.iter().all(|s| s["checked"] == json!(126 * 126)));
}

#[test]
fn forms_by_type() {
    let b = here(&["forms", "--case", "b"]);
    assert_eq!(b.code, 0);
    assert!(b.stdout.contains("not applicable: first type"));
    let a6 = here(&["forms", "--case", "a", "--l", "6", "--quick"]);
    assert_eq!(a6.code, 0, "{}", a6.stderr);
    let h = a6.report["result"]["h"].as_array().unwrap();
    assert_eq!(h.len(), 32);
    assert!(h.iter().all(|e| e["sign"].as_i64().unwrap().abs() == 1));
    assert!(!a6.report["result"]["q"]["coefficients"].as_array().unwrap().is_empty());
}

#[test]
fn decompose_identity_and_singular_corner() {
    let dir = tempfile::tempdir().unwrap();
    let n = 27;
    let mut rows: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    write(dir.path(), "identity.json", &json!({ "case": "b", "ring": "z4", "rows": rows }));
    let r = overgroup(dir.path(), &["decompose", "--in", "identity.json"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.report["result"]["identity_factors"], json!([true, true, true]));
    assert_eq!(r.report["inputs"].as_object().unwrap().len(), 1);

    // swapping the first two basis vectors leaves a zero corner entry
    rows[0] = vec![0; n];
    rows[1] = vec![0; n];
    rows[0][1] = 1;
    rows[1][0] = 1;
    write(dir.path(), "swap.json", &json!({ "case": "b", "ring": "z4", "rows": rows }));
    let r = overgroup(dir.path(), &["decompose", "--in", "swap.json"]);
    assert_eq!(r.code, 1);
    assert!(r.report["suites"][0]["counterexample"].is_object());
    assert_eq!(overgroup(dir.path(), &["decompose", "--in", "missing.json"]).code, 2);
}

#[test]
fn normcheck_samples() {
    let r = here(&["normcheck", "--case", "c", "--ring", "z4", "--sigma", "(2),(0)", "--samples", "100", "--seed", "1"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.report["suites"].as_array().unwrap().len(), 2);
}

#[test]
fn level_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let beta = max_root("c");
    write(dir.path(), "extra.json", &json!([[{ "x": beta, "value": 2 }, { "x": negated(&beta), "value": 4 }]]));
    let run = |target: &str, budget: &str| {
        overgroup(dir.path(), &["level", "--case", "c", "--ring", "z8", "--extra", "extra.json", "--target", target, "--budget", budget, "--seed", "5"])
    };
    let ok = run("(2),(4)", "300");
    assert_eq!(ok.code, 0, "{}", ok.stderr);
    assert_eq!(ok.report["result"]["verdict"], json!("certified"));
    assert!(ok.report["witnesses"].as_array().unwrap().iter().all(|w| w["h_word"].is_array()));
    assert_eq!(run("(4),(4)", "50").code, 1);
    assert_eq!(run("(2),(2)", "5").code, 3);
    let missing = overgroup(dir.path(), &["level", "--case", "c", "--ring", "z8"]);
    assert_eq!(missing.code, 2);
}

#[test]
fn experiments_find_the_level() {
    let dir = tempfile::tempdir().unwrap();
    let beta = max_root("b");
    for (name, extra, sigma) in [
        ("none.json", json!([]), "((0),(0))"),
        ("two.json", json!([[{ "x": beta, "value": 2 }]]), "((2),(0))"),
        ("one.json", json!([{ "x": beta, "value": 1 }]), "((1),(0))"),
    ] {
        write(dir.path(), name, &extra);
        let r = overgroup(dir.path(), &["experiment", "--case", "b", "--ring", "z4", "--extra", name, "--budget", "100", "--samples", "30", "--seed", "3"]);
        assert_eq!(r.code, 0, "{name}: {}", r.stderr);
        assert_eq!(r.report["result"]["sigma"], json!(sigma), "{name}");
    }
}

#[test]
fn reports_replay_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let beta = max_root("b");
    write(dir.path(), "extra.json", &json!([[{ "x": beta, "value": 2 }]]));
    let args = ["experiment", "--case", "b", "--ring", "z4", "--extra", "extra.json", "--budget", "64", "--seed", "11"];
    let a = overgroup(dir.path(), &args);
    let b = overgroup(dir.path(), &args);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    let c = overgroup(dir.path(), &seq);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let other = overgroup(dir.path(), &["experiment", "--case", "b", "--ring", "z4", "--extra", "extra.json", "--budget", "64", "--seed", "12"]);
    assert_ne!(a.report["config_hash"], other.report["config_hash"]);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "run.json", &json!({ "case": "b", "ring": "z8", "seed": 9, "target": "(0),(0)", "budget": 8 }));
    let from_file = overgroup(dir.path(), &["--config", "run.json", "level"]);
    assert_eq!(from_file.code, 0, "{}", from_file.stderr);
    assert_eq!(from_file.report["config"]["ring"], json!("z8"));
    let overridden = overgroup(dir.path(), &["--config", "run.json", "level", "--ring", "z4", "--out", "report.json"]);
    assert_eq!(overridden.code, 0);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!((saved["config"]["ring"].clone(), saved["config"]["seed"].clone()), (json!("z4"), json!(9)));
    write(dir.path(), "bad.json", &json!({ "rings": "z8" }));
    assert_eq!(overgroup(dir.path(), &["--config", "bad.json", "info"]).code, 2);
}

#[test]
fn selftest_passes() {
    let r = here(&["selftest"]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let criteria = r.report["result"]["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 9);
    assert!(criteria.iter().all(|c| c["pass"] == json!(true)));
}
