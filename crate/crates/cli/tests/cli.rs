use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn digitgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_digitgap"))
        .args(args)
        .env_remove("DIGITGAP_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> (Value, i32) {
    let mut full = args.to_vec();
    full.push("--json");
    let out = digitgap(&full);
    let v: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stderr)));
    (v, out.status.code().unwrap())
}

/// The report without its timing field, pretty-printed.
fn stable(mut v: Value) -> String {
    v.as_object_mut().unwrap().remove("timing");
    serde_json::to_string_pretty(&v).unwrap() + "\n"
}

fn golden(name: &str, args: &[&str], code: i32) {
    let (v, got) = report(args);
    assert_eq!(got, code, "{args:?}");
    let text = stable(v);
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"));
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(text, want, "{name} drifted from {}", path.display());
}

#[test]
fn golden_reports() {
    golden("bound_m_k3", &["bound-M", "--k", "3"], 0);
    golden("certify_10_11", &["certify", "--bases", "10,11", "--missing", "0;0"], 2);
    golden("search_3_4", &["search", "--bases", "3,4", "--missing", "0;0", "--first", "5"], 0);
    golden("thickness_10", &["thickness", "--base", "10", "--missing", "0,5", "--depth", "2"], 0);
    golden("expand_10", &["expand", "--base", "10", "1234"], 0);
    golden("align_2_3", &["align", "--bases", "2,3", "--eps", "1/100"], 0);
    golden("gauss_digits", &["gauss-digits", "--base", "1+2i"], 0);
    golden("gauss_expand", &["gauss-expand", "--base", "-1+i", "--digits", "0,1", "--policy", "zero-only", "-1"], 0);
    golden("gauss_align", &["gauss-align", "--bases", "1+2i,2-i", "--eps", "1e-6"], 0);
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["search", "--bases", "2,3", "--missing", "0", "--first", "3"];
    assert_eq!(stable(report(&args).0), stable(report(&args).0));
    let (v, _) = report(&args);
    // The echo is enough to run the command again.
    let echoed: Vec<String> = v["command"].as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect();
    let echoed: Vec<&str> = echoed.iter().map(String::as_str).collect();
    let (again, _) = report(&echoed[..echoed.len() - 1]);
    assert_eq!(v["outputs"], again["outputs"]);
}

#[test]
fn known_values() {
    let (v, _) = report(&["bound-M", "--k", "3"]);
    assert_eq!(v["outputs"]["m"], 79_904_626);
    let (v, code) = report(&["certify", "--bases", "10,11", "--missing", "0;0"]);
    assert_eq!(code, 2);
    assert!(v["outputs"]["failed_condition"].as_str().unwrap().starts_with("condition 3"));
    let (v, _) = report(&["search", "--bases", "2,3", "--missing", "0", "--first", "3"]);
    let vals: Vec<&str> = v["outputs"]["witnesses"].as_array().unwrap().iter().map(|w| w["value"].as_str().unwrap()).collect();
    assert_eq!(vals, ["1", "7", "32767"]);
    let out = digitgap(&["thickness", "--base", "10", "--missing", "0", "--depth", "3"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "8/1\n");
    let out = digitgap(&["avoid", "--base", "10", "--missing", "0,3", "1203"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout), "false\n");
}

#[test]
fn certificate_with_witness_passes() {
    let (v, code) = report(&["certify", "--bases", "52012851,52012852", "--missing", "0", "--n", "1", "--witness"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["outputs"]["verdict"], "pass");
    assert!(v["outputs"]["witness"]["value"].is_string());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(digitgap(&["expand", "--base", "10", "--nope", "3"]).status.code(), Some(1));
    assert_eq!(digitgap(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(digitgap(&["expand", "--base", "1", "3"]).status.code(), Some(1));
    assert_eq!(digitgap(&["search", "--bases", "3,4", "--missing", "0"]).status.code(), Some(1));
    let out = digitgap(&["gauss-digits", "--base", "oops"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    assert_eq!(digitgap(&["--help"]).status.code(), Some(0));
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_digitgap"))
        .args(["bound-M", "--k", "2", "--json"])
        .env("DIGITGAP_PRECISION_BITS", "256")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["precision"]["bits"], 256);
    let (v, _) = report(&["bound-M", "--k", "2", "--precision-bits", "64"]);
    assert_eq!(v["precision"]["bits"], 64);
    let (d, _) = report(&["bound-M", "--k", "2"]);
    assert_eq!(d["precision"]["bits"], 128);
    assert_eq!(v["outputs"]["m"], d["outputs"]["m"]);
}

#[test]
fn render_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("t.svg");
    let ppm = dir.path().join("t.ppm");
    let s = svg.to_str().unwrap();
    let p = ppm.to_str().unwrap();
    assert!(digitgap(&["render", "--base", "1+2i", "--level", "2", "--out", s]).status.success());
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<polygon").count(), 25);
    let args = ["render", "--base", "1+i", "--digits", "0,1", "--points", "8", "--size", "64x48", "--out", p];
    assert!(digitgap(&args).status.success());
    let first = std::fs::read(&ppm).unwrap();
    assert!(first.starts_with(b"P6\n64 48\n255\n"));
    assert!(digitgap(&args).status.success());
    assert_eq!(first, std::fs::read(&ppm).unwrap());
    let bad = dir.path().join("t.png");
    assert_eq!(digitgap(&["render", "--base", "1+2i", "--out", bad.to_str().unwrap()]).status.code(), Some(1));
    assert!(!bad.exists());
}
