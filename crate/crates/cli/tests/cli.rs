use std::process::{Command, Output};

use serde_json::Value;

fn zetalab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetalab"))
        .args(args)
        .env_remove("ZETALAB_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn moment_example() {
    let out = zetalab(&["moment", "--kappa", "4", "--n", "0", "--j", "0", "--digits", "60"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["value"].as_str().unwrap().starts_with("1.05179979026464499972477089132"));
    assert_eq!(v["closed_form"], "7/8*zeta(3)");
    assert_eq!(v["residual"], "<1e-58");
    assert_eq!(v["precision"], 60);
    assert_eq!(v["provenance"], "proved");
}

#[test]
fn decompose_example() {
    let out = zetalab(&["decompose", "--kappa", "4", "--n", "4", "--j", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["one"], "-9/512");
    assert_eq!(v["basis"]["m1"], "7/384");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["moment", "--kappa", "4", "--n", "0", "--bogus"],
        vec!["moment", "--kappa", "4", "--n", "0", "--digits", "14"],
        vec!["moment", "--kappa", "4"],
        vec!["frobnicate"],
        vec!["cf", "eval", "no_such_fraction"],
        vec!["period", "--n", "3", "--p", "3", "--form", "mixed"],
    ] {
        let out = zetalab(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    let help = zetalab(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("verify"));
}

#[test]
fn appendix_suite_passes() {
    let out = zetalab(&["verify", "--suite", "appendixA", "--digits", "30"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["failed"], 0);
    assert_eq!(v["rows"].as_array().unwrap().len(), 9);
    for r in v["rows"].as_array().unwrap() {
        assert_eq!(r["provenance"], "proved");
    }
}

#[test]
fn identity_suite_reports_the_misprinted_vectors() {
    let out = zetalab(&["verify", "--suite", "identities", "--digits", "50"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let failed: Vec<&str> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["passed"] == "false")
        .map(|r| r["check"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["nested_f5g1", "nested_f7g1", "nested_f3g5"]);
    for r in v["rows"].as_array().unwrap() {
        let p = r["provenance"].as_str().unwrap();
        assert!(p == "proved" || p == "pslq_conjectural");
    }
}

#[test]
fn csv_mirrors_json_rows() {
    let j = json(&zetalab(&["cf", "list"]));
    let csv = zetalab(&["cf", "list", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "name,numerator,denominator,divisor,start_k,target,provenance");
    assert_eq!(lines.len(), 1 + j["rows"].as_array().unwrap().len());
    assert!(lines[1].starts_with("zeta2_a,"));
}

#[test]
fn apery_convergents() {
    let out = zetalab(&[
        "cf", "convergents", "zeta3_apery", "--k-max", "20", "--init-num", "0,6", "--init-den", "1,5",
        "--against", "zeta3", "--digits", "30",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let last = v["rows"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last["k"], "20");
    let diff: f64 = last["difference"].as_str().unwrap().parse().unwrap();
    assert!(diff < 1e-20);
}

#[test]
fn pslq_named_constants() {
    // a named constant against its own decimal expansion
    let out = zetalab(&["pslq", "zeta2", "1.6449340668482264364724151666460251892189499012068", "--digits", "40"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["coefficients"], serde_json::json!(["1", "-1"]));
    assert_eq!(v["provenance"], "pslq_conjectural");
}

#[test]
fn cache_is_transparent_and_survives_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let fresh = zetalab(&["moment", "--p", "3", "--a", "4", "--digits", "40", "--no-cache"]);
    let warm = zetalab(&["moment", "--p", "3", "--a", "4", "--digits", "70", "--cache-dir", d]);
    assert_eq!(warm.status.code(), Some(0));
    let hit = zetalab(&["moment", "--p", "3", "--a", "4", "--digits", "40", "--cache-dir", d]);
    assert_eq!(fresh.stdout, hit.stdout);
    let files: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let path = files[0].as_ref().unwrap().path();
    std::fs::write(&path, "{\"key\": 3").unwrap();
    let bypass = zetalab(&["moment", "--p", "3", "--a", "4", "--digits", "40", "--cache-dir", d]);
    assert_eq!(bypass.status.code(), Some(0));
    assert_eq!(bypass.stdout, fresh.stdout);
    assert!(String::from_utf8_lossy(&bypass.stderr).contains("warning"));
}

#[test]
fn period_and_limits() {
    let v = json(&zetalab(&["period", "--n", "3", "--p", "1", "--form", "log_kernel", "--digits", "30"]));
    assert_eq!(v["agreeing_digits"], 30);
    assert_eq!(v["certified"], true);
    let v = json(&zetalab(&["limits", "--n-max", "12", "--digits", "20"]));
    assert_eq!(v["monotone"], true);
    assert!(v["plain_limit"].as_str().unwrap().starts_with("1.1229189671337703"));
}
