use std::process::{Command, Output};

use serde_json::Value;

fn gnr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnr"))
        .args(args)
        .output()
        .expect("gnr runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

#[test]
fn ranges_json_b3_endpoint() {
    let out = gnr(&["ranges", "--n", "7", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert_eq!(doc["schema"], 1);
    let b3 = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["case"] == "B3")
        .unwrap();
    assert!((b3["hi"].as_f64().unwrap() - 1.37275).abs() < 1e-5);
}

#[test]
fn ranges_csv_header() {
    let out = gnr(&["ranges", "--n", "3,4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("n,case,lo,hi,openness,binding"));
    // six cases and two κ rows per dimension
    assert_eq!(text.lines().count(), 1 + 2 * 8);
}

#[test]
fn constants_gamma() {
    let out = gnr(&["constants", "--n", "4", "--alpha", "0.5", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    let row = &doc["rows"][0];
    assert!((row["interp"].as_f64().unwrap() - 4.0 / 9.0).abs() < 1e-15);
    assert_eq!(row["regime"], "minus");
}

#[test]
fn outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.json");
    let first_s = first.to_str().unwrap();
    for args in [
        vec!["expansion", "fit", "--n", "3", "--alpha", "1.1"],
        vec![
            "symmetrize",
            "--n",
            "4",
            "--seed",
            "3",
            "--target",
            "spaceform:K=1",
        ],
        vec!["minimize", "--n", "3", "--alpha", "0.5", "--grid", "256"],
    ] {
        let mut a = args.clone();
        a.extend(["--json", "--out", first_s]);
        assert_eq!(gnr(&a).status.code(), Some(0), "{args:?}");
        let again = gnr(&["--config", first_s, "--json"]);
        assert_eq!(again.status.code(), Some(0));
        assert_eq!(std::fs::read(&first).unwrap(), again.stdout, "{args:?}");
    }
}

#[test]
fn config_errors_exit_2_with_json() {
    for args in [
        vec!["minimize", "--n", "3", "--alpha", "1.0"],
        vec![
            "expansion",
            "fit",
            "--n",
            "3",
            "--alpha",
            "0.5",
            "--metric",
            "hyperbolic",
        ],
        vec!["symmetrize", "--n", "3", "--q", "-1"],
        vec!["suite", "--only", "12"],
        vec!["no-such-command"],
    ] {
        let out = gnr(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err: Value = serde_json::from_slice(&out.stderr).expect("stderr is json");
        assert_eq!(err["schema"], 1);
        assert!(err["error"]["message"].is_string());
    }
}

#[test]
fn tol_override_reaches_the_verdict() {
    let loose = gnr(&["moments", "verify", "--n", "3", "--alpha", "0.5"]);
    assert_eq!(loose.status.code(), Some(0));
    let strict = gnr(&[
        "moments", "verify", "--n", "3", "--alpha", "0.5", "--tol", "1e-30",
    ]);
    assert_eq!(strict.status.code(), Some(1));
    let fit = gnr(&[
        "expansion",
        "fit",
        "--n",
        "3",
        "--alpha",
        "0.5",
        "--series",
        "l",
        "--tol",
        "1e-12",
    ]);
    assert_eq!(fit.status.code(), Some(1));
}

#[test]
fn profile_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("u.csv");
    let out = gnr(&["symmetrize", "--n", "3", "--profile", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.starts_with("r,value\n"));
    // the dumped profile is radially decreasing
    let vals: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(vals.windows(2).all(|w| w[1] <= w[0]));
    let again = gnr(&[
        "symmetrize",
        "--n",
        "3",
        "--source",
        &format!("profile:{}", p.display()),
    ]);
    assert_eq!(again.status.code(), Some(0));
}

#[test]
fn conformal_check_on_schwarzschild() {
    let out = gnr(&["conformal", "check", "--n", "4", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json_of(&out);
    assert!(doc["rows"][0]["rel"].as_f64().unwrap() < 1e-7);
}

#[test]
fn quick_suite_passes() {
    let out = gnr(&["suite", "--quick"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("10 of 10 criteria pass"));
}
