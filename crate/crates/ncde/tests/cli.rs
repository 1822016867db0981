use std::path::Path;
use std::process::Command;

use ncde::matpath::read_csv;
use ncde::run_with;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("ncde").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run_json(args: &[&str]) -> Value {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn formal_check_weight_five_passes() {
    let (code, out, _) = run(&["formal-check", "--weight", "5"]);
    assert_eq!(code, 0);
    assert!(out.contains("25 of 25 checks passed"));
    assert!(!out.contains("FAIL"));
}

#[test]
fn trivial_character_check_is_exact() {
    let v = run_json(&["hyperlog", "char-check", "--alpha", "0", "--beta", "0", "--z", "0.5", "--N", "3"]);
    assert_eq!(v["abs_err"].as_f64(), Some(0.0));
    assert_eq!(v["passed"], true);
}

#[test]
fn failed_identity_exits_one() {
    let (code, out, _) = run(&[
        "hyperlog", "char-check", "--alpha", "0.5", "--beta", "0.5", "--z", "0.3", "--N", "1", "--max-err", "1e-12",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("\"passed\": false"));
}

#[test]
fn math_errors_exit_one() {
    let (code, _, err) = run(&["monodromy", "recurrence", "--alphas", "0.1414213562373095", "--n-max", "10"]);
    assert_eq!(code, 1);
    assert!(err.contains("no recurrence"));
}

#[test]
fn malformed_multiplier_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"multiplier\": {\"x0\": ");
    let status = Command::new(env!("CARGO_BIN_EXE_ncde"))
        .args(["btt", "check-iii", "--multiplier", &bad])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&status.stderr).contains("malformed JSON"));

    let wrong = write(dir.path(), "wrong.json", "{\"multiplier\": {\"x0\": {\"terms\": [{\"a\": {\"gamma\": \"1\"}}]}}}");
    assert_eq!(run(&["btt", "check-iii", "--multiplier", &wrong]).0, 2);
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["btt", "check-iii", "--multiplier", missing.to_str().unwrap()]).0, 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["formal-check", "--no-such-flag"]).0, 2);
    assert_eq!(run(&["formal-check", "--weight", "0"]).0, 2);
    assert_eq!(run(&["bogus"]).0, 2);
    assert_eq!(run(&["solve", "--group", "lorentz"]).0, 2);
    assert_eq!(run(&["hyperlog", "eval", "--word", "x2", "--z", "0.5"]).0, 2);
}

#[test]
fn every_subcommand_has_help_with_formats() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("File formats"));
    for sub in [
        vec!["shuffle"],
        vec!["series"],
        vec!["btt", "check-iii"],
        vec!["btt", "check-iv"],
        vec!["btt", "check-iii-prime"],
        vec!["btt", "verify-ncde"],
        vec!["btt", "numeric"],
        vec!["solve"],
        vec!["magnus"],
        vec!["monodromy", "apply"],
        vec!["monodromy", "eliminate"],
    ] {
        let mut args = sub.clone();
        args.push("--help");
        let (code, out, _) = run(&args);
        assert_eq!(code, 0, "{sub:?}");
        assert!(out.contains("17 significant digits"), "{sub:?}");
    }
    for sub in [vec!["formal-check"], vec!["hyperlog", "eval"], vec!["monodromy", "recurrence"], vec!["prop-suite"]] {
        let mut args = sub.clone();
        args.push("--help");
        assert_eq!(run(&args).0, 0, "{sub:?}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = run(&["prop-suite", "--seed", "11", "--cases", "8", "--threads", "1"]);
    let b = run(&["prop-suite", "--seed", "11", "--cases", "8", "--threads", "1"]);
    assert_eq!(a.0, 0, "{}", a.1);
    assert_eq!(a.1, b.1);
    let c = run(&["prop-suite", "--seed", "11", "--cases", "8", "--threads", "3"]);
    assert_eq!(a.1, c.1);
    assert!(a.1.contains("\"seed\": 11"));

    let f1 = run(&["btt", "fixture", "--beta", "1.4142135623730951", "--N", "3"]);
    let f2 = run(&["btt", "fixture", "--beta", "1.4142135623730951", "--N", "3"]);
    assert_eq!(f1.1, f2.1);
}

#[test]
fn series_json_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let (_, shuffled, _) = run(&["shuffle", "x0,x1", "x1"]);
    let path = write(dir.path(), "s.json", &shuffled);
    let (code, again, _) = run(&["series", "normalize", "--left", &path]);
    assert_eq!(code, 0);
    assert_eq!(again, shuffled);

    let v: Value = serde_json::from_str(&shuffled).unwrap();
    assert_eq!(v["max_degree"], 3);
    let coeffs: Vec<(String, String)> = v["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            let w: Vec<&str> = t["word"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
            (w.join(""), t["coeff"].as_str().unwrap().to_string())
        })
        .collect();
    assert_eq!(coeffs, vec![("x0x1x1".to_string(), "2".to_string()), ("x1x0x1".to_string(), "1".to_string())]);

    let half = write(
        dir.path(),
        "c.json",
        r#"{"alphabet":["x0","x1"],"max_degree":2,"terms":[{"word":[],"coeff":{"re":0.5,"im":-0.25}},{"word":["x1"],"coeff":[0.1,0.0]}]}"#,
    );
    let (_, first, _) = run(&["series", "normalize", "--ring", "complex", "--left", &half]);
    let again = write(dir.path(), "c2.json", &first);
    let (_, second, _) = run(&["series", "normalize", "--ring", "complex", "--left", &again]);
    assert_eq!(first, second);
    let v = run_json(&["series", "pairing", "--ring", "complex", "--left", &half, "--right", &half]);
    assert_eq!(v["pairing"]["re"].as_f64(), Some(0.5 * 0.5 - 0.25 * 0.25 + 0.01));
}

#[test]
fn function_json_round_trips_through_monodromy() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "f.json",
        r#"{"symbols":{"beta":1.4142135623730951},"terms":[{"a":{"1":"-1/2","beta":"1"},"b":{"1":"0"},"p":0,"q":1,"re":1.0,"im":0.0}]}"#,
    );
    let (_, moved, _) = run(&["monodromy", "apply", "--f", &f, "--center", "1", "--n", "2"]);
    let moved_path = write(dir.path(), "g.json", &moved);
    let (_, back, _) = run(&["monodromy", "apply", "--f", &moved_path, "--center", "1", "--n", "-2"]);
    let (_, same, _) = run(&["monodromy", "apply", "--f", &f, "--center", "1", "--n", "0"]);
    let (b, s): (Value, Value) = (serde_json::from_str(&back).unwrap(), serde_json::from_str(&same).unwrap());
    assert_eq!(b["symbols"], s["symbols"]);
    let terms = |v: &Value| v["terms"].as_array().unwrap().clone();
    assert_eq!(terms(&b).len(), terms(&s).len());
    for (x, y) in terms(&b).iter().zip(&terms(&s)) {
        assert_eq!(x["a"], y["a"]);
        assert_eq!(x["p"], y["p"]);
        assert_eq!(x["q"], y["q"]);
        assert!((x["re"].as_f64().unwrap() - y["re"].as_f64().unwrap()).abs() < 1e-12);
        assert!((x["im"].as_f64().unwrap() - y["im"].as_f64().unwrap()).abs() < 1e-12);
    }
    assert_eq!(s["terms"][0]["a"]["1"], "-1/2");
    assert_eq!(s["terms"][0]["a"]["beta"], "1");
}

#[test]
fn fixture_files_drive_the_btt_commands() {
    let dir = tempfile::tempdir().unwrap();
    let fx = run_json(&["btt", "fixture", "--beta", "1.4142135623730951", "--N", "4"]);
    assert_eq!(fx["iii"]["verdict"], "certified_independent");
    assert_eq!(fx["iii_prime"]["verdict"], "relation_found");
    assert_eq!(fx["iii_prime"]["witness"]["kind"], "wronskian");

    let series = write(dir.path(), "s.json", &fx["series"].to_string());
    let mult = write(dir.path(), "m.json", &fx["multiplier"].to_string());
    let v = run_json(&["btt", "verify-ncde", "--series", &series, "--multiplier", &mult]);
    assert_eq!(v["holds"], true);

    let mut tampered = fx["series"].clone();
    tampered["terms"][2]["coeff"]["terms"][0]["re"] = serde_json::json!(7.0);
    let tampered = write(dir.path(), "t.json", &tampered.to_string());
    let (code, out, _) = run(&["btt", "verify-ncde", "--series", &tampered, "--multiplier", &mult]);
    assert_eq!(code, 1);
    assert!(out.contains("\"holds\": false"));

    let r = run_json(&["btt", "check-iii", "--multiplier", &mult, "--ladder", "beta", "--l-max", "3"]);
    assert_eq!(r["verdict"], "certified_independent");
    assert_eq!(r["condition"], "iii");
    let r = run_json(&["btt", "check-iii", "--multiplier", &mult, "--ladder", "beta", "--l-min", "-3"]);
    assert_eq!(r["verdict"], "relation_found");
    assert_eq!(r["witness"]["kind"], "derivative");
}

#[test]
fn dependent_multiplier_is_reported_not_failed() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "m.json",
        r#"{"multiplier":{"x0":{"terms":[{"a":{"1":"-1"},"re":1.0}]},"x1":{"terms":[{"a":{"1":"-1"},"re":2.0}]}}}"#,
    );
    let v = run_json(&["btt", "check-iv", "--multiplier", &m]);
    assert_eq!(v["verdict"], "relation_found");
    assert_eq!(v["condition"], "iv");

    let funcs = write(
        dir.path(),
        "f.json",
        r#"{"symbols":{"beta":1.4142135623730951},"functions":[{"terms":[{"a":{"beta":"1"},"re":1.0}]},{"terms":[{"a":{"1":"1"},"re":1.0}]}]}"#,
    );
    let v = run_json(&["btt", "numeric", "--functions", &funcs]);
    assert_eq!(v["verdict"], "certified_independent");
    assert_eq!(v["condition"], "numeric-rank");
    assert!(v["singular_values"]["min"].as_f64().unwrap() > 0.0);
}

#[test]
fn solver_csv_parses_and_stays_on_the_group() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["solve", "--method", "picard", "--group", "orthogonal"],
        vec!["solve", "--method", "restarts", "--group", "orthogonal"],
        vec!["magnus", "--order", "4", "--group", "orthogonal"],
    ] {
        let (code, out, err) = run(&args);
        assert_eq!(code, 0, "{err}");
        let path = read_csv(out.as_bytes()).unwrap();
        assert_eq!(path.times.first(), Some(&0.0));
        assert_eq!(path.times.last(), Some(&1.0));
        assert!(path.defects.iter().all(|d| d.unwrap() < 1e-12), "{args:?}");
    }
    let (_, picard, _) = run(&["solve", "--step", "0.125"]);
    let (_, magnus, _) = run(&["magnus", "--step", "0.125"]);
    let (p, m) = (read_csv(picard.as_bytes()).unwrap(), read_csv(magnus.as_bytes()).unwrap());
    let gap = p.values.last().unwrap().max_abs_diff(m.values.last().unwrap());
    assert!(gap < 1e-6, "{gap}");
    assert!(p.defects.iter().all(Option::is_none));

    let mat = write(dir.path(), "a.json", r#"{"a":[[0,1],[-1,0]],"b":[[0,[0.5,0]],[-0.5,0]]}"#);
    let v = run_json(&["solve", "--matfun", &mat, "--group", "special-linear", "--format", "json"]);
    assert!(v["drift"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["points"][0]["g"][0][0]["re"].as_f64(), Some(1.0));
}

#[test]
fn hyperlog_eval_reports_method_and_value() {
    let v = run_json(&["hyperlog", "eval", "--word", "x0,x1", "--z", "0.5", "--tol", "1e-14"]);
    let expected = std::f64::consts::PI.powi(2) / 12.0 - std::f64::consts::LN_2.powi(2) / 2.0;
    assert!((v["value"]["re"].as_f64().unwrap() - expected).abs() < 1e-13);
    assert_eq!(v["method"], "nested_sum");
    let v = run_json(&["hyperlog", "eval", "--word", "x1", "--z", "0.9"]);
    assert_eq!(v["method"], "transport");
    assert!((v["value"]["re"].as_f64().unwrap() - 10f64.ln()).abs() < 1e-9);
}

#[test]
fn eliminate_recovers_the_log_coefficient() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "f.json",
        r#"{"terms":[{"a":{"1":"1/3"},"re":2.0},{"a":{"1":"1/3"},"b":{"1":"2"},"p":1,"re":3.0,"im":-1.0}]}"#,
    );
    let v = run_json(&["monodromy", "eliminate", "--f", &f, "--center", "0", "--z", "0.4", "--z-im", "0.1"]);
    assert_eq!(v["n"], 3);
    assert!(v["abs_err"].as_f64().unwrap() < 1e-12);
}
