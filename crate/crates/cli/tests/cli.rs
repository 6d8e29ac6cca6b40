//! End-to-end runs of the `renyi` binary on the fixtures.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn renyi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renyi")).args(args).output().unwrap()
}

fn renyi_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renyi")).args(args).env(key, value).output().unwrap()
}

fn pair_args<'a>(cmd: &'a str, rho: &'a str, sigma: &'a str) -> Vec<String> {
    vec![cmd.into(), "--input".into(), fixture(rho), "--input".into(), fixture(sigma)]
}

fn run_ok(args: &[String]) -> String {
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = renyi(&argv);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Data rows (header and `#` summary lines dropped) as string records.
fn records(csv_text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(csv_text.as_bytes());
    let header = rdr.headers().unwrap().iter().map(str::to_string).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    match s {
        "inf" => f64::INFINITY,
        "-inf" => f64::NEG_INFINITY,
        _ => s.parse().unwrap_or_else(|_| panic!("not a number: {s}")),
    }
}

fn summary(csv_text: &str, key: &str) -> String {
    let prefix = format!("# {key},");
    csv_text
        .lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no summary key {key}"))
        .to_string()
}

fn value_of(rows: &[Vec<String>], family: &str) -> f64 {
    num(&rows.iter().find(|r| r[0] == family).unwrap()[2])
}

#[test]
fn identical_states_give_zero_everywhere() {
    let mut args = pair_args("compute", "identical.json", "identical.json");
    args.extend(["--alpha".into(), "0.3,0.7".into()]);
    let (_, rows) = records(&run_ok(&args));
    assert!(!rows.is_empty());
    for r in &rows {
        assert!(num(&r[2]).abs() < 1e-9, "{r:?}");
    }
}

#[test]
fn pure_states_match_closed_forms() {
    let mut args = pair_args("compute", "pure-zero.json", "pure-plus.json");
    args.extend(["--alpha".into(), "0.3".into()]);
    let (_, rows) = records(&run_ok(&args));
    let (a, c) = (0.3f64, 0.5f64);
    assert!((value_of(&rows, "standard") - c.ln() / (a - 1.0)).abs() < 1e-10);
    assert!((value_of(&rows, "sandwiched") - a / (a - 1.0) * c.ln()).abs() < 1e-10);
    assert!((value_of(&rows, "measured") - 2f64.ln()).abs() < 1e-4);
    assert!((value_of(&rows, "test") - 2f64.ln()).abs() < 1e-4);
    // distinct pure states: no common support for the relative entropy
    assert_eq!(value_of(&rows, "relative-entropy"), f64::INFINITY);
    assert_eq!(value_of(&rows, "dmax"), f64::INFINITY);
    assert!((value_of(&rows, "chernoff") - 2f64.ln()).abs() < 1e-9);
}

#[test]
fn regularized_at_half_is_chernoff() {
    let mut args = pair_args("compute", "noncommuting-rho.json", "noncommuting-sigma.json");
    args.extend(["--family".into(), "chernoff,regularized-test".into()]);
    let (_, rows) = records(&run_ok(&args));
    let diff = value_of(&rows, "chernoff") - value_of(&rows, "regularized-test");
    assert!(diff.abs() < 1e-6, "{diff}");
}

#[test]
fn alpha_scan_orderings() {
    let mut args = pair_args("scan", "noncommuting-rho.json", "noncommuting-sigma.json");
    args.extend(["--alpha-grid".into(), "0.1:0.9:9".into()]);
    let (header, rows) = records(&run_ok(&args));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (std, sw, meas, test, reg) = (col("standard"), col("sandwiched"), col("measured"), col("test"), col("regularized-test"));
    let mut prev = f64::NEG_INFINITY;
    for r in &rows {
        let v: Vec<f64> = [std, sw, meas, test, reg].iter().map(|&i| num(&r[i])).collect();
        assert!(v[0] >= prev - 1e-12, "standard not monotone");
        prev = v[0];
        assert!(v[1] <= v[0] + 1e-9, "sandwiched above standard: {r:?}");
        assert!(v[3] <= v[2] + 1e-6, "test above measured: {r:?}");
        // sandwiched obeys data processing only from α = 1/2 on
        if num(&r[0]) >= 0.5 {
            assert!(v[2] <= v[1] + 1e-9, "measured above sandwiched: {r:?}");
        }
        assert!(v[4] <= v[0] + 1e-8 && v[4] >= 0.5 * v[0] - 1e-8, "regularized outside bounds: {r:?}");
    }
}

#[test]
fn hoeffding_scan_decreases_from_d0_to_d() {
    let mut args = pair_args("scan", "generic-p.json", "generic-q.json");
    args.extend(["--r-grid".into(), "d0:d:12".into()]);
    let (header, rows) = records(&run_ok(&args));
    assert_eq!(header, ["x", "value", "c_r"]);
    let h: Vec<f64> = rows.iter().map(|r| num(&r[1])).collect();
    assert_eq!(h.len(), 12);
    for w in h.windows(2) {
        assert!(w[1] < w[0], "{h:?}");
    }
    assert!(h[11].abs() < 1e-9);
}

#[test]
fn ncopy_two_level_verdict() {
    let mut args = pair_args("ncopy", "two-level-p.json", "two-level-q.json");
    args.extend(["--alpha".into(), "0.3".into(), "--n-max".into(), "4".into()]);
    let text = run_ok(&args);
    let (_, rows) = records(&text);
    let dalpha = num(&summary(&text, "dalpha"));
    assert!((num(&rows[0][1]) - dalpha).abs() < 1e-9);
    assert_eq!(summary(&text, "verdict"), "(i) two-level");
    assert_eq!(summary(&text, "condition_two_level"), "true");
    assert!(num(&summary(&text, "regularized_test")) < dalpha - 1e-4);
}

#[test]
fn ncopy_generic_verdict() {
    let mut args = pair_args("ncopy", "generic-p.json", "generic-q.json");
    args.extend(["--n-max".into(), "3".into()]);
    let text = run_ok(&args);
    let (_, rows) = records(&text);
    let dalpha = num(&summary(&text, "dalpha"));
    for r in &rows {
        assert!(num(&r[1]) < dalpha - 1e-6, "{r:?}");
    }
    assert_eq!(summary(&text, "verdict"), "(ii) generic");
}

#[test]
fn ncopy_rejects_quantum_input() {
    let out = renyi(&["ncopy", "--input", &fixture("noncommuting-rho.json"), "--input", &fixture("noncommuting-sigma.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hoeffding-test"));
}

#[test]
fn hoeffding_test_respects_bounds() {
    let mut args = pair_args("hoeffding-test", "noncommuting-rho.json", "noncommuting-sigma.json");
    args.extend(["--n".into(), "3".into(), "--r".into(), "0.05".into(), "--alpha".into(), "0.5".into()]);
    let (header, rows) = records(&run_ok(&args));
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    assert_eq!(rows[0][col("type_i_ok")], "true");
    assert_eq!(rows[0][col("type_ii_ok")], "true");
}

#[test]
fn verify_only_and_unknown_id() {
    let out = renyi(&["verify", "--only", "skew-symmetry"]);
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = records(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0..2], ["skew-symmetry", "PASS"]);

    let out = renyi(&["verify", "--only", "no-such-check"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_list_names_checks() {
    let out = renyi(&["verify", "--list"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.trim() == "chernoff-fixed-point"));
}

#[test]
fn output_is_deterministic() {
    let mut args = pair_args("compute", "noncommuting-rho.json", "noncommuting-sigma.json");
    args.extend(["--alpha".into(), "0.25,0.75".into()]);
    assert_eq!(run_ok(&args), run_ok(&args));
    let v = vec!["verify".to_string(), "--only".into(), "pinching,weak-additivity".into()];
    assert_eq!(run_ok(&v), run_ok(&v));
}

#[test]
fn json_output_parses() {
    let mut args = pair_args("compute", "pure-zero.json", "pure-plus.json");
    args.extend(["--format".into(), "json".into(), "--family".into(), "dmax,standard".into()]);
    let v: serde_json::Value = serde_json::from_str(&run_ok(&args)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["value"], "inf");
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("renyi-cli-out-{}.csv", std::process::id()));
    let mut args = pair_args("compute", "identical.json", "identical.json");
    args.extend(["--out".into(), path.to_string_lossy().into_owned()]);
    let stdout = run_ok(&args);
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.starts_with("family,alpha,value,method,residual\n"));
}

#[test]
fn input_errors_exit_one() {
    // dimension mismatch
    let out = renyi(&["compute", "--input", &fixture("identical.json"), "--input", &fixture("generic-p.json")]);
    assert_eq!(out.status.code(), Some(1));
    // one input only
    let out = renyi(&["compute", "--input", &fixture("identical.json")]);
    assert_eq!(out.status.code(), Some(1));
    // missing file
    let out = renyi(&["compute", "--input", "/nonexistent.json", "--input", &fixture("identical.json")]);
    assert_eq!(out.status.code(), Some(1));
    // α outside the family's range
    let out = renyi(&["compute", "--input", &fixture("identical.json"), "--input", &fixture("identical.json"), "--family", "test", "--alpha", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
    // malformed state file
    let path = std::env::temp_dir().join(format!("renyi-cli-bad-{}.json", std::process::id()));
    std::fs::write(&path, "{\"kind\": \"classical\",\n \"weights\": [0.5, }").unwrap();
    let out = renyi(&["compute", "--input", path.to_str().unwrap(), "--input", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    // bad flag
    assert_eq!(renyi(&["compute", "--bogus"]).status.code(), Some(1));
}

#[test]
fn tolerance_overrides_from_env() {
    let args = ["verify", "--only", "skew-symmetry"];
    let out = renyi_env(&args, "RENYI_TOL_OVERRIDES", r#"{"not_a_key": 1}"#);
    assert_eq!(out.status.code(), Some(1));
    let mut a = pair_args("ncopy", "two-level-p.json", "two-level-q.json");
    a.extend(["--n-max".into(), "2".into()]);
    let argv: Vec<&str> = a.iter().map(String::as_str).collect();
    let out = renyi_env(&argv, "RENYI_TOL_OVERRIDES", r#"{"verdict_margin": 1e-5}"#);
    assert_eq!(out.status.code(), Some(0));
}
