use std::path::PathBuf;

use assert_cmd::Command;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn hardy(args: &[&str]) -> (i32, String, String) {
    let out = Command::cargo_bin("hardy").unwrap().args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn code(args: &[&str]) -> i32 {
    hardy(args).0
}

#[test]
fn eval_prints_exact_and_rounded_values() {
    let (c, out, _) = hardy(&["--function", "x^(5/2)", "eval", "4"]);
    assert_eq!(c, 0);
    assert!(out.contains("32 (exact)"), "{out}");
    assert!(out.contains("round f(4) = 32"), "{out}");
    let (c, out, _) = hardy(&["--function", "sqrt(x)", "eval", "6"]);
    assert_eq!(c, 0);
    assert!(out.contains("= 2.449"), "{out}");
    assert!(out.contains("round f(6) = 2"), "{out}");
}

#[test]
fn eval_below_domain_is_a_runtime_error() {
    assert_eq!(code(&["--function", "sqrt(x)", "eval", "-3"]), 3);
    assert_eq!(code(&["--function", "sqrt(x)", "eval", "--zero-extend", "-3"]), 0);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&["--no-such-flag", "eval", "1"]), 4);
    assert_eq!(code(&["eval", "1"]), 4);
    assert_eq!(code(&["--preset", "nope", "eval", "1"]), 4);
    assert_eq!(code(&["--precision-cap", "16", "--function", "x", "eval", "1"]), 4);
    assert_eq!(code(&["--function", "x^2+x", "--growth", "near", "--M", "10", "search", "pi"]), 4);
    assert_eq!(code(&["--config", &fixture("x3_2.conf"), "mult", "super", "1", "1", "1"]), 4);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn pi_search_on_a_polynomial() {
    let (c, out, _) = hardy(&["--function", "x^2+x", "--growth", "super:3", "--M", "10", "--n-to", "100", "search", "pi"]);
    assert_eq!(c, 0);
    assert!(out.contains("\"N\":0"), "{out}");
}

#[test]
fn pi_search_exit_codes() {
    let base = ["--config", &fixture("x5_2.conf")];
    // exhaustive scan of [0, 50] finds nothing: the range is covered
    let (c, out, _) = hardy(&[&base[..], &["--n-to", "50", "search", "pi"]].concat());
    assert_eq!((c, out.trim()), (1, "none"));
    // a candidate cap below the range end leaves the answer open
    assert_eq!(code(&[&base[..], &["--n-to", "50", "--budget", "10", "search", "pi"]].concat()), 2);
    let (c, out, _) = hardy(&[&base[..], &["--n-to", "200", "search", "pi", "--exhaustive"]].concat());
    assert_eq!(c, 0);
    assert!(out.contains("\"N\":95"), "{out}");
    let (c, out, _) = hardy(&[&base[..], &["--n-to", "20000", "search", "pi"]].concat());
    assert_eq!(c, 0);
    assert!(out.contains("\"N\":6400"), "{out}");
}

#[test]
fn lambda_search_finds_a_progression() {
    let (c, out, _) = hardy(&["--config", &fixture("x3_2.conf"), "search", "lambda", "--step", "100"]);
    assert_eq!(c, 0);
    assert!(out.contains("\"kind\":\"lambda\""), "{out}");
    assert!(out.contains("\"N\":4434"), "{out}");
}

#[test]
fn mult_regimes() {
    let near = ["--config", &fixture("x3_2.conf")];
    assert_eq!(code(&[&near[..], &["mult", "near", "7", "5", "35"]].concat()), 0);
    assert_eq!(code(&[&near[..], &["mult", "near", "7", "5", "36"]].concat()), 1);
    let exact = ["--config", &fixture("sqrt2x2.conf")];
    assert_eq!(code(&[&exact[..], &["mult", "exact", "3", "4", "12"]].concat()), 0);
    assert_eq!(code(&[&exact[..], &["mult", "exact", "3", "4", "11"]].concat()), 1);
    let (c, out, _) = hardy(&["--config", &fixture("x5_2.conf"), "--budget", "100", "mult", "super", "2", "3", "6"]);
    assert_eq!(c, 2);
    assert!(out.starts_with("UNKNOWN"), "{out}");
}

#[test]
fn verify_suites() {
    assert_eq!(code(&["verify", "error"]), 0);
    assert_eq!(code(&["verify", "derivatives", "--trials", "50"]), 0);
    assert_eq!(code(&["--config", &fixture("x5_2.conf"), "verify", "taylor"]), 0);
    let (c, out, _) = hardy(&["--config", &fixture("sqrt.conf"), "verify", "inverse", "--m-to", "200"]);
    assert_eq!(c, 0);
    assert!(out.contains("m0 = 1") || out.contains("m0 = 2"), "{out}");
    assert_eq!(code(&["verify", "taylor"]), 4);
}

#[test]
fn decide_fixtures() {
    let sqrt = ["--config", &fixture("sqrt.conf")];
    assert_eq!(code(&[&sqrt[..], &["decide", &fixture("b_def.fo")]].concat()), 0);
    // closed world and bound come from verb-prefixed keys in the config
    assert_eq!(code(&["--config", &fixture("x3_2.conf"), "decide", &fixture("mul.fo")]), 1);
    assert_eq!(code(&[&sqrt[..], &["--bound", "0", "decide", &fixture("exists.fo")]].concat()), 2);
    let (c, out, _) = hardy(&[&sqrt[..], &["decide", &fixture("exists.fo")]].concat());
    assert_eq!(c, 0);
    assert!(out.contains("x = 21"), "{out}");
    assert_eq!(code(&[&sqrt[..], &["decide", "--expr", "E x. x <"]].concat()), 3);
    assert_eq!(code(&[&sqrt[..], &["decide", "--expr", "x < y"]].concat()), 3);
    assert_eq!(code(&[&sqrt[..], &["decide", "--expr", "x < y", "--env", "x=1", "--env", "y=2"]].concat()), 0);
}

#[test]
fn json_output_is_deterministic() {
    let runs: Vec<&[&str]> = vec![
        &["search", "pi"],
        &["mult", "super", "1", "2", "2"],
        &["density", "--bins", "4", "--n-to", "300"],
    ];
    let cfg = fixture("x5_2.conf");
    for args in runs {
        let full = [&["--config", cfg.as_str(), "--format", "json", "--threads", "2", "--n-to", "20000"][..], args].concat();
        let (c1, a, _) = hardy(&full);
        let (c2, b, _) = hardy(&full);
        assert_eq!(c1, c2);
        assert_eq!(a, b, "{args:?}");
        serde_json::from_str::<serde_json::Value>(&a).unwrap();
    }
}

#[test]
fn csv_output_has_a_header() {
    let (c, out, _) = hardy(&["--format", "csv", "verify", "error", "--trials", "20"]);
    assert_eq!(c, 0);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().contains("suite"));
    assert_eq!(lines.count(), 5);
}
