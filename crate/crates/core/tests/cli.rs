mod common;

use std::path::PathBuf;

use ctprop::cli::{exit, run};
use ctprop::oracle::brute_force_marginal;
use ctprop::Query;

const NET1_PATH: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/net1.net");

fn ctprop(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("ctprop").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp_net(name: &str, text: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn values(out: &str) -> Vec<f64> {
    out.lines().filter_map(|l| l.rsplit_once(" = ")).map(|(_, v)| v.parse().unwrap()).collect()
}

#[test]
fn trace_matches_golden_file() {
    let (code, out, _) = ctprop(&["--net", NET1_PATH, "--target", "d,e", "--trace"]);
    assert_eq!(code, exit::OK);
    let trace: String = out.lines().filter(|l| l.starts_with("STEP")).map(|l| format!("{l}\n")).collect();
    assert_eq!(trace, common::NET1_TRACE);
}

#[test]
fn posterior_agrees_with_the_oracle() {
    let net = common::net1();
    let (code, out, _) = ctprop(&["--net", NET1_PATH, "--target", "d", "--evidence", "e=e0", "--posterior"]);
    assert_eq!(code, exit::OK);
    assert!(out.lines().all(|l| l.starts_with("P(d=") && l.contains(" | e=e0) = ")));
    let q = Query::new(vec![common::id(&net, "d")], [(common::id(&net, "e"), 0)].into_iter().collect()).unwrap();
    let want = brute_force_marginal(&net, &q).unwrap().normalize().unwrap();
    let got = values(&out);
    assert_eq!(got.len(), 3);
    for (g, w) in got.iter().zip(want.values()) {
        assert!((g - w).abs() <= 1e-11, "{g} vs {w}");
    }
    assert!((got.iter().sum::<f64>() - 1.0).abs() < 1e-11);
}

#[test]
fn check_flag_reports_pass() {
    let (code, out, _) = ctprop(&["--net", NET1_PATH, "--target", "d,a", "--evidence", "e=e0,g=g1", "--check"]);
    assert_eq!(code, exit::OK);
    assert!(out.ends_with("oracle check: PASS\n"));
    for strategy in ["first-leaf", "random"] {
        let (code, out, _) = ctprop(&["--net", NET1_PATH, "--target", "h", "--check", "--strategy", strategy, "--seed", "5"]);
        assert_eq!(code, exit::OK);
        assert!(out.contains("PASS"));
    }
}

#[test]
fn bad_row_sum_names_the_line() {
    let path = temp_net("bad_row.net", "variable a { a0, a1 }\n\ncpt a { 0.5, 0.6 }\n");
    let (code, _, err) = ctprop(&["--net", path.to_str().unwrap(), "--target", "a"]);
    assert_eq!(code, exit::MODEL);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn empty_net_is_rejected() {
    let path = temp_net("empty.net", "# nothing here\n");
    let (code, _, err) = ctprop(&["--net", path.to_str().unwrap(), "--target", "a"]);
    assert_eq!(code, exit::MODEL);
    assert!(err.starts_with("error:"));
}

#[test]
fn unknown_variable_is_rejected() {
    let (code, _, err) = ctprop(&["--net", NET1_PATH, "--target", "zz"]);
    assert_eq!(code, exit::MODEL);
    assert!(err.contains("unknown variable zz"));
    let (code, _, _) = ctprop(&["--net", NET1_PATH, "--target", "d", "--evidence", "e=e7"]);
    assert_eq!(code, exit::MODEL);
}

#[test]
fn impossible_evidence_has_its_own_exit_code() {
    let text = "variable a { a0, a1 }\nvariable b { b0, b1 }\ncpt a { 1, 0 }\ncpt b | a { 0.5, 0.5, 0.5, 0.5 }\n";
    let path = temp_net("zero.net", text);
    let (code, _, err) = ctprop(&["--net", path.to_str().unwrap(), "--target", "b", "--evidence", "a=a1", "--posterior"]);
    assert_eq!(code, exit::ZERO_EVIDENCE, "{err}");
    let (code, out, _) = ctprop(&["--net", path.to_str().unwrap(), "--target", "b", "--evidence", "a=a1"]);
    assert_eq!(code, exit::OK);
    assert_eq!(values(&out), vec![0.0, 0.0]);
}

#[test]
fn unspecified_root_triggers_a_warning() {
    let text = "variable a { a0, a1 }\nvariable b { b0, b1 }\ncpt b | a { 0.2, 0.8, 0.6, 0.4 }\n";
    let path = temp_net("root.net", text);
    let (code, out, err) = ctprop(&["--net", path.to_str().unwrap(), "--target", "b", "--check"]);
    assert_eq!(code, exit::OK);
    assert!(err.contains("warning: a has no prior"), "{err}");
    assert_eq!(values(&out), vec![0.8, 1.2]);
}
