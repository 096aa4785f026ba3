use std::process::Command;

use condprev_cli::report::{Report, TableKind};
use condprev_cli::run_from;

fn data(name: &str) -> String {
    format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> condprev_cli::Outcome {
    run_from(std::iter::once("condprev").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> (i32, Report) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = run(&all);
    assert!(out.stderr.is_empty(), "{}", out.stderr);
    (out.code, Report::from_json(&out.stdout).expect("valid report"))
}

#[test]
fn points_table_for_iterated_family() {
    let f = data("iterated.toml");
    let (code, r) = json(&["table", "--input", &f, "--assessment", "zero_x"]);
    assert_eq!(code, 0);
    let Report::Table(t) = r else { panic!() };
    assert_eq!(t.kind, TableKind::Points);
    assert_eq!(t.rows.len(), 9);
    assert_eq!((t.rows[2].constituent.as_str(), t.rows[2].value.as_str()), ("A H ~K", "(1, y, y, y)"));
    assert_eq!((t.rows[8].name.as_str(), t.rows[8].constituent.as_str()), ("C0", "~H ~K"));
}

#[test]
fn value_tables() {
    let out = run(&["table", "--input", &data("iterated.toml"), "--target", "iter"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().count(), 8);
    assert!(out.stdout.contains("~H ~B K   mu - mu*x"));
    let out = run(&["table", "--input", &data("iterated.toml"), "--target", "conj"]);
    assert_eq!(out.stdout.lines().count(), 6);
    let out = run(&["table", "--input", &data("events.toml"), "--target", "bic"]);
    assert!(out.stdout.contains("A ~B | ~A B  0") && out.stdout.contains("~A ~B        x"), "{}", out.stdout);
    let out = run(&["table", "--input", &data("iterated.toml"), "--assessment", "product", "--target", "iter"]);
    assert!(out.stdout.contains("~H B K    9/10"), "{}", out.stdout);
}

#[test]
fn check_verdicts_and_witness() {
    let f = data("iterated.toml");
    assert_eq!(run(&["check", "--input", &f, "--assessment", "coherent"]).code, 0);
    assert_eq!(run(&["check", "--input", &f, "--assessment", "product"]).code, 0);
    let (code, r) = json(&["check", "--input", &f, "--assessment", "broken_product"]);
    assert_eq!(code, 1);
    let Report::Check(c) = r else { panic!() };
    let w = c.witness.unwrap();
    assert!(w.verified);
    assert!(w.gains.iter().all(|g| !g.value.starts_with('-') && g.value != "0"));
}

#[test]
fn bounds_examples() {
    let (code, r) = json(&["bounds", "--input", &data("events.toml"), "--assessment", "marginals", "--target", "b_a"]);
    assert_eq!(code, 0);
    let Report::Bounds(b) = r else { panic!() };
    assert_eq!((b.lower.as_str(), b.upper.as_str()), ("1/2", "3/4"));
    assert_eq!(b.rule.as_deref(), Some("unconditional centering"));

    let (_, r) = json(&["bounds", "--input", &data("events.toml"), "--assessment", "converse", "--target", "bic"]);
    let Report::Bounds(b) = r else { panic!() };
    assert_eq!((b.lower.as_str(), b.upper.as_str(), b.rule.as_deref()), ("1/3", "1/3", Some("Hamacher t-norm")));

    let (_, r) = json(&["bounds", "--input", &data("iterated.toml"), "--assessment", "sure", "--target", "conj"]);
    let Report::Bounds(b) = r else { panic!() };
    assert_eq!((b.lower.as_str(), b.upper.as_str()), ("1", "1"));

    let (_, r) = json(&["bounds", "--input", &data("iterated.toml"), "--assessment", "pair", "--target", "iter"]);
    let Report::Bounds(b) = r else { panic!() };
    assert!(b.reduced);
    assert_eq!((b.lower.as_str(), b.upper.as_str()), ("1/2", "3/4"));
}

#[test]
fn entailment_commands() {
    let f = data("events.toml");
    let out = run(&["entails", "--input", &f, "--premises", "A, B", "--conclusion", "bic"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("p-entails"));
    let out = run(&["entails", "--input", &f, "--premises", "not A", "not B", "--conclusion", "bic"]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("does not p-entail") && out.stdout.contains("witness"));
    let out = run(&["entails", "--input", &f, "--premises", "A, not A", "--conclusion", "bic"]);
    assert_eq!(out.code, 3);
    assert!(out.stderr.contains("not p-consistent"));
    assert_eq!(run(&["pconsistent", "--input", &f, "--premises", "cond(A, B), cond(B, A)"]).code, 0);
    assert_eq!(run(&["pconsistent", "--input", &f, "--premises", "cond(A, B), cond(not A, B)"]).code, 1);
}

#[test]
fn constituents_command() {
    let out = run(&["constituents", "--input", &data("iterated.toml"), "--premises", "ah, bk"]);
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout.lines().count(), 9);
    assert!(out.stdout.ends_with("C0  ~H ~K\n"));
    let out = run(&["constituents", "--input", &data("events.toml"), "--premises", "A, B"]);
    assert_eq!(out.stdout.lines().count(), 4);
    assert!(!out.stdout.contains("C0"));
}

#[test]
fn counterfactual_bounds() {
    let out = run(&["bounds", "--input", &data("counterfactual.toml"), "--assessment", "base", "--target", "cf"]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.starts_with("P((C|A)|B) in [3/4, 3/4]"), "{}", out.stdout);
}

#[test]
fn error_exit_codes() {
    assert_eq!(run(&["check", "--input", &data("broken.toml"), "--assessment", "x"]).code, 2);
    assert_eq!(run(&["check", "--input", &data("missing.toml"), "--assessment", "x"]).code, 2);
    assert_eq!(run(&["check", "--input", &data("events.toml"), "--assessment", "nope"]).code, 2);
    assert_eq!(run(&["bounds", "--input", &data("events.toml"), "--assessment", "marginals", "--target", "Q"]).code, 2);
    assert_eq!(run(&["check", "--input", &data("events.toml"), "--assessment", "too_big"]).code, 3);
    assert_eq!(run(&["check", "--input", &data("events.toml"), "--assessment", "zero_x"]).code, 2);
    assert_eq!(run(&["bounds", "--input", &data("events.toml"), "--assessment", "bad", "--target", "B"]).code, 3);
    assert_eq!(run(&["bogus"]).code, 2);
}

#[test]
fn exit_code_does_not_depend_on_format() {
    let f = data("iterated.toml");
    for a in ["coherent", "broken_product", "zero_x"] {
        let text = run(&["check", "--input", &f, "--assessment", a]);
        let json = run(&["check", "--input", &f, "--assessment", a, "--format", "json"]);
        assert_eq!(text.code, json.code, "{a}");
    }
}

#[test]
fn json_reports_round_trip() {
    let f = data("events.toml");
    let cases: [&[&str]; 4] = [
        &["check", "--input", &f, "--assessment", "bad"],
        &["entails", "--input", &f, "--premises", "not A", "--conclusion", "b_a"],
        &["table", "--input", &f, "--assessment", "zero_x"],
        &["constituents", "--input", &f, "--premises", "b_a"],
    ];
    for args in cases {
        let (_, r) = json(args);
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
        assert!(r.to_json().contains("\"schema_version\": 1"));
    }
}

#[test]
fn binary_exit_status() {
    let status = Command::new(env!("CARGO_BIN_EXE_condprev"))
        .args(["check", "--input", &data("iterated.toml"), "--assessment", "broken_product"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&status.stdout).contains("incoherent"));
}
