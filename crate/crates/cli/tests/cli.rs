use std::process::Command;

use nil_cli::syntax::{default_variables, format_ideal, parse_ideal};
use nil_cli::{run, run_styled, EXIT_HYPOTHESIS, EXIT_INCONCLUSIVE, EXIT_INPUT, EXIT_OK, OUTPUT_SCHEMA};
use nil_core::ideal::MonomialIdeal;
use proptest::prelude::*;
use serde_json::Value;

fn nil(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("nil").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--format", "json"];
    full.extend(args);
    let (code, out, err) = nil(&full);
    assert_eq!(code, EXIT_OK, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn schema() -> jsonschema::JSONSchema {
    let doc: Value = serde_json::from_str(OUTPUT_SCHEMA).unwrap();
    jsonschema::JSONSchema::compile(&doc).unwrap()
}

#[test]
fn golden_text() {
    let cases: &[(&[&str], &str)] = &[
        (&["mult", "--ideal", "x^2, y^3", "--c", "1"], "generators: x, y\n"),
        (&["lct", "--ideal", "x^2, y^3"], "5/6\n"),
        (&["adj", "--ideal", "x^2, y^3", "--c", "1", "--axis", "x"], "generators: x^2, x*y, y^3\n"),
        (&["jump", "--ideal", "x^2, y^3", "--c-max", "2"], "jumping numbers: 5/6, 7/6, 4/3, 3/2, 5/3, 11/6, 2\n"),
        (&["openness", "--ideal", "x^2, y^3", "--c", "1"], "margin: 1/12\nperturbed c: 13/12\n"),
        (&["mult", "--function", "min(2*x, 3*y)"], "generators: x, y\n"),
    ];
    for (args, want) in cases {
        let (code, out, err) = nil(args);
        assert_eq!(code, EXIT_OK, "{args:?}: {err}");
        assert_eq!(&out, want, "{args:?}");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(nil(&["lct", "--ideal", "x^^2"]).0, EXIT_INPUT);
    assert_eq!(nil(&["mult", "--ideal", "x", "--c", "-1"]).0, EXIT_INPUT);
    assert_eq!(nil(&["frobnicate"]).0, EXIT_INPUT);
    assert_eq!(nil(&["lct", "--ideal", "x", "--c", "1"]).0, EXIT_INPUT);
    assert_eq!(nil(&["--threads", "0", "lct", "--ideal", "x"]).0, EXIT_INPUT);
    assert_eq!(nil(&["--vars", "x,y", "lct", "--ideal", "0"]).0, EXIT_INPUT);
    assert_eq!(nil(&["--help"]).0, EXIT_OK);

    let (code, _, err) = nil(&["adj", "--ideal", "x*y", "--c", "1", "--axis", "x"]);
    assert_eq!(code, EXIT_HYPOTHESIS);
    assert!(err.starts_with("error: "));

    let inconclusive = [
        "oracle", "--ideal", "x^2, y^3", "--c", "1", "--mode", "orthant", "--beta", "0,0", "--schedule", "1,2,2.01,50",
    ];
    let (code, out, _) = nil(&inconclusive);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("verdict: Inconclusive"));
    let strict: Vec<&str> = std::iter::once("--strict").chain(inconclusive).collect();
    assert_eq!(nil(&strict).0, EXIT_INCONCLUSIVE);
}

#[test]
fn json_documents_match_the_schema() {
    let schema = schema();
    let runs: &[&[&str]] = &[
        &["mult", "--ideal", "x^2, y^3", "--c", "5/6"],
        &["mult", "--function", "power(5/2; 1)"],
        &["adj", "--ideal", "x^2, y^3", "--c", "1", "--axis", "x"],
        &["adj0", "--alpha", "1,1", "--k", "6", "--beta", "3,3", "--axis", "x"],
        &["lct", "--ideal", "x^2, y^3"],
        &["jump", "--ideal", "x^2, y^3", "--c-max", "1"],
        &["openness", "--ideal", "x*y, z^4", "--c", "1/2"],
        &["valuation", "--ideal", "x^2, y^3", "--c", "1", "--monomial", "1"],
        &["valuation", "--function", "min(2*x, 3*y)", "--beta", "1,0"],
        &["check-adjunction", "--ideal", "x^2, y^3", "--c", "1", "--axis", "x"],
        &["oracle", "--ideal", "x^2, y^3", "--c", "1", "--mode", "orthant", "--beta", "1,1"],
        &["oracle", "--function", "power(5/2; 1)", "--mode", "radial", "--beta", "2"],
        &["oracle", "--ideal", "x^2, y^3", "--c", "1/2", "--mode", "polydisk", "--beta", "0,0", "--samples", "20000"],
    ];
    for args in runs {
        let v = json(args);
        if let Err(errors) = schema.validate(&v) {
            let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
            panic!("{args:?}: {msgs:?}\n{v:#}");
        };
    }
    let lct = json(&["lct", "--ideal", "x^2, y^3"]);
    assert_eq!(lct["result"]["lct"], "5/6");
    assert_eq!(lct["command"], "lct");
}

#[test]
fn schema_rejects_malformed_documents() {
    let schema = schema();
    let mut v = json(&["lct", "--ideal", "x^2, y^3"]);
    assert!(schema.is_valid(&v));
    v.as_object_mut().unwrap().remove("version");
    assert!(!schema.is_valid(&v));
}

#[test]
fn input_file_with_flag_override() {
    let path = std::env::temp_dir().join(format!("nil-input-{}.json", std::process::id()));
    std::fs::write(
        &path,
        r#"{"command": "mult", "variables": ["x", "y"], "ideal": ["x^2", "y^3"], "c": "1"}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let (code, out, err) = nil(&["--input", p, "mult"]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert_eq!(out, "generators: x, y\n");
    let (_, out, _) = nil(&["--input", p, "mult", "--c", "1/2"]);
    assert_eq!(out, "generators: 1\n");

    std::fs::write(&path, r#"{"ideal": "x", "colour": 1}"#).unwrap();
    assert_eq!(nil(&["--input", p, "lct"]).0, EXIT_INPUT);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(nil(&["--input", p, "lct"]).0, EXIT_INPUT);
}

#[test]
fn color_is_opt_in() {
    let args = ["nil", "mult", "--ideal", "x^2, y^3", "--c", "1"];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(run_styled(args, &mut out, &mut err, true), EXIT_OK);
    assert!(String::from_utf8(out).unwrap().contains('\u{1b}'));

    // The binary never colors piped output.
    let output = Command::new(env!("CARGO_BIN_EXE_nil")).args(&args[1..]).output().unwrap();
    assert_eq!(output.status.code(), Some(EXIT_OK));
    assert_eq!(String::from_utf8(output.stdout).unwrap(), "generators: x, y\n");
    let output = Command::new(env!("CARGO_BIN_EXE_nil"))
        .env("NIL_NO_COLOR", "1")
        .args(["lct", "--ideal", "x^"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(EXIT_INPUT));
    assert!(!String::from_utf8(output.stderr).unwrap().contains('\u{1b}'));
}

#[test]
fn thread_count_does_not_change_results() {
    let base = ["oracle", "--ideal", "x^2, y^3", "--c", "1/2", "--mode", "polydisk", "--beta", "0,0", "--samples", "40000"];
    let one: Vec<&str> = ["--threads", "1"].into_iter().chain(base).collect();
    let four: Vec<&str> = ["--threads", "4"].into_iter().chain(base).collect();
    assert_eq!(json(&one)["result"], json(&four)["result"]);
}

fn ideal_strategy() -> impl Strategy<Value = MonomialIdeal> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::vec(0u32..=7, n), 0..=5)
            .prop_map(move |g| MonomialIdeal::minimalize(n, &g).unwrap())
    })
}

proptest! {
    #[test]
    fn print_parse_round_trip(a in ideal_strategy()) {
        let vars = default_variables(a.dimension());
        let text = format_ideal(&a, &vars);
        prop_assert_eq!(parse_ideal(&text, &vars).unwrap(), a);
    }
}
