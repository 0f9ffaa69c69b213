mod common;

use retrodict_cli::error::CliError;
use retrodict_cli::scenario::Scenario;
use retrodict_cli::{parse_scenario, resolve_tol, run};
use serde_json::Value;

const TOL: f64 = 1e-9;

fn fixture(name: &str) -> String {
    std::fs::read_to_string(common::crate_dir().join("tests/fixtures").join(name)).unwrap()
}

fn report(args: &[&str]) -> (u8, Value) {
    let mut full = vec!["retrodict", "--json"];
    full.extend_from_slice(args);
    let out = run(full, None);
    (out.code, serde_json::from_str(&out.stdout).unwrap())
}

fn qubit_path() -> String {
    common::crate_dir()
        .join("tests/fixtures/qubit.json")
        .display()
        .to_string()
}

#[test]
fn minimal_scenario_parses() {
    let sc = parse_scenario(
        r#"{"dim":2, "definitions":{"id":{"builder":"unit"}}, "tasks":[]}"#,
        TOL,
    )
    .unwrap();
    assert!(sc.definitions["id"].class.trivial);
}

#[test]
fn non_square_kraus_is_a_validation_error() {
    let err = parse_scenario(&fixture("bad_kraus.json"), TOL).unwrap_err();
    assert!(matches!(err, CliError::Validation { .. }), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn syntax_errors_carry_position() {
    match parse_scenario(&fixture("malformed.json"), TOL).unwrap_err() {
        CliError::Parse { line, column, .. } => assert_eq!((line, column), (5, 3)),
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn fixture_definitions_classify() {
    let sc = parse_scenario(&fixture("qubit.json"), TOL).unwrap();
    for (name, def) in &sc.definitions {
        assert_eq!(def.class.operation, name != "transpose", "{name}");
    }
    assert_eq!(sc.instruments.len(), 3);
    let sc = parse_scenario(&fixture("damping.json"), TOL).unwrap();
    let damping = &sc.definitions["damping"].class;
    assert!(damping.cp && !damping.sub_unital && !damping.operation);
    assert!(sc.definitions["damping_op"].class.operation);
}

#[test]
fn invalid_specs_are_rejected() {
    let bad = [
        r#"{"dim":2,"definitions":{"a":{"builder":"unit","kraus":[]}}}"#,
        r#"{"dim":2,"definitions":{"a":{"builder":"projector"}}}"#,
        r#"{"dim":2,"definitions":{"a":{"builder":"projector","matrix":[[1,1],[0,0]]}}}"#,
        r#"{"dim":2,"definitions":{"a":{"builder":"sum","terms":[{"op":"b"}]}}}"#,
        r#"{"dim":2,"definitions":{"a":{"tensor":[[1,0],[0,1]]}}}"#,
        r#"{"dim":2,"definitions":{"a b":{"builder":"unit"}}}"#,
        r#"{"dim":2,"definitions":{"a":{"builder":"unit"}},"tasks":[{"command":"check","op":"b"}]}"#,
        r#"{"dim":2,"instruments":[{"name":"I","outcomes":{}}]}"#,
        r#"{"dim":2,"prior":[[1,0],[0,1]]}"#,
        r#"{"dim":0}"#,
    ];
    for text in bad {
        let err = parse_scenario(text, TOL).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{text}: {err}");
        assert!(!matches!(err, CliError::Parse { .. }), "{text}: {err}");
    }
    let unknown = r#"{"dim":2,"definitions":{"a":{"builder":"unit","colour":1}}}"#;
    assert!(matches!(
        parse_scenario(unknown, TOL),
        Err(CliError::Parse { .. })
    ));
}

#[test]
fn export_round_trips() {
    for name in ["qubit.json", "damping.json"] {
        let sc = parse_scenario(&fixture(name), TOL).unwrap();
        let again = parse_scenario(&sc.to_json(), TOL).unwrap();
        assert_eq!(sc, again, "{name}");
        assert_eq!(again.to_json(), sc.to_json());
    }
}

#[test]
fn references_compose_and_reverse() {
    let sc: Scenario = parse_scenario(&fixture("qubit.json"), TOL).unwrap();
    let xz = sc.resolve("x+*z+").unwrap();
    let expected = sc.definitions["x+"]
        .op
        .compose(&sc.definitions["z+"].op)
        .unwrap();
    assert_eq!(xz, expected);
    assert_eq!(sc.resolve("h^^").unwrap(), sc.definitions["h"].op);
    assert_eq!(sc.resolve("h^").unwrap(), sc.definitions["h"].op.invol_ud());
    assert!(sc.resolve("x+*").is_err());
}

/// `(a*b)^ = b^*a^`, spelled factor by factor.
fn reversed(r: &str) -> String {
    r.split('*')
        .rev()
        .map(|f| format!("{f}^"))
        .collect::<Vec<_>>()
        .join("*")
}

#[test]
fn reversed_prediction_equals_retrodiction() {
    let path = qubit_path();
    let pairs = [("z+*h", "x+"), ("blend", "y+"), ("x+", "blend")];
    for (a, b) in pairs {
        let (_, retro) = report(&["--scenario", &path, "prob", "--retro", a, b]);
        let (ra, rb) = (reversed(a), reversed(b));
        let (_, pred) = report(&["--scenario", &path, "prob", "--pred", &ra, &rb]);
        let (x, y) = (
            retro["result"]["value"].as_f64().unwrap(),
            pred["result"]["value"].as_f64().unwrap(),
        );
        assert!((x - y).abs() < 1e-12, "{a} {b}: {x} vs {y}");
    }
}

#[test]
fn simulation_is_independent_of_threads() {
    let path = qubit_path();
    let base = [
        "--scenario",
        path.as_str(),
        "simulate",
        "--trials",
        "30000",
        "--seed",
        "5",
    ];
    let one = report(&[&base[..], &["--threads", "1"]].concat()).1;
    let many = report(&[&base[..], &["--threads", "4"]].concat()).1;
    assert_eq!(one["result"], many["result"]);
}

#[test]
fn summary_goes_to_stderr_unless_json() {
    let path = qubit_path();
    let out = run(
        [
            "retrodict",
            "--scenario",
            &path,
            "prob",
            "--pred",
            "x+",
            "z+",
        ],
        None,
    );
    assert_eq!(out.code, 0);
    assert!(out.stderr.contains("0.500000000000"));
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["result"]["value"], 0.5);
    let quiet = run(
        [
            "retrodict",
            "--json",
            "--scenario",
            &path,
            "prob",
            "--pred",
            "x+",
            "z+",
        ],
        None,
    );
    assert!(quiet.stderr.is_empty());
    assert_eq!(quiet.stdout, out.stdout);
}

#[test]
fn help_exits_zero() {
    let out = run(["retrodict", "--help"], None);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("Exit codes"));
}

#[test]
fn tolerance_precedence() {
    assert_eq!(resolve_tol(None, None).unwrap(), 1e-9);
    assert_eq!(resolve_tol(None, Some("1e-6")).unwrap(), 1e-6);
    assert_eq!(resolve_tol(Some(1e-7), Some("1e-6")).unwrap(), 1e-7);
    assert!(resolve_tol(None, Some("tiny")).is_err());
    assert!(resolve_tol(Some(0.0), None).is_err());
    assert!(resolve_tol(Some(f64::NAN), None).is_err());
}

#[test]
fn run_reports_every_task() {
    let path = qubit_path();
    let (code, v) = report(&["--scenario", &path, "run"]);
    assert_eq!(code, 0);
    let sc = parse_scenario(&fixture("qubit.json"), TOL).unwrap();
    assert_eq!(v["tasks"].as_array().unwrap().len(), sc.tasks.len());
    assert_eq!(v["failures"], 0);
    common::check_schema(&v, code).unwrap();
}
