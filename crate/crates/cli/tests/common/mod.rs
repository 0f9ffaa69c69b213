#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

/// One end-to-end invocation of the binary and its expected exit code.
pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub env_tol: Option<&'static str>,
    pub code: u8,
}

const fn case(name: &'static str, args: &'static [&'static str], code: u8) -> Case {
    Case {
        name,
        args,
        env_tol: None,
        code,
    }
}

const QUBIT: &str = "tests/fixtures/qubit.json";
const DAMPING: &str = "tests/fixtures/damping.json";

pub fn cases() -> Vec<Case> {
    vec![
        case("validate_qubit", &["--scenario", QUBIT, "validate"], 0),
        case("export_qubit", &["--scenario", QUBIT, "export"], 0),
        case("run_qubit", &["--scenario", QUBIT, "run"], 0),
        case("run_damping", &["--scenario", DAMPING, "run"], 0),
        case(
            "check_damping",
            &["--scenario", DAMPING, "check", "damping"],
            0,
        ),
        case(
            "check_transpose",
            &["--scenario", QUBIT, "check", "transpose"],
            0,
        ),
        case(
            "kraus_damping",
            &["--scenario", DAMPING, "kraus", "damping"],
            0,
        ),
        case(
            "prob_pred",
            &["--scenario", QUBIT, "prob", "--pred", "x+", "z+"],
            0,
        ),
        case(
            "prob_retro",
            &["--scenario", QUBIT, "prob", "--retro", "z+", "x+"],
            0,
        ),
        case(
            "prob_prior_composite",
            &["--scenario", QUBIT, "prob", "--prior", "x+*z+"],
            0,
        ),
        case(
            "bayes_instrument",
            &[
                "--scenario",
                QUBIT,
                "bayes",
                "--given",
                "x+",
                "--instrument",
                "Z",
            ],
            0,
        ),
        case(
            "bayes_parts",
            &[
                "--scenario",
                QUBIT,
                "bayes",
                "--given",
                "z+",
                "--parts",
                "x+,x-",
            ],
            0,
        ),
        case(
            "reverse_pair",
            &["--scenario", DAMPING, "reverse", "damping_op", "z+"],
            0,
        ),
        case(
            "state_instrument",
            &[
                "--scenario",
                QUBIT,
                "state",
                "--instrument",
                "Z",
                "--event",
                "+",
            ],
            0,
        ),
        case(
            "state_posterior",
            &[
                "--scenario",
                DAMPING,
                "state",
                "--op",
                "damping_op",
                "--posterior",
            ],
            0,
        ),
        case(
            "simulate_flags",
            &[
                "--scenario",
                QUBIT,
                "simulate",
                "--sequence",
                "Z,X",
                "--condition",
                "1:+",
                "--target",
                "0:+",
                "--trials",
                "20000",
                "--seed",
                "7",
            ],
            0,
        ),
        case(
            "simulate_task",
            &[
                "--scenario",
                QUBIT,
                "simulate",
                "--trials",
                "5000",
                "--threads",
                "3",
            ],
            0,
        ),
        Case {
            name: "env_tolerance",
            args: &["--scenario", QUBIT, "prob", "--prior", "z+"],
            env_tol: Some("1e-6"),
            code: 0,
        },
        Case {
            name: "flag_beats_env_tolerance",
            args: &[
                "--scenario",
                QUBIT,
                "--tol",
                "1e-7",
                "prob",
                "--prior",
                "z+",
            ],
            env_tol: Some("1e-6"),
            code: 0,
        },
        case(
            "error_bad_kraus",
            &["--scenario", "tests/fixtures/bad_kraus.json", "validate"],
            2,
        ),
        case(
            "error_malformed",
            &["--scenario", "tests/fixtures/malformed.json", "validate"],
            2,
        ),
        case(
            "error_not_instrument",
            &[
                "--scenario",
                "tests/fixtures/not_instrument.json",
                "validate",
            ],
            2,
        ),
        case(
            "error_missing_file",
            &["--scenario", "tests/fixtures/missing.json", "validate"],
            2,
        ),
        case("error_no_scenario", &["check", "z+"], 2),
        case(
            "error_unknown_reference",
            &["--scenario", QUBIT, "prob", "--pred", "nope", "z+"],
            2,
        ),
        case(
            "error_not_cp",
            &["--scenario", QUBIT, "kraus", "transpose"],
            2,
        ),
        case(
            "error_not_operation",
            &["--scenario", QUBIT, "prob", "--prior", "transpose"],
            2,
        ),
        case(
            "error_zero_condition",
            &["--scenario", QUBIT, "prob", "--pred", "z+", "zero"],
            2,
        ),
        case("error_usage", &["--scenario", QUBIT, "bogus"], 2),
        case(
            "error_bad_tolerance",
            &["--scenario", QUBIT, "--tol", "-1", "check", "z+"],
            2,
        ),
        case(
            "error_numerical",
            &[
                "--scenario",
                "tests/fixtures/oversized.json",
                "--tol",
                "1.5",
                "prob",
                "--pred",
                "big",
                "big",
            ],
            3,
        ),
    ]
}

pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Runs the binary from the crate directory with `--json`.
pub fn invoke(args: &[&str], env_tol: Option<&str>) -> (u8, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_retrodict"));
    cmd.current_dir(crate_dir()).args(args).arg("--json");
    cmd.env_remove("RETRO_OP_TOL");
    if let Some(t) = env_tol {
        cmd.env("RETRO_OP_TOL", t);
    }
    let out = cmd.output().expect("binary runs");
    let code = out.status.code().expect("exit code") as u8;
    (
        code,
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

/// Structural equality with numbers compared at `1e-9` absolute plus
/// relative slack.
pub fn json_close(actual: &Value, expected: &Value, path: &str) -> Result<(), String> {
    match (actual, expected) {
        (Value::Number(a), Value::Number(e)) => {
            let (a, e) = (a.as_f64().unwrap(), e.as_f64().unwrap());
            if (a - e).abs() <= 1e-9 * (1.0 + e.abs()) {
                Ok(())
            } else {
                Err(format!("{path}: {a} != {e}"))
            }
        }
        (Value::Array(a), Value::Array(e)) => {
            if a.len() != e.len() {
                return Err(format!("{path}: length {} != {}", a.len(), e.len()));
            }
            a.iter()
                .zip(e)
                .enumerate()
                .try_for_each(|(i, (x, y))| json_close(x, y, &format!("{path}[{i}]")))
        }
        (Value::Object(a), Value::Object(e)) => {
            let (ka, ke): (Vec<_>, Vec<_>) = (a.keys().collect(), e.keys().collect());
            if ka != ke {
                return Err(format!("{path}: keys {ka:?} != {ke:?}"));
            }
            a.iter()
                .try_for_each(|(k, v)| json_close(v, &e[k], &format!("{path}.{k}")))
        }
        (a, e) if a == e => Ok(()),
        (a, e) => Err(format!("{path}: {a} != {e}")),
    }
}

/// The report envelope: `command`, `tolerance` and exactly one of `result`
/// or `error`, or for `run` a list of task envelopes.
pub fn check_schema(v: &Value, code: u8) -> Result<(), String> {
    let obj = v.as_object().ok_or("report is not an object")?;
    if obj.contains_key("dim") && obj.contains_key("definitions") {
        return Ok(()); // export prints a scenario
    }
    for key in ["command", "tolerance"] {
        if !obj.contains_key(key) {
            return Err(format!("missing '{key}'"));
        }
    }
    if let Some(tasks) = obj.get("tasks") {
        let tasks = tasks.as_array().ok_or("'tasks' is not an array")?;
        let failures = tasks.iter().filter(|t| t.get("error").is_some()).count();
        if obj.get("failures").and_then(Value::as_u64) != Some(failures as u64) {
            return Err("'failures' does not count failed tasks".into());
        }
        for t in tasks {
            let c = t
                .get("error")
                .and_then(|e| e["exit_code"].as_u64())
                .unwrap_or(0) as u8;
            check_schema(t, c)?;
        }
        return Ok(());
    }
    match (obj.get("result"), obj.get("error")) {
        (Some(r), None) if code == 0 => {
            if r.get("residuals").is_none()
                && obj["command"] != "validate"
                && obj["command"] != "simulate"
            {
                return Err("result lacks 'residuals'".into());
            }
            Ok(())
        }
        (None, Some(e)) if code != 0 => {
            for key in ["kind", "message", "exit_code"] {
                if e.get(key).is_none() {
                    return Err(format!("error lacks '{key}'"));
                }
            }
            if e["exit_code"].as_u64() != Some(u64::from(code)) {
                return Err(format!(
                    "error exit_code {} != process code {code}",
                    e["exit_code"]
                ));
            }
            Ok(())
        }
        _ => Err(format!(
            "expected exactly one of result/error for exit code {code}"
        )),
    }
}

pub fn golden_path(name: &str) -> PathBuf {
    crate_dir()
        .join("tests/golden")
        .join(format!("{name}.json"))
}

/// Runs a case and checks exit code, schema and golden output.
/// `UPDATE_GOLDEN=1` rewrites the golden file instead of comparing.
pub fn check_case(case: &Case) -> Result<(), String> {
    let (code, stdout, stderr) = invoke(case.args, case.env_tol);
    if code != case.code {
        return Err(format!(
            "exit code {code}, expected {}; stderr: {stderr}",
            case.code
        ));
    }
    let actual: Value =
        serde_json::from_str(&stdout).map_err(|e| format!("stdout is not JSON: {e}"))?;
    check_schema(&actual, code)?;
    let path = golden_path(case.name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &stdout).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = read_json(&path)?;
    json_close(&actual, &expected, "$")
}

pub fn read_json(path: &Path) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}
