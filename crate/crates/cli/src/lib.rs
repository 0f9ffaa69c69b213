//! Command line front end: scenario loading, command dispatch and JSON reports.

pub mod args;
pub mod commands;
pub mod error;
pub mod scenario;
pub mod task;

use std::ffi::OsString;

use clap::Parser;
use serde_json::{json, Value};

use crate::args::{Cli, CliCommand};
use crate::commands::{execute, Overrides};
use crate::error::{CliError, Result};
use crate::scenario::Scenario;
use crate::task::Task;

pub use crate::scenario::parse_scenario;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const TOL_ENV: &str = "RETRO_OP_TOL";

/// What a run printed and how it exited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

/// `--tol`, then the environment value, then the default.
pub fn resolve_tol(flag: Option<f64>, env: Option<&str>) -> Result<f64> {
    let tol = match (flag, env) {
        (Some(t), _) => t,
        (None, Some(s)) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{TOL_ENV}={s} is not a number")))?,
        (None, None) => DEFAULT_TOL,
    };
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliError::Usage(format!(
            "tolerance must be positive and finite, got {tol}"
        )));
    }
    Ok(tol)
}

fn error_json(e: &CliError) -> Value {
    json!({ "kind": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() })
}

fn envelope(command: &str, tol: Option<f64>, outcome: &Result<Value>) -> Value {
    let mut v = json!({ "command": command, "tolerance": tol });
    match outcome {
        Ok(result) => v["result"] = result.clone(),
        Err(e) => v["error"] = error_json(e),
    }
    v
}

fn load(cli: &Cli, tol: f64) -> Result<Scenario> {
    let path = cli
        .scenario
        .as_ref()
        .ok_or_else(|| CliError::Usage("--scenario is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_scenario(&text, tol)
}

fn validate_report(sc: &Scenario) -> Result<(Value, String)> {
    let mut defs = serde_json::Map::new();
    let mut summary = format!("dimension {}", sc.dim);
    for (name, def) in &sc.definitions {
        defs.insert(name.clone(), json!(def.class));
        summary.push_str(&format!("\n{name}: operation={}", def.class.operation));
    }
    let mut insts = serde_json::Map::new();
    for (name, inst) in &sc.instruments {
        let (u, t) = retrodict::triviality_defects(&inst.total())
            .map_err(|e| CliError::core("validate", e))?;
        insts.insert(
            name.clone(),
            json!({ "outcomes": inst.outcomes(), "sum_defects": { "unital": u, "tracial": t } }),
        );
        summary.push_str(&format!("\n{name}: {} outcomes", inst.len()));
    }
    Ok((
        json!({
            "dim": sc.dim,
            "definitions": defs,
            "instruments": insts,
            "prior": sc.prior.as_ref().map(|p| serde_json::to_value(p.matrix()).expect("serializes")),
            "tasks": sc.tasks.len(),
        }),
        summary,
    ))
}

struct Report {
    json: Value,
    summary: String,
    code: u8,
}

fn run_task(task: &Task, sc: &Scenario, over: Overrides) -> Report {
    let out = execute(task, sc, over);
    let code = out.as_ref().err().map_or(0, CliError::exit_code);
    let summary = match &out {
        Ok(o) => o.summary.clone(),
        Err(e) => format!("error: {e}"),
    };
    let result = out.map(|o| o.result);
    Report {
        json: envelope(task.name(), Some(sc.tol), &result),
        summary,
        code,
    }
}

fn dispatch(cli: &Cli, env_tol: Option<&str>) -> Report {
    let name = match &cli.command {
        CliCommand::Validate => "validate",
        CliCommand::Export => "export",
        CliCommand::Run => "run",
        CliCommand::Check { .. } => "check",
        CliCommand::Kraus { .. } => "kraus",
        CliCommand::Prob(_) => "prob",
        CliCommand::Bayes(_) => "bayes",
        CliCommand::Reverse { .. } => "reverse",
        CliCommand::State(_) => "state",
        CliCommand::Simulate(_) => "simulate",
    };
    let fail = |tol: Option<f64>, e: CliError| {
        let summary = format!("error: {e}");
        let code = e.exit_code();
        Report {
            json: envelope(name, tol, &Err(e)),
            summary,
            code,
        }
    };
    let tol = match resolve_tol(cli.tol, env_tol) {
        Ok(t) => t,
        Err(e) => return fail(None, e),
    };
    let sc = match load(cli, tol) {
        Ok(sc) => sc,
        Err(e) => return fail(Some(tol), e),
    };
    let over = Overrides {
        seed: cli.seed,
        trials: cli.trials,
        threads: None,
    };
    let task = match &cli.command {
        CliCommand::Validate => {
            return match validate_report(&sc) {
                Ok((result, summary)) => Report {
                    json: envelope(name, Some(tol), &Ok(result)),
                    summary,
                    code: 0,
                },
                Err(e) => fail(Some(tol), e),
            }
        }
        CliCommand::Export => {
            return Report {
                json: serde_json::to_value(sc.to_file()).expect("scenario serializes"),
                summary: String::new(),
                code: 0,
            }
        }
        CliCommand::Run => {
            let reports: Vec<Report> = sc.tasks.iter().map(|t| run_task(t, &sc, over)).collect();
            let code = reports.iter().map(|r| r.code).max().unwrap_or(0);
            let failures = reports.iter().filter(|r| r.code != 0).count();
            let summary = reports
                .iter()
                .enumerate()
                .map(|(i, r)| format!("[{i}] {}", r.summary))
                .collect::<Vec<_>>()
                .join("\n");
            let tasks: Vec<Value> = reports.into_iter().map(|r| r.json).collect();
            return Report {
                json: json!({ "command": name, "tolerance": tol, "tasks": tasks, "failures": failures }),
                summary,
                code,
            };
        }
        CliCommand::Check { op } => Task::Check { op: op.clone() },
        CliCommand::Kraus { op } => Task::Kraus { op: op.clone() },
        CliCommand::Prob(p) => p.task(),
        CliCommand::Bayes(b) => b.task(),
        CliCommand::Reverse { a, b } => Task::Reverse {
            a: a.clone(),
            b: b.clone(),
        },
        CliCommand::State(s) => s.task(),
        CliCommand::Simulate(s) => match s.task() {
            Err(msg) => return fail(Some(tol), CliError::Usage(msg)),
            Ok(Some(t)) => t,
            Ok(None) => match sc.tasks.iter().find(|t| matches!(t, Task::Simulate { .. })) {
                Some(t) => t.clone(),
                None => {
                    return fail(
                        Some(tol),
                        CliError::Usage(
                            "no --sequence given and the scenario has no simulate task".into(),
                        ),
                    )
                }
            },
        },
    };
    let over = match &cli.command {
        CliCommand::Simulate(s) => Overrides {
            threads: s.threads,
            ..over
        },
        _ => over,
    };
    if let Err(e) = sc.check_task(&task) {
        return fail(Some(tol), e);
    }
    run_task(&task, &sc, over)
}

/// Parses `args` (program name first), runs the command and collects output.
pub fn run<I, T>(args: I, env_tol: Option<&str>) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                Invocation {
                    code: 0,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                let err = CliError::Usage(e.kind().to_string());
                let json = json!({ "command": null, "tolerance": null, "error": error_json(&err) });
                Invocation {
                    code: 2,
                    stdout: format!(
                        "{}\n",
                        serde_json::to_string_pretty(&json).expect("serializes")
                    ),
                    stderr: rendered,
                }
            };
        }
    };
    let report = dispatch(&cli, env_tol);
    let mut stderr = String::new();
    if !cli.json && !report.summary.is_empty() {
        stderr = format!("{}\n", report.summary);
    }
    Invocation {
        code: report.code,
        stdout: format!(
            "{}\n",
            serde_json::to_string_pretty(&report.json).expect("serializes")
        ),
        stderr,
    }
}
