//! Task execution. Each command yields a JSON result and a short text summary.

use std::fmt::Write as _;

use retrodict::{
    bayes_predict, bayes_retrodict, p_pred, p_prior, p_retro, state, state_of_instrument,
    time_reverse, triviality_defects, Direction, KrausSet64, Matrix64, Query, SimConfig,
    Simulator64, Superoperator64,
};
use serde_json::{json, Value};

use crate::error::{CliError, Result};
use crate::scenario::Scenario;
use crate::task::{ProbMode, Task};

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;

/// Command-line overrides applied on top of task fields.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub threads: Option<usize>,
}

pub struct Output {
    pub result: Value,
    pub summary: String,
}

fn core(context: &str) -> impl Fn(retrodict::Error) -> CliError + '_ {
    move |e| CliError::core(context, e)
}

fn matrix_json(m: &Matrix64) -> Value {
    serde_json::to_value(m).expect("matrix serializes")
}

fn kraus_residuals(op: &Superoperator64, set: &KrausSet64) -> Result<(f64, f64)> {
    let reconstruction = set
        .to_superoperator()
        .matrix()
        .max_abs_diff(op.matrix())
        .map_err(core("kraus"))?;
    let adjoint = set
        .adjoint()
        .to_superoperator()
        .matrix()
        .max_abs_diff(op.invol_ud().matrix())
        .map_err(core("kraus"))?;
    Ok((reconstruction, adjoint))
}

pub fn execute(task: &Task, sc: &Scenario, over: Overrides) -> Result<Output> {
    let tol = sc.tol;
    match task {
        Task::Check { op } => {
            let a = sc.resolve(op)?;
            let class = a.classify(tol).map_err(core("check"))?;
            let m = a.invol_diamond();
            // Hermitian part: maps that do not preserve Hermiticity have non-Hermitian Choi matrices.
            let choi = retrodict::hermitian_eig(&Matrix64::from_fn(a.dim() * a.dim(), |r, c| {
                (m.matrix()[(r, c)] + m.matrix()[(c, r)].conj()) * 0.5
            }))
            .map_err(core("check"))?;
            let (unital, tracial) = triviality_defects(&a).map_err(core("check"))?;
            let mut result = json!({
                "op": op,
                "dim": a.dim(),
                "class": class,
                "choi_min_eigenvalue": choi.min(),
                "unital_defect": unital,
                "tracial_defect": tracial,
                "residuals": {},
            });
            if class.cp {
                let set = a.extract_kraus(tol).map_err(core("check"))?;
                let (rec, adj) = kraus_residuals(&a, &set)?;
                result["kraus_rank"] = json!(set.len());
                result["residuals"] = json!({ "kraus_reconstruction": rec, "kraus_adjoint": adj });
            }
            let summary = format!(
                "{op}: positive={} cp={} sub_unital={} sub_tracial={} operation={} trivial={}",
                class.positive,
                class.cp,
                class.sub_unital,
                class.sub_tracial,
                class.operation,
                class.trivial
            );
            Ok(Output { result, summary })
        }
        Task::Kraus { op } => {
            let a = sc.resolve(op)?;
            let set = a.extract_kraus(tol).map_err(core("kraus"))?;
            let (rec, adj) = kraus_residuals(&a, &set)?;
            let operators: Vec<Value> = set.operators().iter().map(matrix_json).collect();
            Ok(Output {
                result: json!({
                    "op": op,
                    "rank": set.len(),
                    "operators": operators,
                    "residuals": { "reconstruction": rec, "adjoint": adj },
                }),
                summary: format!(
                    "{op}: {} Kraus operators, reconstruction error {rec:.3e}",
                    set.len()
                ),
            })
        }
        Task::Prob { mode, a, b } => prob(sc, *mode, a, b.as_deref()),
        Task::Bayes {
            given,
            parts,
            instrument,
        } => bayes(sc, given, parts, instrument.as_deref()),
        Task::Reverse { a, b } => reverse(sc, a, b.as_deref()),
        Task::State {
            op,
            instrument,
            event,
            direction,
        } => {
            let (source, rho) = match (op, instrument) {
                (Some(op), _) => (
                    json!({ "op": op }),
                    state(&sc.resolve(op)?, *direction, tol).map_err(core("state"))?,
                ),
                (None, Some(name)) => {
                    let inst = sc.instrument(name)?;
                    let ev = match event {
                        Some(labels) => inst.event(labels).map_err(core("state"))?,
                        None => inst.all(),
                    };
                    let labels: Vec<&String> =
                        ev.indices().iter().map(|&i| &inst.outcomes()[i]).collect();
                    (
                        json!({ "instrument": name, "event": labels }),
                        state_of_instrument(inst, &ev, *direction, tol).map_err(core("state"))?,
                    )
                }
                (None, None) => {
                    return Err(CliError::Usage("state needs an op or an instrument".into()))
                }
            };
            let mut eig = rho.eigenvalues().map_err(core("state"))?;
            eig.sort_by(|x, y| y.total_cmp(x));
            let tr = rho.matrix().trace();
            let purity = rho.purity();
            let dir = match direction {
                Direction::Prior => "prior",
                Direction::Posterior => "posterior",
            };
            Ok(Output {
                result: json!({
                    "source": source,
                    "direction": direction,
                    "matrix": matrix_json(rho.matrix()),
                    "eigenvalues": eig,
                    "purity": purity,
                    "residuals": {
                        "trace": ((tr.re - 1.0).powi(2) + tr.im.powi(2)).sqrt(),
                        "hermitian": rho.matrix().hermitian_defect(),
                    },
                }),
                summary: format!("{dir} state: eigenvalues {eig:.6?}, purity {purity:.6}"),
            })
        }
        Task::Simulate {
            sequence,
            queries,
            trials,
            seed,
            threads,
        } => simulate(sc, sequence, queries, over, *trials, *seed, *threads),
    }
}

fn prob(sc: &Scenario, mode: ProbMode, a: &str, b: Option<&str>) -> Result<Output> {
    let tol = sc.tol;
    let ctx = "prob";
    let op_a = sc.resolve(a)?;
    let reversed_a = time_reverse(&op_a, tol).map_err(core(ctx))?;
    let (value, mirrored, text) = match (mode, b) {
        (ProbMode::Prior, None) => (
            p_prior(&op_a, tol).map_err(core(ctx))?.value(),
            p_prior(&reversed_a, tol).map_err(core(ctx))?.value(),
            format!("P({a})"),
        ),
        (ProbMode::Prior, Some(_)) => {
            return Err(CliError::Usage(
                "the prior mode takes a single operation".into(),
            ))
        }
        (_, None) => return Err(CliError::Usage("conditional modes need 'b'".into())),
        (mode, Some(b)) => {
            let op_b = sc.resolve(b)?;
            let reversed_b = time_reverse(&op_b, tol).map_err(core(ctx))?;
            if mode == ProbMode::Pred {
                (
                    p_pred(&op_a, &op_b, tol).map_err(core(ctx))?.value(),
                    p_retro(&reversed_a, &reversed_b, tol)
                        .map_err(core(ctx))?
                        .value(),
                    format!("P<-({a}|{b})"),
                )
            } else {
                (
                    p_retro(&op_a, &op_b, tol).map_err(core(ctx))?.value(),
                    p_pred(&reversed_a, &reversed_b, tol)
                        .map_err(core(ctx))?
                        .value(),
                    format!("P->({a}|{b})"),
                )
            }
        }
    };
    let mut result = json!({ "mode": mode, "a": a });
    if let Some(b) = b {
        result["b"] = json!(b);
    }
    result["value"] = json!(value);
    result["residuals"] = json!({ "time_reversal": (value - mirrored).abs() });
    Ok(Output {
        result,
        summary: format!("{text} = {value:.12}"),
    })
}

fn bayes(sc: &Scenario, given: &str, parts: &[String], instrument: Option<&str>) -> Result<Output> {
    let tol = sc.tol;
    let ctx = "bayes";
    let b = sc.resolve(given)?;
    let (labels, ops): (Vec<String>, Vec<Superoperator64>) = match instrument {
        Some(name) => {
            let inst = sc.instrument(name)?;
            (inst.outcomes().to_vec(), inst.ops().to_vec())
        }
        None => (
            parts.to_vec(),
            parts.iter().map(|p| sc.resolve(p)).collect::<Result<_>>()?,
        ),
    };
    if labels.is_empty() {
        return Err(CliError::Usage("bayes needs parts or an instrument".into()));
    }
    let total = Superoperator64::sum(ops.iter()).map_err(core(ctx))?;
    let (unital, tracial) = triviality_defects(&total).map_err(core(ctx))?;
    let mut retro_rows = Vec::new();
    let mut pred_rows = Vec::new();
    let mut max_residual = 0.0f64;
    let mut summary = String::new();
    for (j, (label, a)) in labels.iter().zip(&ops).enumerate() {
        let prior = p_prior(a, tol).map_err(core(ctx))?.value();
        let via_retro = bayes_retrodict(&ops, &b, j, tol)
            .map_err(core(ctx))?
            .value();
        let direct_retro = p_retro(a, &b, tol).map_err(core(ctx))?.value();
        let via_pred = bayes_predict(&ops, &b, j, tol).map_err(core(ctx))?.value();
        let direct_pred = p_pred(a, &b, tol).map_err(core(ctx))?.value();
        let (r1, r2) = (
            (via_retro - direct_retro).abs(),
            (via_pred - direct_pred).abs(),
        );
        max_residual = max_residual.max(r1).max(r2);
        retro_rows.push(json!({
            "part": label, "prior": prior, "bayes": via_retro, "direct": direct_retro, "residual": r1,
        }));
        pred_rows.push(json!({
            "part": label, "prior": prior, "bayes": via_pred, "direct": direct_pred, "residual": r2,
        }));
        let _ = writeln!(
            summary,
            "{label}: P->({label}|{given}) = {via_retro:.12}  P<-({label}|{given}) = {via_pred:.12}"
        );
    }
    Ok(Output {
        result: json!({
            "given": given,
            "parts": labels,
            "sum_defects": { "unital": unital, "tracial": tracial },
            "retrodictive": retro_rows,
            "predictive": pred_rows,
            "residuals": { "max": max_residual },
        }),
        summary: summary.trim_end().to_string(),
    })
}

fn reversed_name(r: &str) -> String {
    if r.contains('*') {
        format!("({r})^")
    } else {
        format!("{r}^")
    }
}

fn reverse(sc: &Scenario, a: &str, b: Option<&str>) -> Result<Output> {
    let tol = sc.tol;
    let ctx = "reverse";
    let op_a = sc.resolve(a)?;
    let rev_a = time_reverse(&op_a, tol).map_err(core(ctx))?;
    let class = rev_a.classify(tol).map_err(core(ctx))?;
    let involution = rev_a
        .invol_ud()
        .matrix()
        .max_abs_diff(op_a.matrix())
        .map_err(core(ctx))?;
    let prior = p_prior(&op_a, tol).map_err(core(ctx))?.value();
    let prior_rev = p_prior(&rev_a, tol).map_err(core(ctx))?.value();
    let mut result = json!({
        "a": a,
        "reversed": { "tensor": matrix_json(rev_a.matrix()) },
        "class": class,
        "prior": { "original": prior, "reversed": prior_rev },
    });
    let mut residuals = json!({ "involution": involution, "prior": (prior - prior_rev).abs() });
    let ra = reversed_name(a);
    let mut summary = format!(
        "{ra}: operation={} P({a}) = {prior:.12} P({ra}) = {prior_rev:.12}",
        class.operation
    );
    if let Some(b) = b {
        let op_b = sc.resolve(b)?;
        let rev_b = time_reverse(&op_b, tol).map_err(core(ctx))?;
        let pred = p_pred(&op_a, &op_b, tol).map_err(core(ctx))?.value();
        let retro = p_retro(&op_a, &op_b, tol).map_err(core(ctx))?.value();
        let retro_rev = p_retro(&rev_a, &rev_b, tol).map_err(core(ctx))?.value();
        let pred_rev = p_pred(&rev_a, &rev_b, tol).map_err(core(ctx))?.value();
        result["b"] = json!(b);
        result["pairs"] = json!({
            "pred": pred, "retro_of_reversed": retro_rev,
            "retro": retro, "pred_of_reversed": pred_rev,
        });
        residuals["pred_vs_reversed_retro"] = json!((pred - retro_rev).abs());
        residuals["retro_vs_reversed_pred"] = json!((retro - pred_rev).abs());
        let _ = write!(
            summary,
            "\nP<-({a}|{b}) = {pred:.12}  P->({ra}|{rb}) = {retro_rev:.12}\nP->({a}|{b}) = {retro:.12}  P<-({ra}|{rb}) = {pred_rev:.12}",
            rb = reversed_name(b)
        );
    }
    result["residuals"] = residuals;
    Ok(Output { result, summary })
}

fn simulate(
    sc: &Scenario,
    sequence: &[String],
    queries: &[Query],
    over: Overrides,
    trials: Option<u64>,
    seed: Option<u64>,
    threads: Option<usize>,
) -> Result<Output> {
    let steps = sequence
        .iter()
        .map(|n| Ok((n.clone(), sc.instrument(n)?.clone())))
        .collect::<Result<Vec<_>>>()?;
    let sim = Simulator64::new(steps, sc.prior.clone(), sc.tol).map_err(core("simulate"))?;
    let trials = over.trials.or(trials).unwrap_or(DEFAULT_TRIALS);
    let seed = over.seed.or(seed).unwrap_or(DEFAULT_SEED);
    let mut config = SimConfig::new(trials, seed);
    if let Some(n) = over.threads.or(threads) {
        config = config.threads(n);
    }
    let reports = sim
        .estimate_many(queries, config)
        .map_err(core("simulate"))?;
    let mut summary = format!(
        "{:<12} {:<12} {:<13} {:>10} {:>12} {:>12} {:>10} {:>10}",
        "condition", "target", "kind", "hits", "empirical", "exact", "abs_err", "std_err"
    );
    for r in &reports {
        let _ = write!(
            summary,
            "\n{:<12} {:<12} {:<13} {:>10} {:>12.6} {:>12.6} {:>10.2e} {:>10.2e}",
            format!("{}:{}", r.condition.step, r.condition.outcome),
            format!("{}:{}", r.target.step, r.target.outcome),
            r.kind,
            r.condition_hits,
            r.empirical,
            r.exact,
            r.abs_err,
            r.std_err
        );
    }
    Ok(Output {
        result: json!({
            "sequence": sequence,
            "trials": trials,
            "seed": seed,
            "reports": reports,
        }),
        summary,
    })
}
