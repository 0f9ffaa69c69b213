//! Scenario files: a dimension, named operations, instruments, an optional
//! prior for simulation, and a list of tasks.
//!
//! Operation references used by tasks and instruments are products of names
//! joined by `*`, each optionally followed by `^` for time reversal:
//! `a*b^` is `a` composed after the reversal of `b`.

use indexmap::IndexMap;
use retrodict::matcore::wire::RawMatrix;
use retrodict::{
    DensityMatrix64, Instrument64, KrausSet64, Matrix64, OperationClass, Superoperator64,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::task::Task;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Builder {
    Unit,
    Zero,
    /// `A -> P A P` for a projector `P`.
    Projector,
    /// `A -> U A U*`, or `U* A U` with `inverse`.
    Unitary,
    /// `A -> M A M*` for any `M`.
    Conjugation,
    /// Nonnegative combination of other operations.
    Sum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub op: String,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// One of `kraus`, `tensor` or `builder`, with the builder's arguments.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<RawMatrix<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tensor: Option<RawMatrix<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builder: Option<Builder>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<RawMatrix<f64>>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub inverse: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<Term>>,
}

/// An instrument component: a reference or an inline operation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutcomeSpec {
    Ref(String),
    Inline(OpSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstrumentSpec {
    pub name: String,
    pub outcomes: IndexMap<String, OutcomeSpec>,
}

/// The file format, before validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub dim: usize,
    #[serde(default)]
    pub definitions: IndexMap<String, OpSpec>,
    #[serde(default)]
    pub instruments: Vec<InstrumentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<RawMatrix<f64>>,
    #[serde(default)]
    pub tasks: Vec<Task>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Definition {
    pub op: Superoperator64,
    pub class: OperationClass,
}

/// A validated scenario. Every definition has been classified.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub dim: usize,
    pub tol: f64,
    pub definitions: IndexMap<String, Definition>,
    pub instruments: IndexMap<String, Instrument64>,
    pub prior: Option<DensityMatrix64>,
    pub tasks: Vec<Task>,
}

/// Parses and validates scenario text. Definitions may refer to earlier
/// definitions only.
pub fn parse_scenario(text: &str, tol: f64) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Scenario::from_file(file, tol)
}

fn check_name(kind: &str, name: &str) -> Result<()> {
    let bad = name.is_empty()
        || name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '*' | '^' | ','));
    if bad {
        return Err(CliError::validation(
            format!("{kind} '{name}'"),
            "names must be nonempty without whitespace, '*', '^' or ','",
        ));
    }
    Ok(())
}

fn matrix(entity: &str, raw: &RawMatrix<f64>, dim: usize) -> Result<Matrix64> {
    let m = Matrix64::try_from(raw.clone()).map_err(|e| CliError::at(entity, e))?;
    if m.dim() != dim {
        return Err(CliError::validation(
            entity,
            format!("expected a {dim}x{dim} matrix, found {0}x{0}", m.dim()),
        ));
    }
    Ok(m)
}

impl Scenario {
    pub fn from_file(file: ScenarioFile, tol: f64) -> Result<Self> {
        if file.dim == 0 {
            return Err(CliError::validation("scenario", "dim must be at least 1"));
        }
        let mut scenario = Scenario {
            dim: file.dim,
            tol,
            definitions: IndexMap::new(),
            instruments: IndexMap::new(),
            prior: None,
            tasks: Vec::new(),
        };
        for (name, spec) in &file.definitions {
            check_name("definition", name)?;
            let entity = format!("definition '{name}'");
            let op = scenario.build(&entity, spec)?;
            let class = op.classify(tol).map_err(|e| CliError::at(&entity, e))?;
            scenario
                .definitions
                .insert(name.clone(), Definition { op, class });
        }
        for spec in &file.instruments {
            check_name("instrument", &spec.name)?;
            let entity = format!("instrument '{}'", spec.name);
            if scenario.instruments.contains_key(&spec.name) {
                return Err(CliError::validation(entity, "duplicate name"));
            }
            let mut ops = Vec::with_capacity(spec.outcomes.len());
            for (label, outcome) in &spec.outcomes {
                check_name("outcome", label)?;
                let op = match outcome {
                    OutcomeSpec::Ref(r) => scenario.resolve(r),
                    OutcomeSpec::Inline(s) => {
                        scenario.build(&format!("{entity} outcome '{label}'"), s)
                    }
                }?;
                ops.push((label.clone(), op));
            }
            let inst = Instrument64::new(ops, tol).map_err(|e| CliError::at(&entity, e))?;
            scenario.instruments.insert(spec.name.clone(), inst);
        }
        if let Some(raw) = &file.prior {
            let m = matrix("prior", raw, file.dim)?;
            scenario.prior = Some(DensityMatrix64::new(m).map_err(|e| CliError::at("prior", e))?);
        }
        for (i, task) in file.tasks.iter().enumerate() {
            scenario
                .check_task(task)
                .map_err(|e| CliError::validation(format!("task {i} ({})", task.name()), e))?;
        }
        scenario.tasks = file.tasks;
        Ok(scenario)
    }

    fn build(&self, entity: &str, spec: &OpSpec) -> Result<Superoperator64> {
        let given = [
            spec.kraus.is_some(),
            spec.tensor.is_some(),
            spec.builder.is_some(),
        ];
        if given.iter().filter(|&&g| g).count() != 1 {
            return Err(CliError::validation(
                entity,
                "exactly one of 'kraus', 'tensor' or 'builder' is required",
            ));
        }
        let nu = self.dim;
        let core = |e| CliError::at(entity, e);
        if let Some(kraus) = &spec.kraus {
            self.no_builder_args(entity, spec)?;
            let ops = kraus
                .iter()
                .enumerate()
                .map(|(k, raw)| matrix(&format!("{entity} Kraus operator {k}"), raw, nu))
                .collect::<Result<Vec<_>>>()?;
            return Ok(KrausSet64::new(nu, ops).map_err(core)?.to_superoperator());
        }
        if let Some(raw) = &spec.tensor {
            self.no_builder_args(entity, spec)?;
            return matrix(entity, raw, nu * nu)
                .and_then(|m| Superoperator64::from_matrix(nu, m).map_err(core));
        }
        let builder = spec.builder.expect("one field is set");
        let needs_matrix = matches!(
            builder,
            Builder::Projector | Builder::Unitary | Builder::Conjugation
        );
        if needs_matrix != spec.matrix.is_some() {
            return Err(CliError::validation(
                entity,
                if needs_matrix {
                    "this builder requires 'matrix'"
                } else {
                    "'matrix' is not used by this builder"
                },
            ));
        }
        if (builder == Builder::Sum) != spec.terms.is_some() {
            return Err(CliError::validation(
                entity,
                "'terms' goes with the sum builder only",
            ));
        }
        if spec.inverse && builder != Builder::Unitary {
            return Err(CliError::validation(
                entity,
                "'inverse' goes with the unitary builder only",
            ));
        }
        let m = || matrix(entity, spec.matrix.as_ref().expect("checked above"), nu);
        match builder {
            Builder::Unit => Ok(Superoperator64::unit(nu)),
            Builder::Zero => Ok(Superoperator64::zero(nu)),
            Builder::Projector => Superoperator64::projecting(&m()?, self.tol).map_err(core),
            Builder::Unitary if spec.inverse => {
                Superoperator64::unitary_inv(&m()?, self.tol).map_err(core)
            }
            Builder::Unitary => Superoperator64::unitary(&m()?, self.tol).map_err(core),
            Builder::Conjugation => Ok(Superoperator64::conjugation(&m()?)),
            Builder::Sum => {
                let mut acc = Superoperator64::zero(nu);
                for term in spec.terms.as_deref().unwrap_or_default() {
                    let op = self
                        .resolve(&term.op)
                        .map_err(|e| CliError::validation(entity, e))?;
                    acc = acc
                        .add(&op.scale(term.weight).map_err(core)?)
                        .map_err(core)?;
                }
                Ok(acc)
            }
        }
    }

    fn no_builder_args(&self, entity: &str, spec: &OpSpec) -> Result<()> {
        if spec.matrix.is_some() || spec.terms.is_some() || spec.inverse {
            return Err(CliError::validation(
                entity,
                "'matrix', 'terms' and 'inverse' need a builder",
            ));
        }
        Ok(())
    }

    /// Resolves an operation reference such as `a`, `a^` or `a*b^`.
    pub fn resolve(&self, reference: &str) -> Result<Superoperator64> {
        let entity = || format!("reference '{reference}'");
        let mut acc: Option<Superoperator64> = None;
        for factor in reference.split('*') {
            let factor = factor.trim();
            let name = factor.trim_end_matches('^');
            let flips = factor.len() - name.len();
            let def = self.definitions.get(name).ok_or_else(|| {
                CliError::validation(entity(), format!("unknown operation '{name}'"))
            })?;
            let op = if flips % 2 == 1 {
                def.op.invol_ud()
            } else {
                def.op.clone()
            };
            acc = Some(match acc {
                None => op,
                Some(prev) => prev.compose(&op).map_err(|e| CliError::at(entity(), e))?,
            });
        }
        acc.ok_or_else(|| CliError::validation(entity(), "empty reference"))
    }

    pub fn instrument(&self, name: &str) -> Result<&Instrument64> {
        self.instruments
            .get(name)
            .ok_or_else(|| CliError::validation(format!("instrument '{name}'"), "not defined"))
    }

    /// Checks that every reference in `task` resolves.
    pub fn check_task(&self, task: &Task) -> Result<()> {
        let refs: Vec<&String> = match task {
            Task::Check { op } | Task::Kraus { op } => vec![op],
            Task::Prob { a, b, .. } | Task::Reverse { a, b } => {
                std::iter::once(a).chain(b).collect()
            }
            Task::Bayes {
                given,
                parts,
                instrument,
            } => {
                if parts.is_empty() == instrument.is_none() {
                    return Err(CliError::Usage(
                        "give exactly one of 'parts' or 'instrument'".into(),
                    ));
                }
                if let Some(name) = instrument {
                    self.instrument(name)?;
                }
                std::iter::once(given).chain(parts).collect()
            }
            Task::State {
                op,
                instrument,
                event,
                ..
            } => {
                match (op, instrument) {
                    (Some(_), None) if event.is_none() => {}
                    (None, Some(name)) => {
                        let inst = self.instrument(name)?;
                        if let Some(labels) = event {
                            inst.event(labels)
                                .map_err(|e| CliError::at(format!("instrument '{name}'"), e))?;
                        }
                    }
                    _ => {
                        return Err(CliError::Usage(
                            "give either 'op' or 'instrument' (with optional 'event')".into(),
                        ))
                    }
                }
                op.iter().collect()
            }
            Task::Simulate {
                sequence, queries, ..
            } => {
                if sequence.is_empty() {
                    return Err(CliError::Usage("empty instrument sequence".into()));
                }
                let insts = sequence
                    .iter()
                    .map(|n| self.instrument(n))
                    .collect::<Result<Vec<_>>>()?;
                for q in queries {
                    for so in [&q.condition, &q.target] {
                        let inst = insts.get(so.step).ok_or_else(|| {
                            CliError::Usage(format!("step {} is past the sequence end", so.step))
                        })?;
                        inst.index_of(&so.outcome)
                            .map_err(|e| CliError::at(format!("step {}", so.step), e))?;
                    }
                }
                Vec::new()
            }
        };
        for r in refs {
            self.resolve(r)?;
        }
        Ok(())
    }

    /// The resolved form: every operation written as a tensor. Parsing the
    /// result gives back an equal scenario.
    pub fn to_file(&self) -> ScenarioFile {
        let tensor = |op: &Superoperator64| OpSpec {
            tensor: Some(RawMatrix::from(op.matrix())),
            ..OpSpec::default()
        };
        ScenarioFile {
            dim: self.dim,
            definitions: self
                .definitions
                .iter()
                .map(|(name, def)| (name.clone(), tensor(&def.op)))
                .collect(),
            instruments: self
                .instruments
                .iter()
                .map(|(name, inst)| InstrumentSpec {
                    name: name.clone(),
                    outcomes: inst
                        .outcomes()
                        .iter()
                        .zip(inst.ops())
                        .map(|(l, op)| (l.clone(), OutcomeSpec::Inline(tensor(op))))
                        .collect(),
                })
                .collect(),
            prior: self.prior.as_ref().map(|p| RawMatrix::from(p.matrix())),
            tasks: self.tasks.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("scenario serializes")
    }
}
