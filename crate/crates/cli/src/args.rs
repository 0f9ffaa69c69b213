use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use retrodict::{Direction, Query, StepOutcome};

use crate::task::{ProbMode, Task};

#[derive(Debug, Parser)]
#[command(
    name = "retrodict",
    version,
    about = "Predictive and retrodictive probabilities for quantum operations",
    long_about = "Loads a scenario file of named operations and instruments and evaluates \
                  commands against it. A JSON report goes to standard output; a readable \
                  summary goes to standard error unless --json is given.\n\n\
                  Exit codes: 0 success, 2 invalid input, 3 numerical invariant violation."
)]
pub struct Cli {
    /// Scenario file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub scenario: Option<PathBuf>,
    /// Numerical tolerance; overrides RETRO_OP_TOL (default 1e-9).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tol: Option<f64>,
    /// Simulation seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Simulation trial count.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Suppress the readable summary on standard error.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Validate the scenario and classify every definition.
    Validate,
    /// Print the scenario in resolved form, every operation as a tensor.
    Export,
    /// Run every task listed in the scenario.
    Run,
    /// Classify an operation: positive, completely positive, sub-unital, sub-tracial, trivial.
    Check { op: String },
    /// Kraus operators of a completely positive map.
    Kraus { op: String },
    /// Predictive, retrodictive or unconditional probability.
    Prob(ProbArgs),
    /// Both directions of the Bayes-type theorem over a resolution.
    Bayes(BayesArgs),
    /// Time reversal of an operation, with reversal residuals against `b`.
    Reverse { a: String, b: Option<String> },
    /// Bayesian a priori or a posteriori state.
    State(StateArgs),
    /// Monte Carlo frequencies for a sequence of instruments.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ProbArgs {
    /// P<-(A|B): A right after B.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub pred: Option<Vec<String>>,
    /// P->(A|B): A right before B.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub retro: Option<Vec<String>>,
    /// P(A).
    #[arg(long, value_name = "A")]
    pub prior: Option<String>,
}

#[derive(Debug, Args)]
pub struct BayesArgs {
    /// The conditioning operation.
    #[arg(long)]
    pub given: String,
    /// Comma-separated resolution parts.
    #[arg(
        long,
        value_delimiter = ',',
        required_unless_present = "instrument",
        conflicts_with = "instrument"
    )]
    pub parts: Vec<String>,
    /// Use an instrument's components as the resolution.
    #[arg(long)]
    pub instrument: Option<String>,
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[arg(
        long,
        required_unless_present = "instrument",
        conflicts_with = "instrument"
    )]
    pub op: Option<String>,
    #[arg(long)]
    pub instrument: Option<String>,
    /// Comma-separated outcome labels (default: all outcomes).
    #[arg(long, value_delimiter = ',', requires = "instrument")]
    pub event: Option<Vec<String>>,
    /// The a posteriori state instead of the a priori one.
    #[arg(long)]
    pub posterior: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Comma-separated instrument names in time order. Without it the first
    /// simulate task of the scenario runs.
    #[arg(long, value_delimiter = ',')]
    pub sequence: Option<Vec<String>>,
    /// Conditioning outcome as STEP:LABEL; pairs with --target by position.
    #[arg(long, value_parser = parse_step, requires = "sequence")]
    pub condition: Vec<StepOutcome>,
    /// Target outcome as STEP:LABEL.
    #[arg(long, value_parser = parse_step, requires = "sequence")]
    pub target: Vec<StepOutcome>,
    /// Worker threads (1 runs on the calling thread).
    #[arg(long)]
    pub threads: Option<usize>,
}

fn parse_step(s: &str) -> Result<StepOutcome, String> {
    let (step, label) = s
        .split_once(':')
        .ok_or_else(|| format!("expected STEP:LABEL, got '{s}'"))?;
    let step = step
        .parse()
        .map_err(|e| format!("bad step in '{s}': {e}"))?;
    Ok(StepOutcome::new(step, label))
}

impl ProbArgs {
    pub fn task(&self) -> Task {
        let pair = |v: &Vec<String>| (v[0].clone(), Some(v[1].clone()));
        let (mode, (a, b)) = match (&self.pred, &self.retro, &self.prior) {
            (Some(v), _, _) => (ProbMode::Pred, pair(v)),
            (_, Some(v), _) => (ProbMode::Retro, pair(v)),
            (_, _, Some(a)) => (ProbMode::Prior, (a.clone(), None)),
            _ => unreachable!("clap requires one mode"),
        };
        Task::Prob { mode, a, b }
    }
}

impl BayesArgs {
    pub fn task(&self) -> Task {
        Task::Bayes {
            given: self.given.clone(),
            parts: self.parts.clone(),
            instrument: self.instrument.clone(),
        }
    }
}

impl StateArgs {
    pub fn task(&self) -> Task {
        Task::State {
            op: self.op.clone(),
            instrument: self.instrument.clone(),
            event: self.event.clone(),
            direction: if self.posterior {
                Direction::Posterior
            } else {
                Direction::Prior
            },
        }
    }
}

impl SimulateArgs {
    /// `None` when no sequence was given on the command line.
    pub fn task(&self) -> Result<Option<Task>, String> {
        let Some(sequence) = &self.sequence else {
            return Ok(None);
        };
        if self.condition.len() != self.target.len() {
            return Err("--condition and --target must be given the same number of times".into());
        }
        let queries = self
            .condition
            .iter()
            .zip(&self.target)
            .map(|(c, t)| Query {
                condition: c.clone(),
                target: t.clone(),
            })
            .collect();
        Ok(Some(Task::Simulate {
            sequence: sequence.clone(),
            queries,
            trials: None,
            seed: None,
            threads: None,
        }))
    }
}
