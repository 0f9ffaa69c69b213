//! Commands as they appear in a scenario's task list. The command line
//! builds the same values.

use retrodict::{Direction, Query};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbMode {
    /// `P<-(a|b)`.
    Pred,
    /// `P->(a|b)`.
    Retro,
    /// `P(a)`.
    Prior,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase", deny_unknown_fields)]
pub enum Task {
    Check {
        op: String,
    },
    Kraus {
        op: String,
    },
    Prob {
        mode: ProbMode,
        a: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<String>,
    },
    /// Both directions of the Bayes-type theorem over a resolution given
    /// either as operation references or as an instrument.
    Bayes {
        given: String,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        parts: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        instrument: Option<String>,
    },
    Reverse {
        a: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        b: Option<String>,
    },
    State {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        op: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        instrument: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        event: Option<Vec<String>>,
        #[serde(default = "prior_direction")]
        direction: Direction,
    },
    Simulate {
        sequence: Vec<String>,
        queries: Vec<Query>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trials: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        threads: Option<usize>,
    },
}

fn prior_direction() -> Direction {
    Direction::Prior
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Check { .. } => "check",
            Task::Kraus { .. } => "kraus",
            Task::Prob { .. } => "prob",
            Task::Bayes { .. } => "bayes",
            Task::Reverse { .. } => "reverse",
            Task::State { .. } => "state",
            Task::Simulate { .. } => "simulate",
        }
    }
}
