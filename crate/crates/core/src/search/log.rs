use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::candidate::Candidate;
use crate::generators::OperatorKind;
use crate::tasks::{Fitness, TaskSpec};

pub const SCHEMA_VERSION: &str = "1";

/// How an event's candidate came to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    Init,
    Variation(OperatorKind),
    Import,
}

impl Operator {
    pub fn name(self) -> &'static str {
        match self {
            Operator::Init => "INIT",
            Operator::Variation(op) => op.name(),
            Operator::Import => "IMPORT",
        }
    }

    /// Allowed number of parent ids.
    pub fn accepts_parents(self, n: usize) -> bool {
        match self {
            Operator::Init => n == 0,
            Operator::Import => true,
            Operator::Variation(OperatorKind::E1) => (1..=5).contains(&n),
            Operator::Variation(OperatorKind::E2) => n == 2,
            Operator::Variation(_) => n == 1,
        }
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Operator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "INIT" => Ok(Operator::Init),
            "IMPORT" => Ok(Operator::Import),
            other => other.parse().map(Operator::Variation),
        }
    }
}

impl Serialize for Operator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        name.parse().map_err(serde::de::Error::custom)
    }
}

impl From<OperatorKind> for Operator {
    fn from(op: OperatorKind) -> Self {
        Operator::Variation(op)
    }
}

/// One evaluated candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationEvent {
    pub eval_index: usize,
    pub candidate: Candidate,
    pub operator: Operator,
    pub parent_ids: Vec<String>,
    pub fitness: Fitness,
    pub note: Option<String>,
}

impl GenerationEvent {
    /// Parent ids with duplicates removed, first occurrence order.
    pub fn distinct_parents(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::with_capacity(self.parent_ids.len());
        for id in &self.parent_ids {
            if !out.contains(&id.as_str()) {
                out.push(id);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHeader {
    pub schema_version: String,
    pub task: serde_json::Value,
    pub config: serde_json::Value,
    pub seed: u64,
    pub created_at: String,
}

impl RunHeader {
    /// The task spec, when the header carries one this toolkit understands.
    pub fn task_spec(&self) -> Option<TaskSpec> {
        serde_json::from_value(self.task.clone()).ok()
    }
}

/// Complete, ordered search history.
#[derive(Debug, Clone, PartialEq)]
pub struct RunLog {
    pub header: RunHeader,
    pub events: Vec<GenerationEvent>,
}

impl RunLog {
    /// Minimum finite fitness, ties to the lowest eval_index.
    pub fn best(&self) -> Option<&GenerationEvent> {
        best_event(&self.events)
    }

    pub fn input_vars(&self) -> Option<Vec<String>> {
        self.header
            .task_spec()
            .map(|t| t.input_vars().iter().map(|s| s.to_string()).collect())
    }
}

pub(crate) fn best_event(events: &[GenerationEvent]) -> Option<&GenerationEvent> {
    events
        .iter()
        .filter(|e| e.fitness.feasible)
        .fold(None, |best: Option<&GenerationEvent>, e| match best {
            Some(b) if b.fitness.value <= e.fitness.value => Some(b),
            _ => Some(e),
        })
}
