//! Offspring generation: given an operator and its parents, produce the
//! source text of a new candidate.

mod llm;
mod mock;
mod prompt;

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::Program;
use crate::tasks::TaskSpec;

pub use llm::{extract_code_block, LlmEndpointConfig, LlmError, LlmGenerator};
pub use mock::{mock_generate, MockGenerator, M1_DEPTH, M2_SIGMA};
pub use prompt::build_prompt;

/// The four variation operators. E1/E2 explore, M1/M2 exploit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorKind {
    E1,
    E2,
    M1,
    M2,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 4] = [
        OperatorKind::E1,
        OperatorKind::E2,
        OperatorKind::M1,
        OperatorKind::M2,
    ];

    /// Parents drawn from the population for one application.
    pub fn parent_count(self) -> usize {
        match self {
            OperatorKind::E1 => 5,
            OperatorKind::E2 => 2,
            OperatorKind::M1 | OperatorKind::M2 => 1,
        }
    }

    pub fn is_exploration(self) -> bool {
        matches!(self, OperatorKind::E1 | OperatorKind::E2)
    }

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::E1 => "E1",
            OperatorKind::E2 => "E2",
            OperatorKind::M1 => "M1",
            OperatorKind::M2 => "M2",
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OperatorKind::ALL
            .into_iter()
            .find(|op| op.name() == s)
            .ok_or_else(|| format!("unknown operator `{s}`"))
    }
}

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("{op} expects {expected} parent(s), got {found}")]
    ArityMismatch {
        op: OperatorKind,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Llm(#[from] LlmError),
}

/// Input to one generation call. Parents are canonical programs.
#[derive(Debug, Clone, Copy)]
pub struct GenerationRequest<'a> {
    pub op: OperatorKind,
    pub parents: &'a [Program],
    pub task: &'a TaskSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub code: String,
    pub note: Option<String>,
}

/// Produces offspring source. Implementations must be shareable across
/// threads; the search may issue several requests concurrently.
pub trait Generator: Sync {
    fn name(&self) -> &str;

    fn generate(
        &self,
        request: &GenerationRequest<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Generated, GeneratorError>;
}
