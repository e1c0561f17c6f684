//! Command failures and their process exit codes.

use las_core::io::IoError;
use las_core::landscape::LandscapeError;
use las_core::search::SearchError;
use las_core::stats::StatsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("generator failed: {0}")]
    Generator(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("degenerate statistics: {0}")]
    Degenerate(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Generator(_) => 3,
            CliError::Schema(_) => 4,
            CliError::Degenerate(_) => 5,
        }
    }

    pub fn degenerate(metric: &str, e: StatsError) -> CliError {
        CliError::Degenerate(format!("{metric}: {e}"))
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Io { .. } => CliError::Io(e.to_string()),
            IoError::Schema { .. } | IoError::Csv(_) => CliError::Schema(e.to_string()),
        }
    }
}

impl From<LandscapeError> for CliError {
    fn from(e: LandscapeError) -> Self {
        match e {
            LandscapeError::DanglingParent { .. } => CliError::Schema(e.to_string()),
            LandscapeError::NoFeasibleCandidate => CliError::Degenerate(format!("fitness: {e}")),
        }
    }
}

impl From<SearchError> for CliError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::GeneratorExhausted { .. } => CliError::Generator(e.to_string()),
            SearchError::InvalidConfig(_) | SearchError::Task(_) => CliError::Usage(e.to_string()),
            SearchError::EmptyPopulation => CliError::Generator(e.to_string()),
        }
    }
}
