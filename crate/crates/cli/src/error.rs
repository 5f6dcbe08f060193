use nftrack_core::scenario::ScenarioError;
use nftrack_core::tracker::TrackerError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or invalid scenario or arguments.
    #[error("configuration error: {0}")]
    Config(String),
    /// Well-formed configuration the tracker cannot run with.
    #[error("infeasible configuration: {0}")]
    Infeasible(String),
    #[error(transparent)]
    Runtime(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Tracker(TrackerError::GridCoarserThanSearch { .. })
            | ScenarioError::TrajectoryTooFast { .. } => CliError::Infeasible(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}
