use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read or write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: not valid JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    /// Malformed input data; the string names the offending field.
    #[error("bad input: {0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] cmc_ladder::Error),
}

impl CliError {
    /// Identifier carried into the machine-readable failure list.
    pub fn id(&self) -> &'static str {
        use cmc_ladder::Error as E;
        match self {
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "input.json",
            CliError::Input(_) => "input.schema",
            CliError::Core(e) => match e {
                E::TruncationExceeded { .. } => "core.truncation-exceeded",
                E::Obstructed => "core.obstructed",
                E::Precondition(_) => "core.precondition",
                E::InvariantViolation(_) => "core.invariant-violation",
                E::TruncationInsufficient { .. } => "core.truncation-insufficient",
                E::EpsilonDependent(_) => "core.epsilon-dependent",
                E::ConstantsNotAdapted(_) => "finite-type.constants-adapted",
                E::DegenerateState(_) => "finite-type.state-regular",
                E::NotCompatible(_) => "finite-type.d2",
                E::StepFailure(_) => "numeric.step",
                E::DegenerateLevel(_) => "finite-type.level",
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
