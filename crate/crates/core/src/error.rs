use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the pipeline can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },

    #[error("{line}:{col}: undeclared variable `{name}`")]
    UndeclaredVariable {
        line: usize,
        col: usize,
        name: String,
    },

    #[error("{line}:{col}: {message}")]
    MixedSorts {
        line: usize,
        col: usize,
        message: String,
    },

    #[error("unsupported fragment: {0}")]
    UnsupportedFragment(String),

    /// A precondition of an operation was not met by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("failed to spawn solver `{command}`: {source}")]
    SolverSpawn {
        command: String,
        #[source]
        source: std::io::Error,
    },

    #[error("solver protocol error: {0}")]
    SolverProtocol(String),

    #[error("solver timed out after {0} ms")]
    SolverTimeout(u64),

    #[error("solver answered unknown")]
    SolverUnknown,

    #[error("Boolean abstraction aborted: {0}")]
    AbstractionAborted(String),

    #[error("no partition matches reaction {reaction} of input {input}")]
    AbstractionIncomplete { input: String, reaction: String },

    #[error("state space of {states} states exceeds the cap of {cap}")]
    StateSpaceTooLarge { states: u128, cap: u64 },

    /// The environment wins; `trap` is a sequence of partition indices that
    /// drives the system out of the winning region.
    #[error("specification is not realizable (environment trap: {trap:?})")]
    NotRealizable { trap: Vec<usize> },

    #[error("provider found no model for cube {cube}: {detail}")]
    ProviderUnsat { cube: u32, detail: String },

    #[error("window too small: {0}")]
    WindowTooSmall(String),

    #[error("invalid policy: {0}")]
    Policy(String),

    #[error("invalid artifact: {0}")]
    Artifact(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    /// True for solver answers that leave the verdict undetermined.
    pub fn is_inconclusive(&self) -> bool {
        matches!(
            self,
            Error::SolverUnknown | Error::SolverTimeout(_) | Error::AbstractionAborted(_)
        )
    }
}
