use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid preference profile: {0}")]
    InvalidProfile(String),

    /// Matrix or vector shape does not match the instance.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("infeasible random assignment: {0}")]
    Infeasible(Box<Violation>),

    #[error("not a permutation: {0}")]
    NotBijection(String),

    #[error("discrete assignment is unbalanced (bundle sizes {0:?})")]
    Unbalanced(Vec<usize>),

    #[error("unknown object {0:?}")]
    UnknownObject(String),

    #[error("{what} would need {needed} cases, over the guard of {guard}")]
    GuardExceeded {
        what: &'static str,
        needed: String,
        guard: u64,
    },

    #[error("exact random priority infeasible: {agents} agents exceeds the cap of {cap}")]
    RandomPriorityInfeasible { agents: usize, cap: usize },

    #[error("{0} does not support relaxed instances (m not a multiple of n)")]
    RelaxedUnsupported(&'static str),

    #[error("malformed linear program: {0}")]
    MalformedLp(String),

    /// Something that valid input can never trigger.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::GuardExceeded { .. } | Error::RandomPriorityInfeasible { .. }
        )
    }
}
