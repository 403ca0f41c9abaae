use crate::io::SchemaError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}: {error}")]
    Schema { file: String, error: SchemaError },

    #[error(transparent)]
    Core(#[from] mudra::Error),

    #[error("unknown case {case:?}; available: {}", available.join(", "))]
    UnknownCase {
        case: String,
        available: Vec<&'static str>,
    },

    #[error("{0}")]
    Usage(String),
}

impl HarnessError {
    /// 2 for guard refusals, 3 for everything else (bad input).
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core(e) if e.is_guard() => 2,
            _ => 3,
        }
    }
}
