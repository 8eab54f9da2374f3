use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid {field}: {message}")]
    Invalid { field: String, message: String },

    #[error("budget exceeded: {what} needs {required}, limit is {limit}")]
    Budget {
        what: String,
        required: u128,
        limit: u128,
    },

    #[error("search limit reached after {nodes} nodes (best entropy so far {best:.6})")]
    SearchLimit { nodes: u64, best: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid coloring: {0}")]
    InvalidColoring(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn budget(what: impl Into<String>, required: u128, limit: u128) -> Self {
        Error::Budget {
            what: what.into(),
            required,
            limit,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. } | Error::SearchLimit { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
