use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller broke a documented precondition (empty softmax input, bad shapes, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Input data is malformed or unusable (empty corpus, unknown label, ...).
    #[error("invalid data: {0}")]
    Data(String),

    /// A NaN or infinity showed up where a finite value was required.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse {what}: {message}")]
    Parse { what: String, message: String },
}

impl Error {
    pub fn contract(msg: impl fmt::Display) -> Self {
        Error::Contract(msg.to_string())
    }

    pub fn data(msg: impl fmt::Display) -> Self {
        Error::Data(msg.to_string())
    }

    pub fn non_finite(msg: impl fmt::Display) -> Self {
        Error::NonFinite(msg.to_string())
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn parse(what: impl fmt::Display, message: impl fmt::Display) -> Self {
        Error::Parse {
            what: what.to_string(),
            message: message.to_string(),
        }
    }
}
