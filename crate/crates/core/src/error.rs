use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-domain input.
    #[error("invalid input: {0}")]
    Input(String),

    /// The request exceeds what an engine is configured to handle.
    #[error("{engine}: resource cap exceeded: {detail}")]
    Resource { engine: &'static str, detail: String },

    /// A measurement record that occurs with probability zero.
    #[error("measurement outcome {outcome:?} has zero probability")]
    ZeroProbabilityOutcome { outcome: Vec<u8> },

    /// Two engines disagree beyond tolerance.
    #[error("engine disagreement: {0}")]
    Consistency(String),

    /// Circuit text could not be parsed.
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn resource(engine: &'static str, detail: impl Into<String>) -> Self {
        Error::Resource {
            engine,
            detail: detail.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
