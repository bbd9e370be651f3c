use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition failed: {msg} (witness {witness})")]
    Precondition { msg: String, witness: String },
    #[error("invalid loop: {msg} (witness {witness})")]
    Validation { msg: String, witness: String },
    #[error("enumeration budget exceeded: {states} states > {budget}")]
    Budget { states: f64, budget: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("inadmissible beta0 = {beta0}: condition {condition} fails")]
    Inadmissible { beta0: f64, condition: String },
    #[error("io error: {0}")]
    Io(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
