use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A text format could not be parsed. `line` is 1-based.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The requested dense representation would exceed the supported size.
    #[error("{what}: {n} variables exceeds the limit of {limit}{hint}")]
    Capacity {
        what: &'static str,
        n: usize,
        limit: usize,
        hint: &'static str,
    },

    #[error("variable index {var} out of range for {n} variables")]
    VariableOutOfRange { var: usize, n: usize },

    #[error("output index {index} out of range for {n_outputs} outputs")]
    OutputOutOfRange { index: usize, n_outputs: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("terms are at distance {got}, rule needs distance {expected}")]
    Distance { expected: usize, got: usize },

    #[error("term {0} is not part of the expression")]
    MissingTerm(String),

    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
