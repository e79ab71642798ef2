use thiserror::Error;

use crate::machine::UnitarityReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A located syntax error in a machine file, an amplitude expression or an
/// input superposition. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),

    /// The machine definition breaks a structural rule (state classes,
    /// rule signatures, duplicate rows).
    #[error("malformed machine: {0}")]
    Structure(String),

    #[error("machine has no transition for ({state}, {symbol})")]
    Incomplete { state: String, symbol: String },

    #[error("machine violates the local unitary conditions:\n{0}")]
    NotUnitary(Box<UnitarityReport>),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    /// A configuration whose (state, current symbol) pair lies outside the
    /// domain of every transition function.
    #[error("protocol violation: {0}")]
    Protocol(String),

    #[error("cannot normalize the zero vector")]
    ZeroNorm,

    #[error("invalid input superposition: {0}")]
    Input(String),

    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("run tree exceeds the branch cap of {cap} live runs")]
    BranchCap { cap: usize },

    #[error("not a B&V machine:\n{0}")]
    NotBv(String),
}
