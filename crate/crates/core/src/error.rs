use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An input violated an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A float-mode branch decision fell inside the error radius.
    #[error("tie uncertainty at step {step}")]
    TieUncertainty { step: usize },

    /// The input maps to zero or is otherwise degenerate.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A finite directive prefix ran out before the limit word stabilized.
    #[error("insufficient directive: {0}")]
    InsufficientDirective(String),

    /// Factor counts changed when the prefix was doubled.
    #[error("insufficient prefix: factor set unstable at length {n}")]
    InsufficientPrefix { n: usize },

    #[error("not a factor: {0}")]
    NotAFactor(String),

    #[error("unknown name: {0}")]
    UnknownName(String),

    /// Two independent computations disagreed.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short stable identifier, used by the command-line front end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "Domain",
            Error::TieUncertainty { .. } => "TieUncertainty",
            Error::Degenerate(_) => "Degenerate",
            Error::InsufficientDirective(_) => "InsufficientDirective",
            Error::InsufficientPrefix { .. } => "InsufficientPrefix",
            Error::NotAFactor(_) => "NotAFactor",
            Error::UnknownName(_) => "UnknownName",
            Error::Inconsistency(_) => "Inconsistency",
            Error::Overflow(_) => "Overflow",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
