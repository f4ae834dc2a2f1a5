//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong while building diagrams, tableaux or invariants.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed user input (composition, pair, sequence, substitution, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A construction step violated one of the structural guarantees the
    /// algorithms rely on.  This always signals a bug or an illegal request,
    /// never a legitimate outcome.
    #[error("structural integrity violated: {0}")]
    Structural(String),

    /// A reverse-tableau step was refused because the chosen value did not
    /// originate between the two columns of the pair being implemented.
    #[error("hidden rule: {0}")]
    HiddenRule(String),

    /// The requested operation exceeds a configured size bound.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Exact integer arithmetic overflowed its fixed-width representation.
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    /// Filesystem problems while persisting a run.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Shorthand for returning a [`Error::Structural`] error.
macro_rules! structural {
    ($($arg:tt)*) => {
        return Err($crate::error::Error::Structural(format!($($arg)*)))
    };
}
pub(crate) use structural;
