//! CLI failure classes and their exit codes: bad configuration exits 2,
//! I/O failures exit 3, malformed or degenerate data exits 4.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Data(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::Data(_) => 4,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Io(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

impl From<vegidx::Error> for CliError {
    fn from(e: vegidx::Error) -> Self {
        use vegidx::Error::*;
        let msg = e.to_string();
        match e {
            Io(_) => CliError::Io(msg),
            NonPositiveScale(_) | MissingBand(_) | InvalidBandSet(_) | NegativeL(_)
            | InvalidThresholds { .. } | Parse { .. } | UninvertibleTarget { .. }
            | CountMismatch { .. } => CliError::Config(msg),
            BadMagic { .. } | HeaderMismatch { .. } | UnsupportedDtype(_) | InvalidHeader(_)
            | InvalidGrid(_) | RaggedRows { .. } | NonNumericToken { .. }
            | DimensionMismatch { .. } | DtypeMismatch { .. } | AllNodata | NoOverlap
            | EmptyStats(_) => CliError::Data(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
