use std::fmt;

/// Process exit codes.
pub mod code {
    pub const IO: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const INPUT: u8 = 3;
    pub const NUMERIC: u8 = 4;
    pub const CAP: u8 = 5;
    pub const CASCADE: u8 = 6;
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: code::USAGE,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: code::INPUT,
            message: message.into(),
        }
    }

    /// Classifies an error raised while reading or building the input matrix.
    pub fn loading(err: csemb::Error) -> Self {
        match err {
            csemb::Error::InvalidInput(_) | csemb::Error::DimensionMismatch { .. } => Self::input(err.to_string()),
            other => other.into(),
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self {
            code: code::IO,
            message: format!("{}: {err}", path.display()),
        }
    }
}

impl From<csemb::Error> for CliError {
    fn from(err: csemb::Error) -> Self {
        use csemb::Error as E;
        let code = match &err {
            E::Io(_) => code::IO,
            E::Parse { .. } => code::INPUT,
            E::InvalidFunction { .. } | E::InvalidInput(_) | E::DimensionMismatch { .. } => code::USAGE,
            E::NonFinite { .. } | E::OracleResidual { .. } => code::NUMERIC,
            E::OracleCapExceeded { .. } => code::CAP,
            E::CascadeNotDivisor { .. } => code::CASCADE,
        };
        let message = match &err {
            E::OracleCapExceeded { .. } => format!("{err}; the exact oracle is for desk-scale checks only"),
            _ => err.to_string(),
        };
        Self { code, message }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        Self::input(format!("invalid JSON: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub type CliResult<T> = Result<T, CliError>;
