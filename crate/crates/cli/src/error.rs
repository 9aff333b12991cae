use std::fmt;

/// Process exit codes.
pub const USAGE: u8 = 1;
pub const INPUT: u8 = 2;
pub const GUARD: u8 = 3;
pub const CHECK_FAILED: u8 = 4;

/// An error tagged with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub source: anyhow::Error,
}

impl CliError {
    pub fn new(code: u8, source: impl Into<anyhow::Error>) -> Self {
        CliError { code, source: source.into() }
    }

    pub fn usage(msg: impl fmt::Display) -> Self {
        CliError::new(USAGE, anyhow::anyhow!("{msg}"))
    }

    pub fn input(msg: impl fmt::Display) -> Self {
        CliError::new(INPUT, anyhow::anyhow!("{msg}"))
    }

    pub fn context(self, msg: impl fmt::Display + Send + Sync + 'static) -> Self {
        CliError { code: self.code, source: self.source.context(msg) }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

impl From<facloc::Error> for CliError {
    fn from(e: facloc::Error) -> Self {
        let code = match &e {
            facloc::Error::Guard { .. } => GUARD,
            facloc::Error::Construction(_) => CHECK_FAILED,
            _ => INPUT,
        };
        CliError::new(code, e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(INPUT, e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::new(INPUT, e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::new(INPUT, e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
