//! CLI error kinds mapped onto process exit codes:
//! 2 config error, 3 data error, 4 numerical failure.

use argibbs::{DmhError, KnotError, ModelError};
use std::fmt;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn data(msg: impl Into<String>) -> Self {
        CliError::Data(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        CliError::Numeric(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<DmhError> for CliError {
    fn from(err: DmhError) -> Self {
        match &err {
            DmhError::Knot(_) => CliError::Numeric(err.to_string()),
            DmhError::Model(ModelError::HardCoreViolation { .. }) => {
                CliError::Data(err.to_string())
            }
            DmhError::Model(_) => CliError::Config(err.to_string()),
            DmhError::TooFewPoints => CliError::Data(err.to_string()),
            DmhError::BadInit => CliError::Config(err.to_string()),
            DmhError::BadConfig(_) | DmhError::BadPrior(_) => CliError::Config(err.to_string()),
        }
    }
}

impl From<KnotError> for CliError {
    fn from(err: KnotError) -> Self {
        CliError::Numeric(err.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(err: ModelError) -> Self {
        match err {
            ModelError::HardCoreViolation { .. } => CliError::Data(err.to_string()),
            _ => CliError::Config(err.to_string()),
        }
    }
}
