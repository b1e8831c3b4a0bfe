use std::path::PathBuf;

use locifs::beta::BetaError;
use locifs::config::ConfigError;
use locifs::shadowing::ShadowError;
use locifs::stability::StabilityError;
use locifs::{GeometryError, IfsError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    NotConverged(String),
    /// Carries the summary line of the negative result.
    #[error("assertion: {0}")]
    Negative(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::NotConverged(_) => 3,
            CliError::Negative(_) => 4,
        }
    }
}

impl From<IfsError> for CliError {
    fn from(e: IfsError) -> Self {
        match e {
            IfsError::NotConverged(_) => CliError::NotConverged(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<ShadowError> for CliError {
    fn from(e: ShadowError) -> Self {
        match e {
            ShadowError::Ifs(e) => e.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<StabilityError> for CliError {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::Ifs(e) => e.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<BetaError> for CliError {
    fn from(e: BetaError) -> Self {
        match e {
            BetaError::Ifs(e) => e.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Ifs(e) => e.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<locifs::symbolic::SymbolicError> for CliError {
    fn from(e: locifs::symbolic::SymbolicError) -> Self {
        CliError::Config(e.to_string())
    }
}
