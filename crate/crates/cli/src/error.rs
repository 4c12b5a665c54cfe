//! Error type mapped onto the process exit codes: 1 for configuration
//! problems, 2 for property-check failures, 3 for numerical non-convergence.

use std::path::PathBuf;

use smods_cpt::behavior::BehaviorError;
use smods_cpt::cpt::CptError;
use smods_cpt::dist::DistError;
use smods_cpt::pricing::PricingError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("property check failed: {0}")]
    Property(String),
    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Property(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<CptError> for CliError {
    fn from(err: CptError) -> Self {
        match err {
            CptError::NonConvergence { .. } | CptError::QuadratureNonConvergence => {
                CliError::NonConvergence(err.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<DistError> for CliError {
    fn from(err: DistError) -> Self {
        CliError::Config(err.to_string())
    }
}

impl From<BehaviorError> for CliError {
    fn from(err: BehaviorError) -> Self {
        match err {
            BehaviorError::Cpt(inner) => inner.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<PricingError> for CliError {
    fn from(err: PricingError) -> Self {
        match err {
            PricingError::NoBand { .. } => CliError::Property(err.to_string()),
            PricingError::SolverNonConvergence { .. } => {
                CliError::NonConvergence(err.to_string())
            }
            PricingError::Behavior(inner) => inner.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(err: serde_json::Error) -> Self {
        CliError::Config(format!("invalid scenario JSON: {err}"))
    }
}
