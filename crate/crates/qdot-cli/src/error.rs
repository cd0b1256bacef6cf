//! CLI error taxonomy mapped onto process exit codes:
//! 1 usage/domain, 2 I/O and malformed files, 3 non-convergence.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    NonConvergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError::Io(msg.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<qdot_core::units::UnitsError> for CliError {
    fn from(e: qdot_core::units::UnitsError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<qdot_core::spectrum::SpectrumError> for CliError {
    fn from(e: qdot_core::spectrum::SpectrumError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<qdot_core::lineshape::LineshapeError> for CliError {
    fn from(e: qdot_core::lineshape::LineshapeError) -> Self {
        match e {
            qdot_core::lineshape::LineshapeError::NonConvergence { .. } => {
                CliError::NonConvergence(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<qdot_core::finestructure::FinestructureError> for CliError {
    fn from(e: qdot_core::finestructure::FinestructureError) -> Self {
        match e {
            qdot_core::finestructure::FinestructureError::NonConvergence { .. } => {
                CliError::NonConvergence(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<qdot_core::photon::PhotonError> for CliError {
    fn from(e: qdot_core::photon::PhotonError) -> Self {
        match e {
            qdot_core::photon::PhotonError::NonConvergence { .. } => {
                CliError::NonConvergence(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<qdot_core::array_map::ArrayMapError> for CliError {
    fn from(e: qdot_core::array_map::ArrayMapError) -> Self {
        CliError::Usage(e.to_string())
    }
}
