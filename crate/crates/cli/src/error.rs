use std::path::PathBuf;

use pseudoherm_core::evolution::EvolutionError;
use pseudoherm_core::fv::FvError;
use pseudoherm_core::metric::MetricError;
use pseudoherm_core::pt_algebra::PtError;
use pseudoherm_core::spectral::SpectralError;
use pseudoherm_core::LinalgError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Dimension { path: PathBuf, message: String },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Pt(#[from] PtError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Fv(#[from] FvError),
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "ParseError",
            CliError::Dimension { .. } => "DimensionError",
            CliError::InvalidArgument(_) => "InvalidArgument",
            CliError::Io { .. } => "IoError",
            CliError::Linalg(e) => e.name(),
            CliError::Pt(e) => e.name(),
            CliError::Spectral(e) => e.name(),
            CliError::Metric(e) => e.name(),
            CliError::Evolution(e) => e.name(),
            CliError::Fv(e) => e.name(),
        }
    }

    /// 1 for I/O trouble, 2 for bad input, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Parse { .. } | CliError::Dimension { .. } | CliError::InvalidArgument(_) => 2,
            _ => 3,
        }
    }
}
