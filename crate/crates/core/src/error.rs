use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the domain its quantity is defined on.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The computation left its physical domain (collapsed bounds, unphysical
    /// covariance matrix, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Curve fitting could not start or did not produce a model.
    #[error("fit failure: {0}")]
    FitFailure(String),

    /// A degree distribution cannot be realised at the requested length.
    #[error("infeasible degree distribution: {0}")]
    InfeasibleDistribution(String),

    /// Every candidate modulation variance violated the efficiency constraint.
    #[error("no feasible modulation variance: {0}")]
    NoFeasiblePoint(String),

    /// A text input could not be parsed.
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Domain(_) => "domain",
            Error::FitFailure(_) => "fit_failure",
            Error::InfeasibleDistribution(_) => "infeasible_distribution",
            Error::NoFeasiblePoint(_) => "no_feasible_point",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse(source_name: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
