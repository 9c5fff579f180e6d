use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by geometry, learning and I/O routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point violates the constraint of component {component} (residual {residual:.3e})")]
    NotOnManifold { component: usize, residual: f64 },

    #[error("vector is not tangent at the base point of component {component} (residual {residual:.3e})")]
    NotTangent { component: usize, residual: f64 },

    #[error("{what} argument {value} lies outside its domain")]
    OutOfDomain { what: &'static str, value: f64 },

    #[error("antipodal points: {0} is undefined")]
    Antipodal(&'static str),

    #[error("singular configuration: {0}")]
    Singular(&'static str),

    #[error("covariance matrix is not positive semi-definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid distance matrix: {0}")]
    InvalidDistanceMatrix(String),

    #[error("graph is disconnected; components: {components:?}")]
    Disconnected { components: Vec<Vec<usize>> },

    #[error("optimization diverged after {} steps", history.len())]
    Diverged { history: Vec<f64> },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("signature parse error: {0}")]
    SignatureSyntax(String),

    #[error("greedy pipeline failed with partial signature {partial}: {source}")]
    Pipeline { partial: String, source: Box<Error> },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Short machine-readable tag used by the command line front end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotOnManifold { .. } => "not_on_manifold",
            Error::NotTangent { .. } => "not_tangent",
            Error::OutOfDomain { .. } => "out_of_domain",
            Error::Antipodal(_) => "antipodal",
            Error::Singular(_) => "singular",
            Error::NotPsd { .. } => "not_psd",
            Error::InvalidInput(_) => "invalid_input",
            Error::InvalidDistanceMatrix(_) => "invalid_distance_matrix",
            Error::Disconnected { .. } => "disconnected",
            Error::Diverged { .. } => "diverged",
            Error::Parse { .. } => "parse",
            Error::SignatureSyntax(_) => "signature_syntax",
            Error::Pipeline { .. } => "pipeline",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
