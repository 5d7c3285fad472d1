use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum SbgError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The observation has zero likelihood under the prior's support.
    #[error("observation is impossible under the prior (unnormalized mass is zero)")]
    ImpossibleObservation,

    #[error("scenario validation failed at `{path}`: {message}")]
    Scenario { path: String, message: String },

    #[error("value iteration did not converge after {sweeps} sweeps (residual {residual:.3e}, tol {tol:.3e})")]
    NonConvergence {
        sweeps: usize,
        residual: f64,
        tol: f64,
    },

    #[error("policy has no action at node {0}")]
    MissingAction(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("JSON parse error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SbgError>;

impl SbgError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        SbgError::InvalidArgument(msg.into())
    }

    pub fn scenario(path: impl Into<String>, message: impl Into<String>) -> Self {
        SbgError::Scenario {
            path: path.into(),
            message: message.into(),
        }
    }
}
