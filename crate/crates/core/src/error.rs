use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point {x} outside parametric domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("singular step matrix in interval {interval}")]
    SingularStep { interval: usize },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<SimError>,
    },
}

impl SimError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        SimError::InvalidArgument(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        SimError::Config(msg.into())
    }

    /// Wraps the error with a human-readable context string.
    pub fn context(self, context: impl Into<String>) -> Self {
        SimError::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping context wrappers.
    pub fn root(&self) -> &SimError {
        match self {
            SimError::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for errors caused by bad input rather than by a failing solve.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self.root(),
            SimError::InvalidArgument(_) | SimError::OutOfDomain { .. } | SimError::Config(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
