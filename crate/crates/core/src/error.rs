use thiserror::Error;

/// Everything that can go wrong while building models or running experiments.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input: shapes, probabilities, or configuration values.
    #[error("invalid input at `{path}`: {message}")]
    Invalid { path: String, message: String },

    #[error("chain is not ergodic: {0}")]
    NotErgodic(String),

    #[error("all-zero feature matrix cannot be normalized")]
    DegenerateFeatures,

    /// `A` is singular or numerically so (condition estimate above 1e12).
    #[error("matrix A is singular (condition estimate {condition:e}); the fixed point is undefined")]
    Singular { condition: f64 },

    /// `A + Aᵀ` has a non-negative eigenvalue.
    #[error("A + Aᵀ is not negative definite: largest eigenvalue is {eigenvalue:e}")]
    NotNegativeDefinite { eigenvalue: f64 },

    #[error("iterate diverged at step {step} (norm {norm:e})")]
    Diverged { step: u64, norm: f64 },

    #[error("run {run} failed: {source}")]
    Run {
        run: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("environment generation gave up after {attempts} rejected draws")]
    Generation { attempts: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Strips any `Run` wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Run { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
