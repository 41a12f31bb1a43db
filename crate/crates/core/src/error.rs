use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid function spec: {0}")]
    InvalidSpec(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("matrix is reducible")]
    Reducible,

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("power iteration did not converge after {iterations} iterations (relative gap {gap:e}, periodic support: {periodic})")]
    NoConvergence {
        iterations: usize,
        gap: f64,
        periodic: bool,
    },

    #[error("system is not contractive: overall factor {0}")]
    NonContractive(f64),

    #[error("box counting: {0}")]
    BoxCount(String),

    #[error("degenerate regression: {0}")]
    Degenerate(String),

    #[error("surface: {0}")]
    Surface(String),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}
