use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum SelfsimError {
    /// The coefficient vector does not describe a usable curve (nonpositive
    /// radius at a node, a node at the origin, empty coefficients).
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    /// A kernel was evaluated at coincident points.
    #[error("singular evaluation: coincident source and target")]
    SingularEvaluation,

    /// The Newton system lost rank beyond what the step policy tolerates.
    #[error("singular jacobian: {0}")]
    SingularJacobian(String),

    /// The G field vanishes (trivial circle), so no flux constant is defined.
    #[error("degenerate eigenvector: G vanishes, flux constant undefined")]
    DegenerateEigenvector,

    /// Backtracking ran out of trial steps without decreasing ‖f‖₂.
    #[error("line search exhausted at residual norm {0:.6e}")]
    LineSearchExhausted(f64),

    /// An argument is outside a closed-form formula's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration value violates an invariant.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, SelfsimError>;
