use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("invalid Lorenz curve: {0}")]
    InvalidCurve(String),

    #[error("invalid tangent vector: {0}")]
    InvalidTangent(String),

    #[error("cdf not invertible near f = {f}: flat over more than one cell")]
    NonInvertibleCdf { f: f64 },

    #[error("degenerate curvature at node {index}: L_ff = {value:e} below floor")]
    DegenerateCurvature { index: usize, value: f64 },

    #[error("functional is defined on the {expected} side, state is on the {got} side")]
    SideMismatch { expected: &'static str, got: &'static str },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("first-moment drift {drift:e} beyond tolerance; shrink the domain")]
    MomentDrift { drift: f64 },

    #[error("time step unstable: growth factor {growth:.3} per step")]
    StabilityViolation { growth: f64 },

    #[error("positivity loss: clamped mass {clamped:e} exceeds budget in one step")]
    PositivityLoss { clamped: f64 },

    #[error("convexity loss at t = {time}: L_f no longer monotone")]
    ConvexityLoss { time: f64 },

    #[error("path constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
