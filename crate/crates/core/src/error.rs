use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the laboratory. Variants name the violated precondition.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid ruling: zero direction vector at t-index {index}")]
    InvalidRuling { index: usize },
    #[error("invalid scale {0}: must be positive")]
    InvalidScale(f64),
    #[error("shape mismatch: expected {expected} samples, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("immersion failure at node ({i}, {j}): tangent vectors are dependent")]
    ImmersionFailure { i: usize, j: usize },
    #[error("analytic derivatives unavailable for this patch")]
    AnalyticUnavailable,
    #[error("variation step too large: {0}")]
    StepTooLarge(String),
    #[error("variation field does not vanish near the boundary at node ({i}, {j})")]
    UnsupportedVariation { i: usize, j: usize },
    #[error("eigen-solver did not converge after {iterations} iterations")]
    EigenNonConvergence { iterations: usize },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("no overlap: separation needs at least 2 sheets, got {0}")]
    NoOverlap(usize),
    #[error("handedness undefined: multi-valued graph is not embedded (min |w| = {min_abs_w})")]
    UndefinedHandedness { min_abs_w: f64 },
    #[error("log singularity: inner radius {0} must exceed 1")]
    LogSingularity(f64),
    #[error("fit undefined: {0}")]
    FitUndefined(String),
    #[error("Newton iteration did not converge after {iterations} iterations (last residual {last_residual:e})")]
    NonConvergence { iterations: usize, last_residual: f64, history: Vec<f64> },
    #[error("linear solve failed: {0}")]
    LinearSolve(String),
    #[error("curvature too small at the center: |A|^2(x) r0^2 / (4 C^2) = {ratio}")]
    CurvatureTooSmall { ratio: f64 },
    #[error("ball of radius {radius} around vertex {vertex} reaches the mesh boundary")]
    BallEscape { vertex: usize, radius: f64 },
    #[error("inner radius {inner} of the multi-valued graph does not match pair scale {scale}")]
    RadiusMismatch { inner: f64, scale: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("singular set is not a graph over the x3-axis at level {level}")]
    NonGraph { level: f64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
