use thiserror::Error;

use crate::expr::ExprError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error("point {point:?} lies outside the domain of chart `{chart}`")]
    DomainViolation { chart: String, point: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, found {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: &'static str,
    },

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("jet depth exhausted: a derivative was requested beyond depth {0}")]
    DepthExhausted(usize),

    #[error("not a projection: |K² - K| = {residual:e} exceeds {tolerance:e}")]
    NotAProjection { residual: f64, tolerance: f64 },

    #[error("singular linear system (pivot {0:e})")]
    Singular(f64),

    #[error("not a group: object manifold has dimension {0}")]
    NotAGroup(usize),

    #[error("groupoid `{groupoid}` has no nerve chart for level {level}")]
    MissingNerveLevel { groupoid: String, level: usize },

    #[error("representation axiom `{axiom}` violated: residual {residual:e}")]
    Representation { axiom: &'static str, residual: f64 },

    #[error("hypothesis failed: {0}")]
    Hypothesis(String),

    #[error("sampler failed: {0}")]
    Sampler(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
