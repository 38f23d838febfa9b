use thiserror::Error;

/// Errors surfaced by the numerical toolkit.
#[derive(Debug, Error)]
pub enum HcbError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("score constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("no closed form registered for loss `{loss}` with class `{class}`")]
    NoClosedForm { loss: String, class: String },

    #[error("class has unbounded per-coordinate scores; supply a surrogate radius")]
    UnboundedClass,

    #[error("auxiliary function failed the convexity midpoint test near u = {0}")]
    NonConvex(f64),

    #[error("bracket expansion failed; widest bracket tried was [{lo}, {hi}]")]
    BracketExpansionFailed { lo: f64, hi: f64 },

    #[error("degenerate score range: s_min == s_max")]
    DegenerateScoreRange,

    #[error("argument {value} outside domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate truncation interval: sigma = {sigma} vs width = {width}")]
    DegenerateTruncation { sigma: f64, width: f64 },

    #[error("distribution support does not match supplied scores: {0}")]
    SupportMismatch(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, HcbError>;
