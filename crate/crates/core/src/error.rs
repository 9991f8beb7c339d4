use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("result is the zero polynomial: {0}")]
    ZeroPolynomial(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate interval: m_lo = m_hi = {0}")]
    DegenerateInterval(f64),
    #[error("t = {t} outside the sampled range ({t_min}, {t_max})")]
    Extrapolation { t: f64, t_min: f64, t_max: f64 },
    #[error("argument {x} outside the admissible range ({lo}, {hi})")]
    Range { x: f64, lo: f64, hi: f64 },
    #[error("singularity at {0}")]
    Singularity(f64),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("root isolation failed at stage `{stage}` on [{lo}, {hi}]: {detail}")]
    RootIsolation {
        stage: &'static str,
        lo: f64,
        hi: f64,
        detail: String,
    },
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, Error>;
