use thiserror::Error;

/// Errors raised by the divergence library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is not Hermitian (max entry deviation {0:e})")]
    NotHermitian(f64),

    #[error("operator is not positive semi-definite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("operator is not a test: eigenvalue {0} outside [0, 1]")]
    NotATest(f64),

    #[error("operator is not a projection (idempotency residual {0:e})")]
    NotAProjection(f64),

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("classical states are defined on different label sets")]
    LabelMismatch,

    #[error("parameter {name} = {value} is outside {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("resource budget exceeded: {what} needs {needed}, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: f64,
        budget: f64,
    },

    #[error("root bracket failure on [{lo}, {hi}]: G(lo) = {g_lo}, G(hi) = {g_hi}")]
    BracketFailure {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("numeric invariant violated: {0}")]
    InvariantViolation(String),

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("state file: {0}")]
    StateFormat(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_alpha_open_unit(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            range: "(0, 1)",
        })
    }
}
