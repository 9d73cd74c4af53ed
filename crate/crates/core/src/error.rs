use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("series is not a unit (zero constant term)")]
    NotAUnit,

    #[error("no square root: {0}")]
    NoSquareRoot(String),

    #[error("coefficient t[{i},{k}] must vanish at t = 0 (i <= k), got constant term {constant}")]
    SmallnessViolation { i: usize, k: usize, constant: String },

    #[error("denominator of {what} vanishes at t = 0")]
    NonInvertibleDenominator { what: String },

    #[error("coefficient t[{i},{k}] has derivative order {k} > m = {m}")]
    Arity { i: usize, k: usize, m: usize },

    #[error("prime {p} is inadmissible: {reason}")]
    BadPrime { p: u64, reason: String },

    #[error("input is not Weierstrass-ready: {0}")]
    NotWeierstrassReady(String),

    #[error("pole at non-integer point: {0}")]
    UnsupportedPole(String),

    #[error("window determinants did not stabilize up to M = N = {bound}")]
    NonConvergence { bound: i64 },

    #[error("internal bound exceeded: {0}")]
    InternalBound(String),

    #[error("continued-fraction solver failed: {0}")]
    SolverFailure(String),

    #[error("leading symbol vanishes on the integration contour near x = {0}")]
    BadContour(String),

    #[error("step halving did not reach tolerance {tol:e} (last change {change:e})")]
    AccuracyFailure { tol: f64, change: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
