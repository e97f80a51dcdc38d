use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid orbital elements: {0}")]
    InvalidElements(String),

    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("unbound orbit (energy {energy} km²/s²)")]
    UnboundOrbit { energy: f64 },

    #[error("inconsistent chart: {0}")]
    InconsistentChart(String),

    #[error("too close to the critical inclination (divisor {divisor:.3e})")]
    CriticalInclination { divisor: f64 },

    #[error("epoch mismatch: {reference} s vs {test} s")]
    EpochMismatch { reference: f64, test: f64 },

    #[error("{what} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("step size underflow at t = {t} s (h = {h:.3e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("query {value} outside the integrated span [{start}, {end}]")]
    OutOfSpan { value: f64, start: f64, end: f64 },

    #[error("insufficient samples for a trend fit: {0}")]
    InsufficientSamples(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code: 2 for configuration problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) | Error::InvalidElements(_) => 2,
            _ => 3,
        }
    }
}
