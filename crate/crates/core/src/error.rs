use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A kernel failed its analytic checks (non-negativity, sub-exponential certificate).
    #[error("kernel analysis error: {0}")]
    Analysis(String),

    /// The kernel is in the wrong regime for the requested operation.
    #[error("regime error: {0}")]
    Regime(String),

    /// A hypothesis required by the growth law does not hold for this input.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// A numerical result cannot meet its accuracy contract with the given resources.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// The operation only makes sense for a particular lattice window.
    #[error("window mode error: {0}")]
    Mode(String),

    /// The mean-field solution exceeded the representable range.
    #[error("overflow at t = {time}: {detail}")]
    Overflow { time: f64, detail: String },

    /// A simulation produced more events than the configured guard allows.
    #[error("explosion guard tripped after {events} events (guard {guard})")]
    Explosion { events: u64, guard: u64 },

    /// Too many replicas of an experiment hit the explosion guard.
    #[error(
        "partial result: {failed} of {total} replicas exploded; completed replicas: {completed:?}"
    )]
    PartialResult {
        failed: usize,
        total: usize,
        completed: Vec<usize>,
    },

    /// An internal invariant of an algorithm was broken. Always a bug.
    #[error("internal consistency error: {0}")]
    Consistency(String),

    /// Configuration file could not be parsed or validated.
    #[error("config error{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Config {
        key: Option<String>,
        line: Option<usize>,
        message: String,
    },

    /// Plot or table data contained values that cannot be rendered.
    #[error("data error: {0}")]
    Data(String),

    /// Two artifacts produced under different configurations were compared.
    #[error("config hash mismatch: {left} vs {right}")]
    HashMismatch { left: String, right: String },

    /// A verification tolerance failed.
    #[error("tolerance failure: {0}")]
    Tolerance(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(
        key: Option<&str>,
        line: Option<usize>,
        message: impl Into<String>,
    ) -> Self {
        Error::Config {
            key: key.map(str::to_owned),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Io { .. } | Error::HashMismatch { .. } => 2,
            Error::Regime(_) | Error::Hypothesis(_) => 3,
            Error::Tolerance(_) => 4,
            Error::Explosion { .. } | Error::PartialResult { .. } | Error::Overflow { .. } => 5,
            _ => 1,
        }
    }
}
