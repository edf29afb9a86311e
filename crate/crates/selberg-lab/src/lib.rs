//! Numerical workbench for the Selberg central limit theorem.
//!
//! The crate evaluates Dirichlet-polynomial approximations of log zeta on the
//! critical line, closed-form Stein–Malliavin discrepancy expressions, prime-sum
//! asymptotics, and zeta-zero fluctuation statistics, and checks each against
//! independent oracles and Monte Carlo experiments.

pub mod config;
pub mod experiments;
pub mod malliavin;
pub mod oracle;
pub mod primes;
pub mod report;
pub mod sampler;
pub mod stats;
pub mod trig;
pub mod zeta;

/// Crate-wide error type. Variants map onto process exit codes:
/// config errors exit 2, resource limits exit 3, numeric-validation
/// failures exit 4.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("trig phase {phase:.3e} exceeds the supported cap {cap:.1e}")]
    PhaseCap { phase: f64, cap: f64 },

    #[error("|Z(t)| < 1e-9 at t = {t}: too close to a zeta zero")]
    NearZero { t: f64 },

    #[error("numeric validation failed: {0}")]
    NumericValidation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code associated with this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } => 2,
            Error::ResourceLimit(_) => 3,
            Error::NumericValidation(_) => 4,
            // Remaining variants indicate misuse of preconditions or I/O
            // problems surfaced through config validation paths.
            Error::OutOfRange(_) | Error::Domain(_) | Error::PhaseCap { .. } => 2,
            Error::NearZero { .. } => 4,
            Error::Io(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
