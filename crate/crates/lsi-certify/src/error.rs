//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown potential family `{0}`")]
    UnknownFamily(String),

    #[error("missing parameter `{key}` for family `{family}`")]
    MissingParam { family: String, key: String },

    #[error("non-integrable parameter set for family `{family}`: {reason}")]
    NonIntegrable { family: String, reason: String },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("negative entry at node {index}: {value} (operation `{op}` requires nonnegative input)")]
    NegativeEntry { op: &'static str, index: usize, value: f64 },

    #[error("nonpositive Lyapunov candidate at node {index}: {value}")]
    NonpositiveW { index: usize, value: f64 },

    #[error("Lyapunov margin violated at node {index}: margin {margin:.3e} < -{tolerance:.3e}")]
    MarginViolated { index: usize, margin: f64, tolerance: f64 },

    #[error("no feasible Lyapunov certificate: {0}")]
    InfeasibleLyapunov(String),

    #[error("negative time t = {0}")]
    NegativeTime(f64),

    #[error("flow time {t} below the chain time t0 = {t0}")]
    TimeBelowT0 { t: f64, t0: f64 },

    #[error("curvature parameter K = {0} must be positive here (use the log-concave branch otherwise)")]
    KNotPositive(f64),

    #[error("mu0 = {0} outside (0, 1]")]
    InvalidMu0(f64),

    #[error("constant must be positive: {name} = {value}")]
    NotPositive { name: &'static str, value: f64 },

    #[error("node count {nodes} exceeds dense eigensolve budget {budget}")]
    DenseBudgetExceeded { nodes: usize, budget: usize },

    #[error("eigensolve failed: {0}")]
    Eigensolve(String),

    #[error("spectral gap {0:.3e} is numerically zero: generator looks disconnected")]
    ZeroSpectralGap(f64),

    #[error("operator not positive definite: smallest eigenvalue {lambda_min:.6e} (tolerance {tolerance:.3e})")]
    NotPositiveDefinite { lambda_min: f64, tolerance: f64 },

    #[error("linear solve residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },

    #[error("exponential overflow: {0}")]
    Overflow(String),

    #[error("all oracle starts degenerate (constant functions)")]
    DegenerateOracle,

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for the CLI: 1 = a mathematical check failed,
    /// 2 = configuration error, 3 = numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MarginViolated { .. } => 1,
            Error::Config(_)
            | Error::UnknownFamily(_)
            | Error::MissingParam { .. }
            | Error::NonIntegrable { .. }
            | Error::InvalidParam(_)
            | Error::InvalidGrid(_)
            | Error::DimensionMismatch { .. }
            | Error::NegativeEntry { .. }
            | Error::NonpositiveW { .. }
            | Error::NegativeTime(_)
            | Error::TimeBelowT0 { .. }
            | Error::KNotPositive(_)
            | Error::InvalidMu0(_)
            | Error::NotPositive { .. }
            | Error::Io(_) => 2,
            Error::InfeasibleLyapunov(_)
            | Error::DenseBudgetExceeded { .. }
            | Error::Eigensolve(_)
            | Error::ZeroSpectralGap(_)
            | Error::NotPositiveDefinite { .. }
            | Error::ResidualTooLarge { .. }
            | Error::Overflow(_)
            | Error::DegenerateOracle => 3,
        }
    }
}
