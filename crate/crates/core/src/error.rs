use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("argument {value} lies outside the admissible interval {interval}")]
    Domain { value: f64, interval: String },
    #[error("generator is not strictly negative: {failed} of {total} grid points violate rho(z) < 0")]
    Negativity { failed: usize, total: usize },
    #[error("objective derivative changes sign {changes} times; minimizer is not unique")]
    NonUnique { changes: usize },
    #[error("unknown loss preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("non-finite cost or gradient at iteration {iteration}")]
    NonFinite { iteration: usize },
    #[error("loss pair must be defined on the whole real line, found {0}")]
    PairDomain(String),
    #[error("loss pair has no closed-form phi/psi")]
    MissingClosedForm,
    #[error("sign estimators cannot be converted to a log-likelihood ratio")]
    Sign,
    #[error("series too short: {windows} windows available, at least 2 required")]
    InsufficientData { windows: usize },
    #[error("CUSUM state already stopped at t = {0}")]
    Stopped(usize),
    #[error("sample variance is zero")]
    DegenerateVariance,
    #[error("input is empty")]
    EmptyInput,
    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
