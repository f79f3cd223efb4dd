use alloc::string::String;

/// Errors raised by the statistical kernel, the tests and the simulation engine.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The data carry no usable variation (zero variance, too few points).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// The matched-sample correlation is exactly ±1.
    #[error("degenerate correlation: |r| = 1 on the matched subset")]
    DegenerateCorrelation,

    #[error("insufficient matched samples: need at least {required}, found {found}")]
    InsufficientMatched { required: usize, found: usize },

    #[error("insufficient data: need at least {required} records per phase, found {pre} pre and {post} post")]
    InsufficientData { required: usize, pre: usize, post: usize },

    /// Pre and post arms differ in size; that design (partially paired data) is not supported.
    #[error("unequal arms: {pre} pre vs {post} post records (partially paired data is not supported)")]
    UnequalArms { pre: usize, post: usize },

    #[error("logistic fit did not converge after {iterations} iterations (perfect separation?)")]
    NonConvergence { iterations: usize },

    /// No simulation run produced an estimable result.
    #[error("no estimable runs out of {n_runs}")]
    EmptyResult { n_runs: u64 },

    #[error("no quantile grid entry for n = {n}, prop = {prop}")]
    MissingGridEntry { n: usize, prop: f64 },

    /// The grid holds the cell but the quantile test is not calculable there.
    #[error("quantile test not calculable for n = {n}, prop = {prop} (fewer than four matched samples)")]
    NotCalculable { n: usize, prop: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn degenerate(msg: impl Into<String>) -> Error {
    Error::DegenerateData(msg.into())
}
