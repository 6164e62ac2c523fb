use thiserror::Error;

/// Errors surfaced by measure construction, quadrature kernels and samplers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid weight law: {0}")]
    InvalidWeights(String),

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("bisection did not converge after {iters} iterations (bracket width {width:e})")]
    Bisection { iters: u32, width: f64 },

    #[error(
        "truncation mass budget exceeded: discarded fraction {fraction:e} > budget {budget:e}"
    )]
    MassBudget { fraction: f64, budget: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
