use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {scheme} parameter: {detail}")]
    InvalidParameter {
        scheme: &'static str,
        detail: String,
    },

    #[error("value out of range at n = {n}: {detail}")]
    Range { n: u64, detail: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "series diverges: |argument| = {magnitude} is outside the convergence radius {radius}"
    )]
    Divergence { magnitude: f64, radius: f64 },

    #[error("series did not converge within {terms} terms (last term magnitude {last_term})")]
    NonConvergence { terms: usize, last_term: f64 },

    #[error("quadrature did not reach tolerance after {refinements} refinements (last estimates {previous} and {last})")]
    Accuracy {
        refinements: usize,
        previous: f64,
        last: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cannot parse scheme descriptor `{descriptor}`: {detail}")]
    Parse { descriptor: String, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
