use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("nonlinearity is not convex: f'({t1}) = {d1} > f'({t2}) = {d2}")]
    NotConvex { t1: f64, t2: f64, d1: f64, d2: f64 },

    #[error("nonpositive nonlinearity value f({at}) = {value}")]
    NonPositive { at: f64, value: f64 },

    #[error("field belongs to a different mesh")]
    MeshMismatch,

    #[error("singular matrix: pivot {pivot:e} at row {row}")]
    Singular { row: usize, pivot: f64 },

    #[error("{method} did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("monotonicity violated at iteration {iteration}: decrease of {violation:e} at node {node}")]
    MonotonicityViolation {
        iteration: usize,
        node: usize,
        violation: f64,
    },

    #[error("iterate exceeded the supersolution by {excess:e} at node {node} (iteration {iteration})")]
    SupersolutionExceeded {
        iteration: usize,
        node: usize,
        excess: f64,
    },

    #[error("blow-up suspected: sup norm {sup_norm:e} exceeded cap {cap:e} at iteration {iteration}")]
    BlowUpSuspected {
        iteration: usize,
        sup_norm: f64,
        cap: f64,
    },

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
