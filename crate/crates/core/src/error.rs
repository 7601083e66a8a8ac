use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("inner solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    InnerNotConverged { iterations: usize, residual: f64 },

    #[error("line search stalled after {iterations} iterations (residual {residual:.3e})")]
    LineSearchStalled { iterations: usize, residual: f64 },

    #[error("projection did not converge (residual {residual:.3e})")]
    ProjectionNotConverged { residual: f64 },

    #[error("convex set is empty: {0}")]
    EmptySet(String),

    #[error("quadratic risk constraint could not be satisfied (violation {violation:.3e})")]
    RiskInfeasible { violation: f64 },

    #[error("restricted problem on the selected support is infeasible")]
    PolishInfeasible,

    #[error("no support yields a feasible restriction")]
    GlobalInfeasible,

    #[error("oracle size cap exceeded: n = {n} > {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("point violates the convex set by {violation:.3e}")]
    Infeasible { violation: f64 },

    #[error("outer iteration {iteration}: {source}")]
    AtIteration {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("generator failed: {0}")]
    Generator(String),

    #[error("instance JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Dimension {
            context,
            expected,
            got,
        });
    }
    Ok(())
}
