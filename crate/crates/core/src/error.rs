use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data failed validation (weights, supports, configuration).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A modelling hypothesis required by the operation does not hold.
    #[error("assumption violated: {0}")]
    Assumption(String),

    #[error("barycenter did not converge after {iterations} iterations (last iterate {last_re}+{last_im}i, gradient norm {grad_norm:e})")]
    Convergence {
        iterations: usize,
        last_re: f64,
        last_im: f64,
        grad_norm: f64,
    },

    /// A one-dimensional bracketing search failed.
    #[error("search failed: {reason} (endpoint values {lo_value:e}, {hi_value:e})")]
    Search {
        reason: String,
        lo_value: f64,
        hi_value: f64,
    },

    /// The closed search contour does not wind once around the target.
    #[error("search domain error: winding number {winding} on the search contour")]
    SearchDomain {
        winding: i64,
        /// Sampled contour points `(a, b)`.
        samples: Vec<(f64, f64)>,
    },

    /// No parameter in the scan range achieved contraction.
    #[error("certification failed: {reason} (best s = {best_s}, best sup F = {best_sup_f})")]
    CertificationFailure {
        reason: String,
        best_s: f64,
        best_sup_f: f64,
    },

    /// Two routes that must agree did not (typically a discretization that is too coarse).
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Exact zero denominator in a Green function recursion.
    #[error("singular energy: {0}")]
    SingularEnergy(String),

    #[error("ill-conditioned solve: {0}")]
    Conditioning(String),
}
