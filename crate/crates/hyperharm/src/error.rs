use thiserror::Error;

/// Errors shared by the geometry and transform layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Boundary pair too close to the diagonal for the geodesic chart.
    #[error("degenerate boundary pair: angular separation {separation:.3e} below {epsilon:.3e}")]
    DegeneratePair { separation: f64, epsilon: f64 },

    /// Interior point too close to the boundary circle for kernel evaluation.
    #[error("point within {distance:.3e} of the boundary circle")]
    BoundaryProximity { distance: f64 },

    /// Input outside the model domain (half-plane or unit disk).
    #[error("domain violation: {0}")]
    Domain(String),

    /// Spectral parameter in the forbidden set of the boundary transform.
    #[error("forbidden transform parameter lambda = {re}{im:+}i (within {tol:.1e} of a negative integer)")]
    ForbiddenParameter { re: f64, im: f64, tol: f64 },

    /// A quadrature failed to reach the requested tolerance.
    #[error("quadrature did not converge: estimate {estimate:.3e} after {evaluations} evaluations")]
    NonConvergence {
        /// Best value obtained so far.
        partial_re: f64,
        partial_im: f64,
        estimate: f64,
        evaluations: usize,
    },

    /// A compact-support descriptor turned out to be empty.
    #[error("empty support: {0}")]
    EmptySupport(String),

    /// Orbit sum truncation leaks past the requested tolerance.
    #[error("orbit truncation too small: residual {residual:.3e} exceeds {tolerance:.3e} at N = {n}")]
    TruncationTooSmall { residual: f64, tolerance: f64, n: i64 },

    /// Boundary data overlaps the fixed points of the group generator.
    #[error("boundary data does not vanish near the generator fixed points (mass {mass:.3e})")]
    FixedPointSupport { mass: f64 },

    /// An exponential profile fit failed.
    #[error("profile fit failed: {0}")]
    FitFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
