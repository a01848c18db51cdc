use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// Raised when the lowest levels keep moving as the Fock cutoff is doubled.
    #[error(
        "spectrum not converged at truncation {truncation}: max level shift {shift:.3e} > {tolerance:.1e}"
    )]
    NonConvergence {
        truncation: usize,
        shift: f64,
        tolerance: f64,
        previous: Vec<f64>,
        last: Vec<f64>,
    },

    #[error("resonant parameters: leading factor of the Q recurrence vanishes at k = {k}")]
    Resonant { k: usize },

    #[error("degree {degree} exceeds the double-precision limit of {limit}")]
    DegreeTooHigh { degree: usize, limit: usize },

    #[error("coincident Bethe roots at indices {i} and {j}")]
    CoincidentRoots { i: usize, j: usize },

    #[error("Bethe root {index} collides with the pole at z = {pole}")]
    PoleCollision { index: usize, pole: f64 },

    #[error("root {index} of f(u) sits at u = 1, the image of the Bargmann point at infinity")]
    MapSingularity { index: usize },

    #[error("Newton refinement did not converge: best residual {residual:.3e}")]
    NewtonFailed {
        residual: f64,
        best: Vec<num_complex::Complex64>,
    },

    #[error("parameters are not at a QES point: scaled constraint residual {residual:.3e}")]
    NotAtQesPoint { residual: f64 },

    #[error("consistency check `{check}` failed: {value:.3e} > {tolerance:.1e}")]
    Inconsistent {
        check: &'static str,
        value: f64,
        tolerance: f64,
    },

    #[error("evaluation at the singular point x = 0")]
    SingularPoint,

    #[error("value out of range: {0}")]
    Range(String),

    #[error("partner component undefined for delta = 0")]
    UndefinedPartner,

    #[error("mesh too coarse: Richardson estimates disagree by {gap:.3e}")]
    MeshTooCoarse { gap: f64 },

    #[error("integrator failure: {0}")]
    Integrator(String),
}
