use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures reported by the numerical pipeline.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("element is not hyperbolic (|trace| = {trace})")]
    NotHyperbolic { trace: f64 },

    #[error("element fixes infinity (|c| = {c})")]
    FixesInfinity { c: f64 },

    #[error("schottky disks overlap: achieved gap {gap:e} between disks {first} and {second}")]
    DiskOverlap { first: usize, second: usize, gap: f64 },

    #[error("bisection failed: {0}")]
    BisectionFailure(String),

    #[error("enumeration budget exceeded after {nodes} nodes")]
    BudgetExceeded { nodes: u64 },

    #[error("transfer eigenvalue does not cross 1 on (0, 1): leading eigenvalue {at_zero} at s=0, {at_one} at s=1")]
    NoBracketing { at_zero: f64, at_one: f64 },

    #[error("Re(lambda) = {re} is outside the Euler-product half-plane Re > {threshold}")]
    OutsideConvergence { re: f64, threshold: f64 },

    #[error("branch of (cz+d)^(-2 lambda) is ambiguous on disk {disk} for letter {letter}")]
    BranchAmbiguity { disk: usize, letter: usize },

    #[error("fredholm determinant not converged: |det(M) - det(2M)| = {change:e} > {tol:e}")]
    NotConverged { change: f64, tol: f64 },

    #[error("zero within {distance:e} of the rectangle boundary at {location}")]
    BoundaryZero { location: Complex64, distance: f64 },

    #[error("pole at {0}")]
    PoleAt(Complex64),

    #[error("contour passes within {distance:e} of the pole at {pole}")]
    ContourThroughPole { pole: Complex64, distance: f64 },

    #[error("asymptotic series grading mismatch: {0}")]
    GradingMismatch(String),

    #[error("expansion fit residual {residual:e} exceeds {allowed:e}")]
    FitResidualTooLarge { residual: f64, allowed: f64 },

    #[error("fit window holds {samples} samples, need {needed}")]
    WindowTooSmall { samples: usize, needed: usize },

    #[error("zeta route unavailable: {0}")]
    RouteUnavailable(String),

    #[error("quadrature failed: error estimate {estimate:e} above tolerance {tol:e}")]
    QuadratureFailure { estimate: f64, tol: f64 },

    #[error("det S routes disagree: relative difference {difference:e}")]
    InconsistentRoutes { difference: f64 },

    #[error("Z vanishes at {0}; det P_k undefined by the zeta quotient")]
    ZetaZero(Complex64),

    #[error("winding {raw} is not within 1e-3 of an integer")]
    NonIntegerWinding { raw: f64 },
}
