//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A coordinate vector lies outside the chart domain.
    #[error("point outside chart domain: {0}")]
    OutsideDomain(String),

    /// Not enough room between the point and the domain edge for the
    /// requested finite-difference stencil, even after shrinking the step.
    #[error("insufficient margin for finite differences at {0}")]
    InsufficientMargin(String),

    /// A matrix that must be symmetric positive definite is not.
    #[error("metric is not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// Dimension mismatch between an object and the chart it is used on.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A quadrature did not converge to the requested tolerance.
    #[error("quadrature failed to converge: {0}")]
    QuadratureFailed(String),

    /// The homotopy segment {s·q : s in [0,1]} leaves the chart domain.
    #[error("radial segment exits chart domain at {0}")]
    SegmentExitsDomain(String),

    /// No primitive with dθ = σ is available on this chart.
    #[error("no angle primitive available: {0}")]
    NoThetaPrimitive(String),

    /// The boundary form vanishes where a direction is needed.
    #[error("boundary form vanishes at {0}; direction undefined")]
    SigmaVanishes(String),

    /// Scenario parameters violate a documented range or invariant.
    #[error("scenario construction failed: {0}")]
    Scenario(String),

    /// An initial state fails the integrator's preconditions.
    #[error("invalid initial state: {0}")]
    InvalidInitialState(String),

    /// A value that must be finite is NaN or infinite.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// Degenerate input to a fit or statistic.
    #[error("degenerate input: {0}")]
    Degenerate(String),
}
