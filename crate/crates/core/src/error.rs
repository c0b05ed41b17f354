//! Crate-wide error type.

use core::fmt;

/// Convenience alias used by every fallible operation in this crate.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors reported by geometry validation, assembly, solvers and fits.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A shape parameter is malformed (non-positive radius, inverted box,
    /// degenerate segment, unsupported construction level, ...).
    InvalidGeometry(&'static str),
    /// The requested domain has no finite bounding box.
    UnboundedDomain,
    /// The domain's bounding box is not contained in the grid box.
    DomainNotContained,
    /// The grid spacing does not divide the box side lengths.
    SpacingMismatch { side: f64, h: f64 },
    /// Extension-grid grading factor below 1.
    BadGrading(f64),
    /// Extension grid requested with fewer than the minimum layer count.
    TooFewLayers(usize),
    /// Fractional order outside the open interval (0, 1).
    SOutOfRange(f64),
    /// Holder exponent outside the half-open interval (0, 1].
    ExponentOutOfRange(f64),
    /// A field or form was built on a different grid than the one supplied.
    GridMismatch,
    /// Conjugate gradients exhausted its iteration budget.
    SolverDiverged { residual: f64, iterations: usize },
    /// Dirichlet data is missing (non-finite) on an exterior node.
    MissingExteriorData { node: usize },
    /// The probed set G intersects the open domain.
    GNotInComplement { node: usize },
    /// No boundary node lies near the requested anchor.
    AnchorNotOnBoundary,
    /// Decay-probe radius too large for the domain.
    RadiusTooLarge { r: f64, max: f64 },
    /// A localized domain contains no interior nodes.
    LocalDomainEmpty,
    /// Fewer than the minimum number of usable decay samples.
    InsufficientSamples { have: usize, need: usize },
    /// Decay samples carry no usable variation (constant values or a
    /// single distance), so no exponent can be fitted.
    DegenerateSamples,
    /// Condenser geometry violated (K not inside the ambient ball, or the
    /// ambient ball not inside the grid box).
    GeometryViolation(&'static str),
    /// Adaptive quadrature failed to reach the requested tolerance.
    QuadratureFailure { estimate: f64, error: f64 },
    /// Oscillation balls do not fit inside the domain at this resolution.
    InsufficientInteriorRoom,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGeometry(what) => write!(f, "invalid geometry: {what}"),
            Error::UnboundedDomain => write!(f, "domain is unbounded"),
            Error::DomainNotContained => write!(f, "domain not contained in the grid box"),
            Error::SpacingMismatch { side, h } => {
                write!(f, "spacing {h} does not divide box side {side}")
            }
            Error::BadGrading(g) => write!(f, "grading factor {g} must be >= 1"),
            Error::TooFewLayers(m) => write!(f, "extension grid needs at least one layer, got {m}"),
            Error::SOutOfRange(s) => write!(f, "fractional order s = {s} outside (0, 1)"),
            Error::ExponentOutOfRange(sigma) => {
                write!(f, "Holder exponent {sigma} outside (0, 1]")
            }
            Error::GridMismatch => write!(f, "field/form built on a different grid"),
            Error::SolverDiverged {
                residual,
                iterations,
            } => write!(
                f,
                "conjugate gradients stalled at residual {residual} after {iterations} iterations"
            ),
            Error::MissingExteriorData { node } => {
                write!(f, "non-finite Dirichlet datum on exterior node {node}")
            }
            Error::GNotInComplement { node } => {
                write!(f, "probe set G contains interior node {node}")
            }
            Error::AnchorNotOnBoundary => write!(f, "anchor does not snap to a boundary node"),
            Error::RadiusTooLarge { r, max } => {
                write!(f, "radius {r} exceeds admissible maximum {max}")
            }
            Error::LocalDomainEmpty => write!(f, "localized domain has no interior nodes"),
            Error::InsufficientSamples { have, need } => {
                write!(f, "only {have} usable samples, need {need}")
            }
            Error::DegenerateSamples => write!(f, "decay samples carry no usable variation"),
            Error::GeometryViolation(what) => write!(f, "condenser geometry violated: {what}"),
            Error::QuadratureFailure { estimate, error } => write!(
                f,
                "quadrature failed to converge (estimate {estimate}, error bound {error})"
            ),
            Error::InsufficientInteriorRoom => {
                write!(f, "oscillation balls do not fit in the interior")
            }
        }
    }
}

impl core::error::Error for Error {}
