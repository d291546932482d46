use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A grid axis has fewer than three nodes.
    InvalidResolution {
        axis: usize,
        count: usize,
    },
    /// Malformed domain description.
    InvalidDomain(String),
    /// A point lies outside the closed domain.
    OutOfDomain {
        distance: f64,
    },
    /// A point expected on the boundary is not on it.
    NotOnBoundary {
        distance: f64,
    },
    /// The distance function is not smooth at the point (ridge, corner, center).
    NonsmoothPoint,
    InvalidParameter {
        name: &'static str,
        value: f64,
    },
    /// A diffusion value below `-tolerance` was met during quadrature.
    NegativeDiffusion {
        value: f64,
    },
    /// Analytic partials disagree with finite differences.
    InconsistentPartials {
        what: &'static str,
        discrepancy: f64,
    },
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// The explicit step violates the stability limit.
    StepRejected {
        dt: f64,
        admissible_dt: f64,
    },
    NumericalBlowup {
        t: f64,
    },
    /// Initial data is nonzero on a node held by a homogeneous Dirichlet condition.
    BoundaryDataMismatch {
        node: usize,
        value: f64,
    },
    InvalidTestFunction(String),
    IncompatibleTrajectories(String),
    /// The Crocco map needs a strictly increasing profile.
    NotInvertible {
        index: usize,
    },
    /// The inverse Crocco map needs `w > 0`.
    DegenerateTransform {
        index: usize,
        value: f64,
    },
    LinearSolverFailed {
        iterations: usize,
        residual: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidResolution { axis, count } => {
                write!(f, "invalid resolution: axis {axis} has {count} nodes, need at least 3")
            }
            Error::InvalidDomain(msg) => write!(f, "invalid domain: {msg}"),
            Error::OutOfDomain { distance } => {
                write!(f, "point lies outside the domain (signed distance {distance})")
            }
            Error::NotOnBoundary { distance } => {
                write!(f, "point is not on the boundary (distance {distance})")
            }
            Error::NonsmoothPoint => write!(f, "distance function is not smooth at this point"),
            Error::InvalidParameter { name, value } => {
                write!(f, "invalid parameter {name} = {value}")
            }
            Error::NegativeDiffusion { value } => {
                write!(f, "diffusion coefficient is negative ({value})")
            }
            Error::InconsistentPartials { what, discrepancy } => {
                write!(f, "analytic partials of {what} disagree with finite differences by {discrepancy}")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::StepRejected { dt, admissible_dt } => {
                write!(f, "step rejected: dt = {dt} exceeds admissible dt = {admissible_dt}")
            }
            Error::NumericalBlowup { t } => write!(f, "non-finite values produced at t = {t}"),
            Error::BoundaryDataMismatch { node, value } => {
                write!(f, "initial value {value} at Dirichlet node {node} is not zero")
            }
            Error::InvalidTestFunction(msg) => write!(f, "invalid test function: {msg}"),
            Error::IncompatibleTrajectories(msg) => write!(f, "incompatible trajectories: {msg}"),
            Error::NotInvertible { index } => {
                write!(f, "profile is not strictly increasing at sample {index}")
            }
            Error::DegenerateTransform { index, value } => {
                write!(f, "w = {value} <= 0 at sample {index}")
            }
            Error::LinearSolverFailed { iterations, residual } => {
                write!(f, "conjugate gradient failed after {iterations} iterations (residual {residual})")
            }
        }
    }
}

impl core::error::Error for Error {}
