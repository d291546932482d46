//! Solver and verifier for the degenerate quasilinear parabolic equation
//!
//! ```text
//! u_t - div(a(u,x,t) grad u) - f(x) . grad u + c(x,t) u = g(x,t)
//! ```
//!
//! on a cube, box or ball. The crate is `no_std` (it needs `alloc`) and
//! carries no IO: configuration parsing, CSV/JSON emission and the command
//! line live in the `degenflow` companion crate.
//!
//! Layout:
//!
//! - [`geometry`]: domains, uniform grids, the boundary distance `d(x)`.
//! - [`problem`]: coefficient families, the `h/S/I` mollifier family, the
//!   entropy primitives `A` and `A_eta`, structural condition validators.
//! - [`classifier`]: the partial boundary where Dirichlet data is required,
//!   and the linear Fichera set for comparison.
//! - [`solver`]: explicit / IMEX finite-volume vanishing-viscosity solver and
//!   its a priori monitors.
//! - [`verify`]: entropy residuals, L1 stability, the doubled-variable
//!   comparison functional, jump diagnostics and Crocco utilities.
#![no_std]
#![forbid(unsafe_code)]
// `!(x > 0.0)` is the NaN-rejecting form of the parameter checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// `Float` supplies the libm math in no_std builds. Whenever std is in the
// build graph (tests, or dev-dependencies enabling num-traits/std) the
// inherent float methods shadow it and the import looks unused.
#![allow(unused_imports)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classifier;
pub mod error;
pub mod geometry;
pub mod problem;
pub(crate) mod sampling;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{DomainKind, DomainSpec, Grid, NodeKind};
pub use problem::{CoefficientSet, ConditionId, ConditionReport, Mollifier};
pub use solver::{BoundaryMode, Field, InterfaceRule, Scheme, SolverConfig, Trajectory};

/// Crate version, echoed into experiment manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
