//! Numerical certificates for solver output: entropy residuals, L¹
//! stability, the comparison functional near the boundary, the jump scan
//! and the Crocco transform.

mod crocco;
mod entropy;
mod jump;
mod stability;
mod test_function;

pub use crocco::{crocco_inverse, crocco_transform, invert_law, CroccoProfile};
pub use entropy::{
    classical_entropy_residual, classical_entropy_terms, entropy_check, k_sweep, regularized_entropy_residual,
    regularized_entropy_terms, residual_tolerance, ClassicalTerms, EntropyEntry, EntropyReport, RegularizedTerms,
    RESIDUAL_TOLERANCE_CONSTANT,
};
pub use jump::{jump_degeneracy_scan, max_jump, JumpFlag};
pub use stability::{comparison_functional, l1_contraction_report, ComparisonTerms, StabilityReport, GRONWALL_SLACK};
pub use test_function::{boundary_test_function, SpatialTest, SpatialValues, TestFunction, TimeBump};

/// Norm of the test function used by the tolerance model.
pub fn test_function_norm(
    traj: &crate::solver::Trajectory,
    coeffs: &crate::problem::CoefficientSet,
    test: &TestFunction,
) -> crate::Result<f64> {
    entropy::Quadrature::new(traj, coeffs, test).map(|q| q.norm)
}
