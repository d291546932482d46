//! Coefficients, the mollifier family, entropy primitives and the structural
//! condition validators.

pub mod coefficients;
pub mod conditions;
pub mod entropy;
pub mod mollifier;
pub mod quadrature;

pub use coefficients::{CoefficientSet, CoefficientSpec, Convection, Diffusion, ScalarField, SpaceFactor, StateFactor};
pub use conditions::{validate_conditions, ConditionId, ConditionReport, ConditionTolerances};
pub use entropy::{antiderivative_a, entropy_a_eta, sign, EntropyKernel};
pub use mollifier::{mollifier_h, mollifier_i, mollifier_s, Mollifier};
