//! Flags one-cell jumps and reports how much diffusion acts across them.
//! A jump that survives refinement should sit where `a` vanishes on the
//! whole interval between the two states.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geometry::Grid;
use crate::problem::CoefficientSet;
use crate::solver::Field;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpFlag {
    pub lower: usize,
    pub upper: usize,
    pub axis: usize,
    pub midpoint: Vec<f64>,
    /// `|u_upper - u_lower|`.
    pub jump: f64,
    /// `max a(s, midpoint, t)` over `s` between the two states.
    pub max_a: f64,
}

/// Faces whose jump exceeds `gradient_threshold · osc(u)`.
pub fn jump_degeneracy_scan(
    grid: &Grid,
    field: &Field,
    coeffs: &CoefficientSet,
    gradient_threshold: f64,
) -> Vec<JumpFlag> {
    let (lo, hi) = field.range(grid);
    let osc = hi - lo;
    if !(osc > 0.0) {
        return Vec::new();
    }
    let mut mid = vec![0.0; grid.dim()];
    let mut out = Vec::new();
    for face in grid.faces() {
        let (a, b) = (field.values[face.lower], field.values[face.upper]);
        let jump = (b - a).abs();
        if jump > gradient_threshold * osc {
            grid.midpoint(face.lower, face.upper, &mut mid);
            let max_a = coeffs.max_a_on(a.min(b), a.max(b), &mid, field.t);
            out.push(JumpFlag {
                lower: face.lower,
                upper: face.upper,
                axis: face.axis,
                midpoint: mid.clone(),
                jump,
                max_a,
            });
        }
    }
    out
}

/// Largest one-cell jump over all faces.
pub fn max_jump(grid: &Grid, values: &[f64]) -> f64 {
    grid.faces().iter().map(|f| (values[f.upper] - values[f.lower]).abs()).fold(0.0, f64::max)
}
