//! Sampled checks of the structural conditions on the coefficients.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::coefficients::CoefficientSet;
use crate::geometry::{DomainKind, Grid};
use crate::sampling::linspace;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    /// `a - δ₁ Σ (a_{x_s})² ≥ 0`, the sum running over space and time.
    DiffusionDominatesGradient,
    /// `Δd ≤ 0` near the boundary.
    BoundaryConcavity,
    /// `|√a(x) - √a(y)| ≤ c |x-y|^{2+δ₂}` near the boundary.
    SqrtDiffusionHolder,
    /// `a_{x_i} = 0` on the boundary.
    BoundaryGradientVanishes,
    /// `f_i = 0` on the boundary.
    BoundaryConvectionVanishes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub id: ConditionId,
    pub pass: bool,
    /// Largest sampled violation; a condition holds when this is at most
    /// `tolerance`. Negative values are margins.
    pub worst_violation: f64,
    pub tolerance: f64,
    pub sample_count: usize,
    pub notes: String,
}

impl ConditionReport {
    pub fn new(id: ConditionId, worst_violation: f64, tolerance: f64, sample_count: usize, notes: String) -> Self {
        Self { id, pass: worst_violation <= tolerance, worst_violation, tolerance, sample_count, notes }
    }
}

/// Sampling sizes and tolerances for [`validate_conditions`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConditionTolerances {
    /// Equispaced states over `u_range`.
    pub state_samples: usize,
    /// Equispaced times over `[0, final_time]`.
    pub time_samples: usize,
    pub final_time: f64,
    /// Slack for the pointwise conditions.
    pub pointwise: f64,
    /// Bound on the fitted Hölder ratio.
    pub holder_bound: f64,
    /// Pairs are `(x, x + m h e_k)` for `m = 1..=holder_max_cells` with `x`
    /// within that many cells of the boundary.
    pub holder_max_cells: usize,
    /// Band width and sample count of the concavity check, in cells.
    pub concavity_band_cells: usize,
    pub concavity_samples: usize,
    pub seed: u64,
}

impl Default for ConditionTolerances {
    fn default() -> Self {
        Self {
            state_samples: 9,
            time_samples: 3,
            final_time: 1.0,
            pointwise: 1e-10,
            holder_bound: 1e3,
            holder_max_cells: 10,
            concavity_band_cells: 10,
            concavity_samples: 1000,
            seed: 0,
        }
    }
}

/// Evaluates every structural condition on the nodes of `grid`. Failures are
/// reported, not raised; errors only signal inconsistent inputs.
pub fn validate_conditions(
    coeffs: &CoefficientSet,
    grid: &Grid,
    tolerances: &ConditionTolerances,
) -> Result<Vec<ConditionReport>> {
    if grid.domain() != coeffs.domain() {
        return Err(Error::InvalidDomain(String::from("grid and coefficients use different domains")));
    }
    if tolerances.state_samples == 0 || tolerances.time_samples == 0 {
        return Err(Error::InvalidParameter { name: "state_samples", value: 0.0 });
    }
    let (ulo, uhi) = coeffs.u_range();
    let states: Vec<f64> = linspace(ulo, uhi, tolerances.state_samples.max(2)).collect();
    let times: Vec<f64> = linspace(0.0, tolerances.final_time, tolerances.time_samples.max(2)).collect();
    Ok(vec![
        dominance(coeffs, grid, &states, &times, tolerances),
        concavity(grid, tolerances)?,
        holder(coeffs, grid, &states, &times, tolerances),
        boundary_gradient(coeffs, grid, &states, &times, tolerances),
        boundary_convection(coeffs, grid, tolerances),
    ])
}

fn dominance(
    coeffs: &CoefficientSet,
    grid: &Grid,
    states: &[f64],
    times: &[f64],
    tol: &ConditionTolerances,
) -> ConditionReport {
    let delta1 = coeffs.delta1();
    let mut grad = vec![0.0; grid.dim()];
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0;
    for &j in grid.interior() {
        let x = grid.point(j);
        for &t in times {
            for &s in states {
                coeffs.a_x(s, x, t, &mut grad);
                let at = coeffs.a_t(s, x, t);
                let sq = grad.iter().map(|g| g * g).sum::<f64>() + at * at;
                worst = worst.max(delta1 * sq - coeffs.a(s, x, t));
                count += 1;
            }
        }
    }
    if count == 0 {
        worst = 0.0;
    }
    ConditionReport::new(
        ConditionId::DiffusionDominatesGradient,
        worst,
        tol.pointwise,
        count,
        format!("max of δ₁|∇a|² - a with δ₁ = {delta1} over interior nodes, states and times"),
    )
}

fn concavity(grid: &Grid, tol: &ConditionTolerances) -> Result<ConditionReport> {
    let h = grid.max_spacing();
    let band = (tol.concavity_band_cells as f64 * h).min(0.5 * grid.domain().inradius());
    grid.domain().check_concavity_condition(band, tol.concavity_samples, h, tol.seed)
}

/// A point on the boundary face nearest to a boundary node. Ball nodes are
/// only within a cell of the sphere, so they are projected radially.
pub(crate) fn boundary_point(grid: &Grid, idx: usize) -> Vec<f64> {
    let p = grid.point(idx);
    match grid.domain().kind {
        DomainKind::UnitBall => grid.domain().project_to_boundary(p),
        _ => p.to_vec(),
    }
}

fn holder(
    coeffs: &CoefficientSet,
    grid: &Grid,
    states: &[f64],
    times: &[f64],
    tol: &ConditionTolerances,
) -> ConditionReport {
    let exponent = 2.0 + coeffs.delta2();
    let n = grid.dim();
    let cells = tol.holder_max_cells.max(1);
    let band = cells as f64 * grid.max_spacing();
    let domain = grid.domain();
    let mut worst_ratio = 0.0f64;
    let mut pairs = 0;
    for j in grid.active() {
        let x = grid.point(j);
        if domain.signed_distance(x) > band {
            continue;
        }
        for axis in 0..n {
            let mut y = j;
            for m in 1..=cells {
                match grid.active_neighbor(y, axis, true) {
                    Some(next) => y = next,
                    None => break,
                }
                let py = grid.point(y);
                let dist = m as f64 * grid.spacing()[axis];
                for &t in times {
                    for &s in states {
                        let ax = coeffs.a(s, x, t).max(0.0).sqrt();
                        let ay = coeffs.a(s, py, t).max(0.0).sqrt();
                        worst_ratio = worst_ratio.max((ax - ay).abs() / dist.powf(exponent));
                    }
                }
                pairs += 1;
            }
        }
    }
    ConditionReport::new(
        ConditionId::SqrtDiffusionHolder,
        worst_ratio,
        tol.holder_bound,
        pairs,
        format!(
            "max |√a(x)-√a(y)|/|x-y|^{exponent} over axis-aligned pairs 1..={cells} cells apart within {band} of the boundary"
        ),
    )
}

fn boundary_gradient(
    coeffs: &CoefficientSet,
    grid: &Grid,
    states: &[f64],
    times: &[f64],
    tol: &ConditionTolerances,
) -> ConditionReport {
    let mut grad = vec![0.0; grid.dim()];
    let mut worst = 0.0f64;
    let mut count = 0;
    for &j in grid.boundary() {
        let x = boundary_point(grid, j);
        for &t in times {
            for &s in states {
                coeffs.a_x(s, &x, t, &mut grad);
                worst = grad.iter().fold(worst, |w, g| w.max(g.abs()));
                count += 1;
            }
        }
    }
    ConditionReport::new(
        ConditionId::BoundaryGradientVanishes,
        worst,
        tol.pointwise,
        count,
        String::from("max |a_{x_i}| over boundary nodes, states and times"),
    )
}

fn boundary_convection(coeffs: &CoefficientSet, grid: &Grid, tol: &ConditionTolerances) -> ConditionReport {
    let mut f = vec![0.0; grid.dim()];
    let mut worst = 0.0f64;
    for &j in grid.boundary() {
        coeffs.f(&boundary_point(grid, j), &mut f);
        worst = f.iter().fold(worst, |w, v| w.max(v.abs()));
    }
    ConditionReport::new(
        ConditionId::BoundaryConvectionVanishes,
        worst,
        tol.pointwise,
        grid.boundary().len(),
        String::from("max |f_i| over boundary nodes"),
    )
}
