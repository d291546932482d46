//! Vanishing-viscosity solver for
//! `u_t = div(a(u,x,t) ∇u) + εΔu + f·∇u - c u + g`
//! and monitors for its a priori bounds.

mod config;
mod monitors;
mod scheme;

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

pub use config::{BoundaryMode, InterfaceRule, Scheme, SolverConfig};
pub use monitors::{
    energy_functional, l1_distance, sup_norm_monitor, total_variation, viscosity_sweep, SupNormReport, SweepEntry,
    SweepReport,
};
pub use scheme::{dissipation, Stepper};

use crate::geometry::Grid;
use crate::problem::CoefficientSet;
use crate::{Error, Result};

/// Nodal values at one time. Nodes outside the ball carry 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub t: f64,
    pub values: Vec<f64>,
}

impl Field {
    pub fn new(t: f64, values: Vec<f64>) -> Self {
        Self { t, values }
    }

    /// Samples `init` at every active node.
    pub fn from_fn(grid: &Grid, t: f64, init: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|j| if grid.is_active(j) { init(grid.point(j)) } else { 0.0 }).collect();
        Self { t, values }
    }

    pub fn zeros(grid: &Grid, t: f64) -> Self {
        Self { t, values: vec![0.0; grid.len()] }
    }

    /// `max |u|` over active nodes.
    pub fn sup_norm(&self, grid: &Grid) -> f64 {
        grid.active().map(|j| self.values[j].abs()).fold(0.0, f64::max)
    }

    /// `(min u, max u)` over active nodes.
    pub fn range(&self, grid: &Grid) -> (f64, f64) {
        grid.active()
            .map(|j| self.values[j])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}

/// Per-snapshot diagnostics recorded while solving.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Diagnostics {
    pub sup_norm: Vec<f64>,
    pub total_variation: Vec<f64>,
    /// `∫_0^t ∫ a |∇u|² dx dt` accumulated step by step (trapezoid in time).
    pub energy: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Grid,
    pub config: SolverConfig,
    /// The uniform step actually taken.
    pub dt: f64,
    pub steps: usize,
    pub snapshots: Vec<Field>,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &Field {
        self.snapshots.last().expect("a trajectory always holds the initial field")
    }
}

/// One step of the configured scheme. `config.dt` must be set or the
/// admissible step for the current field is taken.
pub fn step(field: &Field, grid: &Grid, coeffs: &CoefficientSet, config: &SolverConfig) -> Result<Field> {
    let mut stepper = Stepper::new(grid, coeffs, config)?;
    let (lo, hi) = field.range(grid);
    let dt = config.dt.unwrap_or_else(|| stepper.admissible_dt(lo, hi));
    let mut out = vec![0.0; grid.len()];
    stepper.advance(&field.values, field.t, dt, &mut out)?;
    Ok(Field::new(field.t + dt, out))
}

/// `count + 1` equispaced snapshot times on `[0, final_time]`.
pub fn uniform_times(final_time: f64, count: usize) -> Vec<f64> {
    let count = count.max(1);
    (0..=count).map(|i| if i == count { final_time } else { final_time * i as f64 / count as f64 }).collect()
}

/// Applies `sweeps` passes of nearest-neighbor averaging over active nodes,
/// leaving `fixed` nodes untouched.
fn smooth(grid: &Grid, values: &mut [f64], fixed: &[bool], sweeps: usize) {
    let mut next = values.to_vec();
    for _ in 0..sweeps {
        for j in grid.active().filter(|&j| !fixed[j]) {
            let mut sum = values[j];
            let mut count = 1.0;
            for axis in 0..grid.dim() {
                for forward in [false, true] {
                    if let Some(nb) = grid.active_neighbor(j, axis, forward) {
                        sum += values[nb];
                        count += 1.0;
                    }
                }
            }
            next[j] = sum / count;
        }
        values.copy_from_slice(&next);
    }
}

/// Largest `|u|` the a priori estimate allows on `[0, T]`:
/// `e^{CT}(‖u₀‖ + T‖g‖)` with `C = max(-min c, 0)`; without reaction and
/// source the range of `u₀` (and the zero boundary value) is kept.
fn a_priori_range(coeffs: &CoefficientSet, lo: f64, hi: f64, final_time: f64) -> (f64, f64) {
    let (cmin, _) = coeffs.reaction().bounds();
    let (gmin, gmax) = coeffs.source().bounds();
    if cmin >= 0.0 && coeffs.source().is_zero() {
        return (lo.min(0.0), hi.max(0.0));
    }
    let growth = (-cmin).max(0.0);
    let r = (growth * final_time).exp() * (lo.abs().max(hi.abs()) + final_time * gmin.abs().max(gmax.abs()));
    (-r, r)
}

/// Integrates from `u0` to `config.final_time` with a uniform step and
/// records a snapshot at the first step reaching each requested time. When
/// the requested times are equispaced the step count is a multiple of their
/// number, so every snapshot lands on its time exactly.
pub fn solve(
    u0: &Field,
    grid: &Grid,
    coeffs: &CoefficientSet,
    config: &SolverConfig,
    snapshot_times: &[f64],
) -> Result<Trajectory> {
    if u0.values.len() != grid.len() {
        return Err(Error::DimensionMismatch { expected: grid.len(), found: u0.values.len() });
    }
    let mut stepper = Stepper::new(grid, coeffs, config)?;
    let fixed = stepper.fixed().to_vec();
    let mut u = u0.values.clone();
    for j in grid.active().filter(|&j| fixed[j]) {
        if u[j].abs() > 1e-12 {
            return Err(Error::BoundaryDataMismatch { node: j, value: u[j] });
        }
        u[j] = 0.0;
    }
    smooth(grid, &mut u, &fixed, config.smoothing_sweeps);

    let final_time = config.final_time;
    let mut targets: Vec<f64> = snapshot_times.iter().copied().filter(|&t| t > 0.0 && t <= final_time).collect();
    targets.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
    targets.dedup();
    let (lo, hi) = Field::new(0.0, u.clone()).range(grid);
    let (steps, dt) = if final_time == 0.0 {
        (0, 0.0)
    } else {
        let dt_target = match config.dt {
            Some(dt) => dt,
            None => {
                let (rlo, rhi) = a_priori_range(coeffs, lo, hi, final_time);
                stepper.admissible_dt(rlo, rhi)
            }
        };
        let mut steps = (final_time / dt_target - 1e-9).ceil().max(1.0) as usize;
        // Equispaced snapshots then fall exactly on step boundaries.
        let m = targets.len();
        let uniform = m > 0
            && targets
                .iter()
                .enumerate()
                .all(|(i, t)| (t - final_time * (i + 1) as f64 / m as f64).abs() <= 1e-12 * final_time);
        if uniform {
            steps = steps.div_ceil(m) * m;
        }
        (steps, final_time / steps as f64)
    };
    let mut next_target = 0;

    let mut snapshots = vec![Field::new(0.0, u.clone())];
    let mut diagnostics = Diagnostics::default();
    let record = |d: &mut Diagnostics, values: &[f64], energy: f64| {
        let f = Field::new(0.0, values.to_vec());
        d.sup_norm.push(f.sup_norm(grid));
        d.total_variation.push(total_variation(grid, values));
        d.energy.push(energy);
    };
    record(&mut diagnostics, &u, 0.0);

    let mut next = vec![0.0; grid.len()];
    let mut energy = 0.0;
    let mut rate_now = stepper.dissipation(&u);
    for n in 0..steps {
        let t = dt * n as f64;
        stepper.advance(&u, t, dt, &mut next)?;
        core::mem::swap(&mut u, &mut next);
        let rate_next = stepper.dissipation(&u);
        energy += 0.5 * dt * (rate_now + rate_next);
        rate_now = rate_next;
        let t_new = if n + 1 == steps { final_time } else { dt * (n + 1) as f64 };
        while next_target < targets.len() && targets[next_target] <= t_new + 1e-9 * dt {
            next_target += 1;
            snapshots.push(Field::new(t_new, u.clone()));
            record(&mut diagnostics, &u, energy);
        }
    }
    Ok(Trajectory { grid: grid.clone(), config: config.clone(), dt, steps, snapshots, diagnostics })
}
