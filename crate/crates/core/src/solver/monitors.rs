//! Discrete versions of the a priori bounds and the viscosity sweep.

use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{dissipation, solve, uniform_times, Field, SolverConfig, Trajectory};
use crate::geometry::Grid;
use crate::problem::CoefficientSet;
use crate::{Error, Result};

/// Slack on the sup-norm bounds.
pub const SUP_NORM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupNormReport {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// `e^{Ct}(‖u₀‖ + t‖g‖)` with `C = max(-min c, 0)`.
    pub exponential_bound: Vec<f64>,
    pub exponential_ok: bool,
    /// The bound `‖u(t)‖ ≤ ‖u₀‖`, checked only when `c ≥ 0` and `g ≡ 0`.
    pub strict_ok: Option<bool>,
}

pub fn sup_norm_monitor(traj: &Trajectory, coeffs: &CoefficientSet) -> SupNormReport {
    let grid = &traj.grid;
    let times = traj.times();
    let norms: Vec<f64> = traj.snapshots.iter().map(|f| f.sup_norm(grid)).collect();
    let initial = norms.first().copied().unwrap_or(0.0);
    let (cmin, _) = coeffs.reaction().bounds();
    let (gmin, gmax) = coeffs.source().bounds();
    let growth = (-cmin).max(0.0);
    let gsup = gmin.abs().max(gmax.abs());
    let exponential_bound: Vec<f64> = times.iter().map(|&t| (growth * t).exp() * (initial + t * gsup)).collect();
    let exponential_ok = norms.iter().zip(&exponential_bound).all(|(n, b)| *n <= b + SUP_NORM_SLACK);
    let strict_ok =
        (cmin >= 0.0 && coeffs.source().is_zero()).then(|| norms.iter().all(|n| *n <= initial + SUP_NORM_SLACK));
    SupNormReport { times, norms, exponential_bound, exponential_ok, strict_ok }
}

/// `Σ_faces |Δu| · area`: the discrete `∫|∇u|₁ dx`.
pub fn total_variation(grid: &Grid, values: &[f64]) -> f64 {
    grid.faces().iter().map(|f| (values[f.upper] - values[f.lower]).abs() * f.area).sum()
}

/// `Σ_j V_j |u_j - v_j|` over active nodes.
pub fn l1_distance(grid: &Grid, u: &[f64], v: &[f64]) -> f64 {
    grid.active().map(|j| grid.volume(j) * (u[j] - v[j]).abs()).sum()
}

/// `∬ a(u,x,t) |∇u|² dx dt`: face-midpoint rule in space, trapezoid over
/// the snapshot times.
pub fn energy_functional(traj: &Trajectory, coeffs: &CoefficientSet) -> Result<f64> {
    if traj.snapshots.len() < 2 {
        return Err(Error::InvalidParameter { name: "snapshots", value: traj.snapshots.len() as f64 });
    }
    let rates: Vec<f64> = traj.snapshots.iter().map(|f| dissipation(&traj.grid, coeffs, &f.values)).collect();
    Ok(traj.snapshots.windows(2).zip(rates.windows(2)).map(|(s, r)| 0.5 * (s[1].t - s[0].t) * (r[0] + r[1])).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub epsilon: f64,
    pub dt: f64,
    pub steps: usize,
    pub sup_norm: Vec<f64>,
    pub total_variation: Vec<f64>,
    /// Snapshot-trapezoid energy.
    pub energy: f64,
    /// Step-accumulated energy.
    pub energy_accumulated: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub epsilons: Vec<f64>,
    pub times: Vec<f64>,
    pub entries: Vec<SweepEntry>,
    /// `‖u_{ε_i}(T) - u_{ε_{i+1}}(T)‖_{L¹}`.
    pub pairwise_l1: Vec<f64>,
    pub cauchy_nonincreasing: bool,
    #[serde(skip)]
    pub finals: Vec<Field>,
}

/// Solves for every `ε` (strictly decreasing, positive) on a common grid with
/// `snapshot_count` equispaced snapshots.
pub fn viscosity_sweep(
    u0: &Field,
    grid: &Grid,
    coeffs: &CoefficientSet,
    base: &SolverConfig,
    epsilons: &[f64],
    snapshot_count: usize,
) -> Result<SweepReport> {
    if let Some(bad) = epsilons.iter().find(|&&e| !(e > 0.0)) {
        return Err(Error::InvalidParameter { name: "epsilons", value: *bad });
    }
    if let Some(w) = epsilons.windows(2).find(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter { name: "epsilons", value: w[1] });
    }
    let times = uniform_times(base.final_time, snapshot_count);
    let mut entries = Vec::with_capacity(epsilons.len());
    let mut finals = Vec::with_capacity(epsilons.len());
    for &epsilon in epsilons {
        let config = base.clone().with_epsilon(epsilon);
        let traj = solve(u0, grid, coeffs, &config, &times)?;
        let energy = if traj.snapshots.len() >= 2 { energy_functional(&traj, coeffs)? } else { 0.0 };
        entries.push(SweepEntry {
            epsilon,
            dt: traj.dt,
            steps: traj.steps,
            sup_norm: traj.diagnostics.sup_norm.clone(),
            total_variation: traj.diagnostics.total_variation.clone(),
            energy,
            energy_accumulated: traj.diagnostics.energy.last().copied().unwrap_or(0.0),
        });
        finals.push(traj.last().clone());
    }
    let pairwise_l1: Vec<f64> = finals.windows(2).map(|w| l1_distance(grid, &w[0].values, &w[1].values)).collect();
    let cauchy_nonincreasing = pairwise_l1.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    Ok(SweepReport { epsilons: epsilons.to_vec(), times, entries, pairwise_l1, cauchy_nonincreasing, finals })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::problem::{CoefficientSpec, Diffusion, ScalarField};
    use crate::solver::BoundaryMode;
    use alloc::vec;
    use core::f64::consts::PI;

    fn unit(counts: &[usize]) -> Grid {
        Grid::new(DomainSpec::unit_cube(counts.len()).unwrap(), counts).unwrap()
    }

    fn set(grid: &Grid, spec: CoefficientSpec) -> CoefficientSet {
        CoefficientSet::new(grid.domain().clone(), spec).unwrap()
    }

    #[test]
    fn total_variation_examples() {
        let g = unit(&[17]);
        let constant = vec![3.0; 17];
        assert_eq!(total_variation(&g, &constant), 0.0);
        let ramp: Vec<f64> = (0..17).map(|i| i as f64 / 16.0).collect();
        assert!((total_variation(&g, &ramp) - 1.0).abs() < 1e-15);
        let boxed: Vec<f64> = (0..17).map(|i| if (5..10).contains(&i) { 1.0 } else { 0.0 }).collect();
        assert_eq!(total_variation(&g, &boxed), 2.0);
    }

    #[test]
    fn frozen_sine_energy_is_half_pi_squared() {
        let g = unit(&[257]);
        let c = set(&g, CoefficientSpec { diffusion: Diffusion::constant(1.0), ..Default::default() });
        let u = Field::from_fn(&g, 0.0, |x| (PI * x[0]).sin()).values;
        let traj = Trajectory {
            grid: g.clone(),
            config: SolverConfig::new(1.0),
            dt: 1.0,
            steps: 1,
            snapshots: vec![Field::new(0.0, u.clone()), Field::new(1.0, u)],
            diagnostics: Default::default(),
        };
        let e = energy_functional(&traj, &c).unwrap();
        assert!((e - PI * PI / 2.0).abs() < 1e-3, "{e}");
        let zero = set(&g, CoefficientSpec::default());
        assert_eq!(energy_functional(&traj, &zero).unwrap(), 0.0);
    }

    #[test]
    fn source_growth_obeys_linear_bound() {
        let g = unit(&[33]);
        let c = set(
            &g,
            CoefficientSpec {
                diffusion: Diffusion::constant(1.0),
                source: ScalarField::constant(1.0),
                ..Default::default()
            },
        );
        let u0 = Field::zeros(&g, 0.0);
        let traj = solve(&u0, &g, &c, &SolverConfig::new(0.3), &uniform_times(0.3, 6)).unwrap();
        let r = sup_norm_monitor(&traj, &c);
        assert!(r.exponential_ok);
        assert!(r.strict_ok.is_none());
        for (n, t) in r.norms.iter().zip(&r.times) {
            assert!(*n <= t + 1e-12);
        }
    }

    #[test]
    fn zero_data_gives_zero_norms() {
        let g = unit(&[9, 9]);
        let c =
            set(&g, CoefficientSpec { diffusion: Diffusion::state_squared_distance_power(2.0), ..Default::default() });
        let traj = solve(&Field::zeros(&g, 0.0), &g, &c, &SolverConfig::new(0.1), &uniform_times(0.1, 3)).unwrap();
        let r = sup_norm_monitor(&traj, &c);
        assert!(r.norms.iter().all(|&n| n == 0.0));
        assert_eq!(r.strict_ok, Some(true));
    }

    #[test]
    fn sweep_rejects_unordered_viscosities_and_handles_singletons() {
        let g = unit(&[17]);
        let c = set(&g, CoefficientSpec { diffusion: Diffusion::constant(1.0), ..Default::default() });
        let u0 = Field::from_fn(&g, 0.0, |x| (PI * x[0]).sin());
        let base = SolverConfig::new(0.01);
        assert!(viscosity_sweep(&u0, &g, &c, &base, &[0.1, 0.2], 2).is_err());
        let r = viscosity_sweep(&u0, &g, &c, &base, &[0.1], 2).unwrap();
        assert!(r.pairwise_l1.is_empty());
        assert_eq!(r.entries.len(), 1);
    }

    #[test]
    fn uniformly_parabolic_sweep_is_cauchy() {
        let g = unit(&[65]);
        let c = set(&g, CoefficientSpec { diffusion: Diffusion::constant(1.0), ..Default::default() });
        let u0 = Field::from_fn(&g, 0.0, |x| (PI * x[0]).sin());
        let base = SolverConfig::new(0.05).with_boundary(BoundaryMode::DirichletAll);
        let r = viscosity_sweep(&u0, &g, &c, &base, &[8e-3, 4e-3, 2e-3, 1e-3], 2).unwrap();
        for w in r.pairwise_l1.windows(2) {
            assert!(w[1] <= 0.5 * w[0] * 1.05, "{:?}", r.pairwise_l1);
        }
        assert!(r.cauchy_nonincreasing);
    }
}
