//! L¹ stability of a pair of trajectories and the comparison functional.

use alloc::format;
use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::entropy::Quadrature;
use super::test_function::{SpatialTest, TestFunction, TimeBump};
use crate::problem::CoefficientSet;
use crate::solver::{l1_distance, Trajectory};
use crate::{Error, Result};

/// Absolute slack on every discrete Gronwall comparison.
pub const GRONWALL_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub times: Vec<f64>,
    /// `∫|u-v| dx` at each snapshot.
    pub distances: Vec<f64>,
    pub initial_distance: f64,
    /// `∫|u-v|(T) / ∫|u₀-v₀|`; `None` when the initial distance is zero.
    pub final_ratio: Option<f64>,
    /// Slope of `ln ∫|u-v|` against `t` by least squares.
    pub c_fit: f64,
    pub c_declared: f64,
    /// Largest `D(τ) - D(s) - c∫_s^τ D` over snapshot pairs `s < τ`.
    pub worst_gronwall_excess: f64,
    /// Largest increase of the distance between consecutive snapshots.
    pub max_step_increase: f64,
    pub nonincreasing: bool,
    /// The Gronwall inequality held for every pair.
    pub pass: bool,
}

fn check_compatible(u: &Trajectory, v: &Trajectory) -> Result<()> {
    if u.grid.counts() != v.grid.counts() || u.grid.domain() != v.grid.domain() {
        return Err(Error::IncompatibleTrajectories("grids differ".into()));
    }
    if u.snapshots.len() != v.snapshots.len() {
        return Err(Error::IncompatibleTrajectories(format!(
            "{} snapshots against {}",
            u.snapshots.len(),
            v.snapshots.len()
        )));
    }
    for (a, b) in u.snapshots.iter().zip(&v.snapshots) {
        if (a.t - b.t).abs() > 1e-12 * (1.0 + a.t.abs()) {
            return Err(Error::IncompatibleTrajectories(format!("snapshot times {} and {} differ", a.t, b.t)));
        }
    }
    Ok(())
}

/// Least-squares slope of `ln y` against `t` over the positive entries.
fn log_linear_slope(t: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = t.iter().zip(y).filter(|(_, y)| **y > 0.0).map(|(t, y)| (*t, y.ln())).collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Distance series of two trajectories on one grid, checked against
/// `D(τ) ≤ D(s) + c ∫_s^τ D dt` for every snapshot pair with the trapezoid
/// rule in time.
pub fn l1_contraction_report(u: &Trajectory, v: &Trajectory, c_declared: f64) -> Result<StabilityReport> {
    check_compatible(u, v)?;
    if !c_declared.is_finite() {
        return Err(Error::InvalidParameter { name: "c_declared", value: c_declared });
    }
    let grid = &u.grid;
    let times = u.times();
    let distances: Vec<f64> =
        u.snapshots.iter().zip(&v.snapshots).map(|(a, b)| l1_distance(grid, &a.values, &b.values)).collect();
    // cumulative[m] = ∫_{t_0}^{t_m} D
    let mut cumulative = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for m in 1..times.len() {
        acc += 0.5 * (times[m] - times[m - 1]) * (distances[m] + distances[m - 1]);
        cumulative.push(acc);
    }
    let mut worst = f64::NEG_INFINITY;
    for s in 0..times.len() {
        for tau in s + 1..times.len() {
            let excess = distances[tau] - distances[s] - c_declared * (cumulative[tau] - cumulative[s]);
            worst = worst.max(excess);
        }
    }
    if times.len() < 2 {
        worst = 0.0;
    }
    let max_step_increase = distances.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let max_step_increase = if distances.len() < 2 { 0.0 } else { max_step_increase };
    let initial_distance = distances[0];
    let last = *distances.last().unwrap();
    Ok(StabilityReport {
        c_fit: log_linear_slope(&times, &distances),
        final_ratio: (initial_distance > 0.0).then(|| last / initial_distance),
        initial_distance,
        c_declared,
        pass: worst <= GRONWALL_SLACK,
        worst_gronwall_excess: worst,
        nonincreasing: max_step_increase <= GRONWALL_SLACK,
        max_step_increase,
        times,
        distances,
    })
}

/// Terms of the comparison functional with `φ = θ(t) φ_λ(x)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTerms {
    /// `|u-v| φ_t`
    pub time: f64,
    /// `sgn(u-v)[A(u)-A(v)] Δφ`, part with `-2|∇d|²/λ²`.
    pub diffusion_flat: f64,
    /// Part with `-2(d-λ)Δd/λ²`; boundary-localized.
    pub diffusion_curvature: f64,
    /// `∫_v^u a_{x_i} sgn(s-v) ds φ_{x_i}`; boundary-localized.
    pub gradient_from_v: f64,
    /// `∫_u^v a_{x_i} sgn(s-u) ds φ_{x_i}`; boundary-localized.
    pub gradient_from_u: f64,
    /// `-f_i φ_{x_i} |u-v|`; boundary-localized.
    pub convection: f64,
    /// `-div f φ |u-v|`
    pub divergence: f64,
    /// `-c φ |u-v|`
    pub reaction: f64,
}

impl ComparisonTerms {
    pub fn total(&self) -> f64 {
        self.time
            + self.diffusion_flat
            + self.diffusion_curvature
            + self.gradient_from_v
            + self.gradient_from_u
            + self.convection
            + self.divergence
            + self.reaction
    }

    /// Magnitudes of the four terms supported in the band `d < λ`:
    /// the two `a_{x_i}` integrals, the convection and the curvature term.
    pub fn boundary_magnitudes(&self) -> [f64; 4] {
        [self.gradient_from_v.abs(), self.gradient_from_u.abs(), self.convection.abs(), self.diffusion_curvature.abs()]
    }
}

/// The comparison functional for `u` and `v` with `φ = θ(t) φ_λ(x)`. Both
/// trajectories are assumed to solve the equation with `coeffs`.
pub fn comparison_functional(
    u: &Trajectory,
    v: &Trajectory,
    coeffs: &CoefficientSet,
    lambda: f64,
    window: TimeBump,
) -> Result<ComparisonTerms> {
    check_compatible(u, v)?;
    let test = TestFunction::new(window, SpatialTest::BoundaryWeight { lambda });
    let q = Quadrature::new(u, coeffs, &test)?;
    let grid = &u.grid;
    let state = coeffs.state_factor();
    let mut out = ComparisonTerms::default();
    for &(m, wt, wt_t) in &q.times {
        let (su, sv) = (&u.snapshots[m], &v.snapshots[m]);
        for s in &q.nodes {
            let (a, b) = (su.values[s.index], sv.values[s.index]);
            let dist = (a - b).abs();
            if dist == 0.0 {
                continue;
            }
            // sgn(u-v)(S(u)-S(v)) = ∫_v^u state sgn(s-v) ds = ∫_u^v state sgn(s-u) ds
            let spread = (state.antiderivative(a) - state.antiderivative(b)).abs();
            let vol = s.volume;
            out.time += wt_t * vol * dist * s.psi;
            out.diffusion_flat += wt * vol * spread * s.weight_lap_flat;
            out.diffusion_curvature += wt * vol * spread * s.weight_lap_curvature;
            out.gradient_from_v += wt * vol * spread * s.weight_grad_dot;
            out.gradient_from_u += wt * vol * spread * s.weight_grad_dot;
            out.convection -= wt * vol * dist * s.f_dot;
            out.divergence -= wt * vol * s.div_f * s.psi * dist;
            let x = grid.point(s.index);
            out.reaction -= wt * vol * coeffs.c(x, su.t) * s.psi * dist;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainSpec, Grid};
    use crate::problem::{CoefficientSpec, Diffusion, ScalarField};
    use crate::solver::{solve, uniform_times, BoundaryMode, Field, SolverConfig};
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn unit(n: usize) -> Grid {
        Grid::new(DomainSpec::unit_cube(1).unwrap(), &[n]).unwrap()
    }

    fn run(grid: &Grid, c: &CoefficientSet, u0: impl Fn(&[f64]) -> f64, t: f64, count: usize) -> Trajectory {
        let config = SolverConfig::new(t).with_boundary(BoundaryMode::None).with_dt(t / (50 * count) as f64);
        solve(&Field::from_fn(grid, 0.0, u0), grid, c, &config, &uniform_times(t, count)).unwrap()
    }

    #[test]
    fn identical_runs_have_zero_distance() {
        let g = unit(33);
        let c = CoefficientSet::new(
            g.domain().clone(),
            CoefficientSpec { diffusion: Diffusion::constant(1.0), ..Default::default() },
        )
        .unwrap();
        let u = run(&g, &c, |x| (PI * x[0]).sin(), 0.05, 5);
        let r = l1_contraction_report(&u, &u, 0.0).unwrap();
        assert!(r.distances.iter().all(|&d| d == 0.0));
        assert!(r.pass && r.final_ratio.is_none());
        let f = comparison_functional(&u, &u, &c, 0.2, TimeBump::new(0.01, 0.04).unwrap()).unwrap();
        assert_eq!(f.total(), 0.0);
    }

    #[test]
    fn growth_rate_is_fitted() {
        let g = unit(33);
        let spec = CoefficientSpec {
            reaction: ScalarField::constant(-1.0),
            u_range: Some([-10.0, 10.0]),
            ..Default::default()
        };
        let c = CoefficientSet::new(g.domain().clone(), spec).unwrap();
        let u = run(&g, &c, |x| x[0], 1.0, 20);
        let v = run(&g, &c, |x| 0.5 * x[0], 1.0, 20);
        let r = l1_contraction_report(&u, &v, 1.1).unwrap();
        assert!((r.c_fit - 1.0).abs() < 0.05, "{}", r.c_fit);
        assert!(r.pass);
        assert!(!l1_contraction_report(&u, &v, 0.5).unwrap().pass);
    }

    #[test]
    fn mismatched_trajectories_are_rejected() {
        let g = unit(17);
        let h = unit(33);
        let c = CoefficientSet::new(g.domain().clone(), CoefficientSpec::default()).unwrap();
        let a = run(&g, &c, |x| x[0], 0.1, 4);
        let b = run(&h, &c, |x| x[0], 0.1, 4);
        let d = run(&g, &c, |x| x[0], 0.1, 5);
        assert!(matches!(l1_contraction_report(&a, &b, 0.0), Err(Error::IncompatibleTrajectories(_))));
        assert!(matches!(l1_contraction_report(&a, &d, 0.0), Err(Error::IncompatibleTrajectories(_))));
    }

    #[test]
    fn pure_reaction_functional_matches_direct_sum() {
        let g = unit(65);
        let spec = CoefficientSpec {
            reaction: ScalarField::constant(-1.0),
            u_range: Some([-10.0, 10.0]),
            ..Default::default()
        };
        let c = CoefficientSet::new(g.domain().clone(), spec).unwrap();
        let u = run(&g, &c, |x| (PI * x[0]).sin(), 0.5, 25);
        let v = run(&g, &c, |_| 0.2, 0.5, 25);
        let lambda = 0.1;
        let window = TimeBump::new(0.05, 0.45).unwrap();
        let f = comparison_functional(&u, &v, &c, lambda, window).unwrap();
        // Direct: Σ_m w_m Σ_j V_j |u-v| (θ' φ_λ + θ φ_λ)
        let times = u.times();
        let mut direct = 0.0;
        for (m, t) in times.iter().enumerate() {
            let w = if m == 0 || m + 1 == times.len() { 0.5 } else { 1.0 } * (times[1] - times[0]);
            for j in g.active() {
                let d = g.point(j)[0].min(1.0 - g.point(j)[0]);
                let phi = if d < lambda { 1.0 - (d - lambda) * (d - lambda) / (lambda * lambda) } else { 1.0 };
                let dist = (u.snapshots[m].values[j] - v.snapshots[m].values[j]).abs();
                direct += w * g.volume(j) * dist * phi * (window.derivative(*t) + window.value(*t));
            }
        }
        assert!((f.total() - direct).abs() < 1e-8, "{} vs {direct}", f.total());
        assert_eq!(f.boundary_magnitudes(), [0.0; 4]);
    }

    #[test]
    fn lambda_must_fit_inside() {
        let g = unit(17);
        let c = CoefficientSet::new(g.domain().clone(), CoefficientSpec::default()).unwrap();
        let u = run(&g, &c, |x| x[0], 0.1, 4);
        let w = TimeBump::new(0.0, 0.1).unwrap();
        assert!(matches!(comparison_functional(&u, &u, &c, 0.5, w), Err(Error::InvalidParameter { .. })));
        assert!(comparison_functional(&u, &u, &c, 0.0, w).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn report_is_symmetric(a in -1.0f64..1.0, b in -1.0f64..1.0) {
            let g = unit(17);
            let c = CoefficientSet::new(g.domain().clone(), CoefficientSpec {
                diffusion: Diffusion::state_squared_distance_power(2.0),
                ..Default::default()
            }).unwrap();
            let u = run(&g, &c, |x| a * (PI * x[0]).sin(), 0.05, 4);
            let v = run(&g, &c, |x| b * x[0], 0.05, 4);
            let uv = l1_contraction_report(&u, &v, 0.0).unwrap();
            let vu = l1_contraction_report(&v, &u, 0.0).unwrap();
            prop_assert_eq!(&uv.distances, &vu.distances);
            prop_assert!(uv.distances.iter().all(|&d| d >= 0.0));
            prop_assert_eq!(uv.distances.len(), 5);
        }
    }

    #[test]
    fn monotone_runs_contract_on_small_grids() {
        for n in [9usize, 33, 64] {
            let g = unit(n);
            let c = CoefficientSet::new(
                g.domain().clone(),
                CoefficientSpec { diffusion: Diffusion::state_squared_distance_power(2.0), ..Default::default() },
            )
            .unwrap();
            let u = run(&g, &c, |x| if x[0] < 0.5 { 0.9 } else { -0.3 }, 0.2, 20);
            let v = run(&g, &c, |x| 0.5 * (2.0 * PI * x[0]).sin(), 0.2, 20);
            let r = l1_contraction_report(&u, &v, 0.0).unwrap();
            assert!(r.pass && r.nonincreasing, "{n}: {:?}", r.distances);
        }
    }
}
