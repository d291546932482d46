//! The partial boundary: boundary points where Dirichlet data must be imposed.
//!
//! A boundary point with inner normal `n` belongs to the partial boundary when
//! the drift enters the domain there (`f·n < 0`), when the diffusion has a
//! nonzero normal gradient (`Σ a_{x_i} n_i ≠ 0`), or when the diffusion does
//! not vanish. The state argument of `a` is swept over `u_range`: a point
//! qualifies if some attainable state fires the criterion. For diffusion that
//! does not depend on the state the set reduces to the classical Fichera set
//! `{a > 0} ∪ {f·n < 0}`.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::geometry::{DomainKind, DomainSpec, Grid};
use crate::problem::conditions::boundary_point;
use crate::problem::CoefficientSet;
use crate::sampling::linspace;
use crate::{Error, Result};

/// Default threshold for the `≠ 0` and `< 0` decisions.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_STATE_SAMPLES: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    /// `f·n < -tol`
    Convection,
    /// `max_s |Σ a_{x_i}(s) n_i| > tol`
    DiffusionGradient,
    /// `max_s a(s) > tol`
    DiffusionPositive,
}

/// Outcome of the membership test at one boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub triggers: Vec<Trigger>,
    pub normal: Vec<f64>,
    /// `Σ f_i n_i`
    pub convection_flux: f64,
    /// `max_s |Σ a_{x_i}(s, x, t) n_i|`
    pub max_normal_gradient: f64,
    /// `max_s a(s, x, t)`
    pub max_diffusion: f64,
}

impl Membership {
    pub fn has(&self, trigger: Trigger) -> bool {
        self.triggers.contains(&trigger)
    }
}

/// Membership of `point` in the partial boundary at time `t`, with the
/// state slot swept over `state_samples` equispaced values of `u_range`.
pub fn partial_boundary_membership(
    coeffs: &CoefficientSet,
    point: &[f64],
    t: f64,
    state_samples: usize,
    tol: f64,
) -> Result<Membership> {
    let normal = coeffs.domain().inner_normal(point, 1e-9)?;
    membership_with_normal(coeffs, point, &normal, t, state_samples, tol)
}

fn membership_with_normal(
    coeffs: &CoefficientSet,
    point: &[f64],
    normal: &[f64],
    t: f64,
    state_samples: usize,
    tol: f64,
) -> Result<Membership> {
    if state_samples == 0 {
        return Err(Error::InvalidParameter { name: "state_samples", value: 0.0 });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter { name: "tol", value: tol });
    }
    let n = coeffs.dim();
    let mut f = vec![0.0; n];
    coeffs.f(point, &mut f);
    let convection_flux: f64 = f.iter().zip(normal).map(|(a, b)| a * b).sum();

    let (lo, hi) = coeffs.u_range();
    let mut grad = vec![0.0; n];
    let mut max_normal_gradient = 0.0f64;
    let mut max_diffusion = 0.0f64;
    for s in linspace(lo, hi, state_samples.max(1)) {
        coeffs.a_x(s, point, t, &mut grad);
        let dn: f64 = grad.iter().zip(normal).map(|(a, b)| a * b).sum();
        max_normal_gradient = max_normal_gradient.max(dn.abs());
        max_diffusion = max_diffusion.max(coeffs.a(s, point, t));
    }

    let mut triggers = Vec::new();
    if convection_flux < -tol {
        triggers.push(Trigger::Convection);
    }
    if max_normal_gradient > tol {
        triggers.push(Trigger::DiffusionGradient);
    }
    if max_diffusion > tol {
        triggers.push(Trigger::DiffusionPositive);
    }
    Ok(Membership {
        member: !triggers.is_empty(),
        triggers,
        normal: normal.to_vec(),
        convection_flux,
        max_normal_gradient,
        max_diffusion,
    })
}

/// The classical Fichera test for a linear equation with diffusion `a_lin(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FicheraMembership {
    pub member: bool,
    /// `a(x) > tol`
    pub diffusion_clause: bool,
    /// `f·n < -tol`
    pub convection_clause: bool,
}

pub fn fichera_membership(
    domain: &DomainSpec,
    a_lin: impl Fn(&[f64]) -> f64,
    f: impl Fn(&[f64], &mut [f64]),
    point: &[f64],
    tol: f64,
) -> Result<FicheraMembership> {
    let normal = domain.inner_normal(point, 1e-9)?;
    let mut v = vec![0.0; domain.dim()];
    f(point, &mut v);
    let flux: f64 = v.iter().zip(&normal).map(|(a, b)| a * b).sum();
    let diffusion_clause = a_lin(point) > tol;
    let convection_clause = flux < -tol;
    Ok(FicheraMembership { member: diffusion_clause || convection_clause, diffusion_clause, convection_clause })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierOptions {
    pub state_samples: usize,
    pub tol: f64,
}

impl Default for ClassifierOptions {
    fn default() -> Self {
        Self { state_samples: DEFAULT_STATE_SAMPLES, tol: DEFAULT_TOLERANCE }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryNodeRecord {
    pub node: usize,
    /// The boundary point the tests were evaluated at (ball nodes are
    /// projected onto the sphere).
    pub point: Vec<f64>,
    /// `None` where the normal is not unique (box edges and corners).
    pub membership: Option<Membership>,
    /// Only for state-independent diffusion.
    pub fichera: Option<FicheraMembership>,
    /// At unclassifiable nodes: membership under each incident face normal.
    pub per_face: Vec<Membership>,
}

impl BoundaryNodeRecord {
    pub fn classifiable(&self) -> bool {
        self.membership.is_some()
    }

    pub fn in_partial_boundary(&self) -> Option<bool> {
        self.membership.as_ref().map(|m| m.member)
    }

    /// Whether a solver should impose Dirichlet data here. Unclassifiable
    /// nodes are constrained when any incident face would be.
    pub fn needs_dirichlet(&self) -> bool {
        match &self.membership {
            Some(m) => m.member,
            None => self.per_face.iter().any(|m| m.member),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassificationSummary {
    pub boundary_nodes: usize,
    pub members: usize,
    pub unclassifiable: usize,
    pub convection: usize,
    pub diffusion_gradient: usize,
    pub diffusion_positive: usize,
    pub fichera_members: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryClassification {
    pub t: f64,
    pub options: ClassifierOptions,
    pub nodes: Vec<BoundaryNodeRecord>,
    pub summary: ClassificationSummary,
}

impl BoundaryClassification {
    /// Per-node mask over the whole grid of nodes needing Dirichlet data.
    pub fn dirichlet_mask(&self, grid_len: usize) -> Vec<bool> {
        let mut mask = vec![false; grid_len];
        for r in &self.nodes {
            mask[r.node] = r.needs_dirichlet();
        }
        mask
    }
}

/// Classifies every boundary node of `grid` at time `t`.
pub fn classify_boundary(
    grid: &Grid,
    coeffs: &CoefficientSet,
    t: f64,
    options: &ClassifierOptions,
) -> Result<BoundaryClassification> {
    if grid.domain() != coeffs.domain() {
        return Err(Error::InvalidDomain("grid and coefficients use different domains".into()));
    }
    let domain = grid.domain();
    let linear = coeffs.is_state_independent();
    let (lo, _) = coeffs.u_range();
    let mut nodes = Vec::with_capacity(grid.boundary().len());
    let mut summary = ClassificationSummary {
        boundary_nodes: grid.boundary().len(),
        fichera_members: linear.then_some(0),
        ..Default::default()
    };
    let geom_tol = 1e-9 * grid.max_spacing();
    for &j in grid.boundary() {
        let point = boundary_point(grid, j);
        let normals = match domain.kind {
            DomainKind::UnitBall => vec![domain.inner_normal(&point, geom_tol)?],
            _ => domain.incident_normals(&point, geom_tol),
        };
        let mut record = BoundaryNodeRecord { node: j, point, membership: None, fichera: None, per_face: Vec::new() };
        if normals.len() == 1 {
            let m = membership_with_normal(coeffs, &record.point, &normals[0], t, options.state_samples, options.tol)?;
            summary.members += m.member as usize;
            summary.convection += m.has(Trigger::Convection) as usize;
            summary.diffusion_gradient += m.has(Trigger::DiffusionGradient) as usize;
            summary.diffusion_positive += m.has(Trigger::DiffusionPositive) as usize;
            if linear {
                let fm = fichera_membership(
                    domain,
                    |x| coeffs.a(lo, x, t),
                    |x, out| coeffs.f(x, out),
                    &record.point,
                    options.tol,
                )?;
                if let Some(c) = summary.fichera_members.as_mut() {
                    *c += fm.member as usize;
                }
                record.fichera = Some(fm);
            }
            record.membership = Some(m);
        } else {
            summary.unclassifiable += 1;
            for n in &normals {
                record.per_face.push(membership_with_normal(
                    coeffs,
                    &record.point,
                    n,
                    t,
                    options.state_samples,
                    options.tol,
                )?);
            }
        }
        nodes.push(record);
    }
    Ok(BoundaryClassification { t, options: *options, nodes, summary })
}

/// Classification at several times, with the union view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSweep {
    pub snapshots: Vec<BoundaryClassification>,
    /// Node indices that are members at some sampled time.
    pub union: Vec<usize>,
    /// Whether membership changed between sampled times.
    pub varied: bool,
}

pub fn classify_over_times(
    grid: &Grid,
    coeffs: &CoefficientSet,
    times: &[f64],
    options: &ClassifierOptions,
) -> Result<TimeSweep> {
    let snapshots = times.iter().map(|&t| classify_boundary(grid, coeffs, t, options)).collect::<Result<Vec<_>>>()?;
    let mut union = Vec::new();
    let mut varied = false;
    if let Some(first) = snapshots.first() {
        for (i, r) in first.nodes.iter().enumerate() {
            let states: Vec<bool> = snapshots.iter().map(|s| s.nodes[i].needs_dirichlet()).collect();
            if states.iter().any(|&b| b) {
                union.push(r.node);
            }
            varied |= states.iter().any(|&b| b != states[0]);
        }
    }
    Ok(TimeSweep { snapshots, union, varied })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{CoefficientSpec, Convection, Diffusion, SpaceFactor, StateFactor};
    use proptest::prelude::*;

    fn interval(spec: CoefficientSpec) -> CoefficientSet {
        CoefficientSet::new(DomainSpec::unit_cube(1).unwrap(), spec).unwrap()
    }

    fn members(c: &BoundaryClassification) -> Vec<usize> {
        c.nodes.iter().filter(|r| r.in_partial_boundary() == Some(true)).map(|r| r.node).collect()
    }

    #[test]
    fn nothing_fires_without_diffusion_or_inflow() {
        let c = interval(CoefficientSpec::default());
        for x in [0.0, 1.0] {
            let m = partial_boundary_membership(&c, &[x], 0.0, 9, DEFAULT_TOLERANCE).unwrap();
            assert!(!m.member);
        }
    }

    #[test]
    fn bubble_fires_through_the_gradient() {
        let c = interval(CoefficientSpec {
            diffusion: Diffusion::new(1.0, StateFactor::One, SpaceFactor::Bubble),
            ..Default::default()
        });
        let m = partial_boundary_membership(&c, &[0.0], 0.0, 9, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(m.triggers, vec![Trigger::DiffusionGradient]);
        assert_eq!(m.max_diffusion, 0.0);
    }

    #[test]
    fn drift_fires_only_at_the_outflow_normal() {
        let c = interval(CoefficientSpec {
            convection: Convection::Constant { velocity: vec![1.0] },
            ..Default::default()
        });
        assert!(!partial_boundary_membership(&c, &[0.0], 0.0, 9, DEFAULT_TOLERANCE).unwrap().member);
        let m = partial_boundary_membership(&c, &[1.0], 0.0, 9, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(m.triggers, vec![Trigger::Convection]);
        assert_eq!(m.convection_flux, -1.0);
    }

    #[test]
    fn distance_weighted_family_has_empty_partial_boundary() {
        let domain = DomainSpec::unit_cube(2).unwrap();
        let c = CoefficientSet::new(
            domain.clone(),
            CoefficientSpec {
                diffusion: Diffusion::state_squared_distance_power(2.0),
                convection: Convection::DistanceWeighted { velocity: vec![1.0, -1.0], power: 1.0 },
                ..Default::default()
            },
        )
        .unwrap();
        let grid = Grid::new(domain, &[9, 9]).unwrap();
        let cls = classify_boundary(&grid, &c, 0.0, &ClassifierOptions::default()).unwrap();
        assert_eq!(cls.summary.members, 0);
        assert_eq!(cls.summary.unclassifiable, 4);
        assert!(cls.dirichlet_mask(grid.len()).iter().all(|&b| !b));
    }

    #[test]
    fn linear_distance_weight_fires_at_both_ends() {
        let domain = DomainSpec::unit_cube(1).unwrap();
        let c = CoefficientSet::new(
            domain.clone(),
            CoefficientSpec {
                diffusion: Diffusion::new(
                    1.0,
                    StateFactor::Polynomial { coefficients: vec![0.0, 0.0, 1.0] },
                    SpaceFactor::DistancePower { power: 1.0 },
                ),
                ..Default::default()
            },
        )
        .unwrap();
        let grid = Grid::new(domain, &[11]).unwrap();
        let cls = classify_boundary(&grid, &c, 0.0, &ClassifierOptions::default()).unwrap();
        assert_eq!(members(&cls), vec![0, 10]);
        assert_eq!(cls.summary.diffusion_gradient, 2);
        assert_eq!(cls.summary.diffusion_positive, 0);
        assert!(cls.summary.fichera_members.is_none());
    }

    #[test]
    fn ball_nodes_all_classifiable() {
        let domain = DomainSpec::unit_ball(2).unwrap();
        let c = CoefficientSet::new(
            domain.clone(),
            CoefficientSpec { diffusion: Diffusion::constant(1.0), ..Default::default() },
        )
        .unwrap();
        let grid = Grid::new(domain, &[17, 17]).unwrap();
        let cls = classify_boundary(&grid, &c, 0.0, &ClassifierOptions::default()).unwrap();
        assert_eq!(cls.summary.unclassifiable, 0);
        assert_eq!(cls.summary.members, grid.boundary().len());
        assert_eq!(cls.summary.fichera_members, Some(grid.boundary().len()));
    }

    #[test]
    fn time_sweep_of_autonomous_family_is_constant() {
        let c = interval(CoefficientSpec {
            convection: Convection::Constant { velocity: vec![-2.0] },
            ..Default::default()
        });
        let grid = Grid::new(c.domain().clone(), &[5]).unwrap();
        let sweep = classify_over_times(&grid, &c, &[0.0, 0.5, 1.0], &ClassifierOptions::default()).unwrap();
        assert!(!sweep.varied);
        assert_eq!(sweep.union, vec![0]);
    }

    proptest! {
        #[test]
        fn shrinking_tol_never_removes_members(scale in 0.0f64..2.0, v in -2.0f64..2.0, shrink in 1e-3f64..1.0) {
            let domain = DomainSpec::unit_cube(2).unwrap();
            let c = CoefficientSet::new(domain.clone(), CoefficientSpec {
                diffusion: Diffusion::new(scale, StateFactor::One, SpaceFactor::Sine { offset: 0.0, amplitude: 1.0, wavenumber: 1.0 }),
                convection: Convection::Constant { velocity: vec![v, 0.3] },
                ..Default::default()
            }).unwrap();
            let grid = Grid::new(domain, &[9, 9]).unwrap();
            let loose = ClassifierOptions { tol: 0.5, ..Default::default() };
            let tight = ClassifierOptions { tol: 0.5 * shrink, ..Default::default() };
            let a = classify_boundary(&grid, &c, 0.0, &loose).unwrap();
            let b = classify_boundary(&grid, &c, 0.0, &tight).unwrap();
            for (x, y) in a.nodes.iter().zip(&b.nodes) {
                if x.in_partial_boundary() == Some(true) {
                    prop_assert_eq!(y.in_partial_boundary(), Some(true));
                }
            }
        }

        #[test]
        fn positive_drift_scaling_keeps_convection_trigger(v in -2.0f64..2.0, w in -2.0f64..2.0, scale in 0.01f64..100.0) {
            prop_assume!(v.abs() > 1e-6 && w.abs() > 1e-6);
            let domain = DomainSpec::unit_cube(2).unwrap();
            let make = |s: f64| CoefficientSet::new(domain.clone(), CoefficientSpec {
                convection: Convection::Constant { velocity: vec![s * v, s * w] },
                ..Default::default()
            }).unwrap();
            let grid = Grid::new(domain.clone(), &[7, 7]).unwrap();
            let opts = ClassifierOptions { tol: 1e-12, ..Default::default() };
            let a = classify_boundary(&grid, &make(1.0), 0.0, &opts).unwrap();
            let b = classify_boundary(&grid, &make(scale), 0.0, &opts).unwrap();
            for (x, y) in a.nodes.iter().zip(&b.nodes) {
                let fx = x.membership.as_ref().map(|m| m.has(Trigger::Convection));
                let fy = y.membership.as_ref().map(|m| m.has(Trigger::Convection));
                prop_assert_eq!(fx, fy);
            }
        }
    }
}
