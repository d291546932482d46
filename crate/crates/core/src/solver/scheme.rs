//! The finite-volume update.
//!
//! Each active node owns a control volume (trapezoid weights on box faces).
//! Diffusion is exchanged through the faces between active neighbors, so the
//! divergence part is conservative; convection `f·∇u` is upwinded on the sign
//! of each `f_k`; reaction and source act pointwise.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::config::{BoundaryMode, InterfaceRule, Scheme, SolverConfig};
use crate::classifier::{classify_boundary, ClassifierOptions};
use crate::geometry::Grid;
use crate::problem::{CoefficientSet, StateFactor};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct FaceData {
    lower: usize,
    upper: usize,
    /// face area over node spacing
    conductance: f64,
    /// spatial weight of `a` at the face midpoint
    weight: f64,
    /// largest weight among the face and its two nodes, for the step limit
    weight_bound: f64,
}

/// Precomputed stencil data for repeated steps on one grid.
#[derive(Debug, Clone)]
pub struct Stepper<'a> {
    grid: &'a Grid,
    coeffs: &'a CoefficientSet,
    config: SolverConfig,
    faces: Vec<FaceData>,
    node_weight: Vec<f64>,
    drift: Vec<f64>,
    fixed: Vec<bool>,
    inv_volume: Vec<f64>,
    updated: Vec<usize>,
    /// `max_j Σ conductance / V_j`
    laplace_rate: f64,
    /// `max_j Σ conductance · weight_bound / V_j`
    weighted_rate: f64,
    /// `max_j Σ |f_k| / h_k`
    convection_rate: f64,
    scratch: Vec<f64>,
    primitive: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(grid: &'a Grid, coeffs: &'a CoefficientSet, config: &SolverConfig) -> Result<Self> {
        config.validate()?;
        if grid.domain() != coeffs.domain() {
            return Err(Error::InvalidDomain("grid and coefficients use different domains".into()));
        }
        let n = grid.dim();
        let len = grid.len();
        let node_weight: Vec<f64> =
            (0..len).map(|j| if grid.is_active(j) { coeffs.diffusion_weight(grid.point(j)) } else { 0.0 }).collect();
        let mut mid = vec![0.0; n];
        let faces: Vec<FaceData> = grid
            .faces()
            .into_iter()
            .map(|f| {
                grid.midpoint(f.lower, f.upper, &mut mid);
                let weight = coeffs.diffusion_weight(&mid);
                FaceData {
                    lower: f.lower,
                    upper: f.upper,
                    conductance: f.area / grid.spacing()[f.axis],
                    weight,
                    weight_bound: weight.max(node_weight[f.lower]).max(node_weight[f.upper]),
                }
            })
            .collect();

        let mut drift = vec![0.0; len * n];
        if coeffs.has_convection() {
            for j in grid.active() {
                coeffs.f(grid.point(j), &mut drift[j * n..(j + 1) * n]);
            }
        }

        let mut fixed: Vec<bool> = (0..len).map(|j| !grid.is_active(j)).collect();
        match config.boundary {
            BoundaryMode::DirichletAll => grid.boundary().iter().for_each(|&j| fixed[j] = true),
            BoundaryMode::DirichletPartial => {
                let cls = classify_boundary(grid, coeffs, 0.0, &ClassifierOptions::default())?;
                for (j, m) in cls.dirichlet_mask(len).into_iter().enumerate() {
                    fixed[j] |= m;
                }
            }
            BoundaryMode::None => {}
        }
        let inv_volume: Vec<f64> = grid.volumes().iter().map(|&v| if v > 0.0 { 1.0 / v } else { 0.0 }).collect();
        let updated: Vec<usize> = (0..len).filter(|&j| !fixed[j]).collect();

        let mut plain = vec![0.0; len];
        let mut weighted = vec![0.0; len];
        for f in &faces {
            for j in [f.lower, f.upper] {
                plain[j] += f.conductance * inv_volume[j];
                weighted[j] += f.conductance * f.weight_bound * inv_volume[j];
            }
        }
        let mut laplace_rate = 0.0f64;
        let mut weighted_rate = 0.0f64;
        let mut convection_rate = 0.0f64;
        for &j in &updated {
            laplace_rate = laplace_rate.max(plain[j]);
            weighted_rate = weighted_rate.max(weighted[j]);
            let c: f64 = (0..n).map(|k| drift[j * n + k].abs() / grid.spacing()[k]).sum();
            convection_rate = convection_rate.max(c);
        }

        Ok(Self {
            grid,
            coeffs,
            config: config.clone(),
            faces,
            node_weight,
            drift,
            fixed,
            inv_volume,
            updated,
            laplace_rate,
            weighted_rate,
            convection_rate,
            scratch: vec![0.0; len],
            primitive: vec![0.0; len],
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// Nodes whose value is held fixed (Dirichlet or outside the domain).
    pub fn fixed(&self) -> &[bool] {
        &self.fixed
    }

    /// Largest explicit step keeping every update coefficient nonnegative,
    /// times `cfl_safety`, for states in `[lo, hi]`.
    pub fn admissible_dt(&self, lo: f64, hi: f64) -> f64 {
        let (smin, smax) = self.coeffs.state_factor().range_on(lo, hi);
        let state_max = smin.abs().max(smax.abs());
        let viscous = match self.config.scheme {
            Scheme::Explicit => self.config.epsilon * self.laplace_rate,
            Scheme::ImexDiffusion => 0.0,
        };
        let (_, cmax) = self.coeffs.reaction().bounds();
        let rate = viscous + state_max * self.weighted_rate + self.convection_rate + cmax.max(0.0);
        if rate > 0.0 {
            self.config.cfl_safety / rate
        } else {
            f64::INFINITY
        }
    }

    /// Advances `u` (at time `t`) by `dt` into `out`. Fixed nodes are copied.
    pub fn advance(&mut self, u: &[f64], t: f64, dt: f64, out: &mut [f64]) -> Result<()> {
        let (lo, hi) = self.range(u);
        let admissible = self.admissible_dt(lo, hi);
        if dt > admissible * (1.0 + 1e-12) {
            return Err(Error::StepRejected { dt, admissible_dt: admissible });
        }
        let explicit_eps = match self.config.scheme {
            Scheme::Explicit => self.config.epsilon,
            Scheme::ImexDiffusion => 0.0,
        };
        self.rate(u, t, explicit_eps);
        for j in 0..u.len() {
            out[j] = if self.fixed[j] { u[j] } else { u[j] + dt * self.scratch[j] };
        }
        if self.config.scheme == Scheme::ImexDiffusion && self.config.epsilon > 0.0 {
            self.implicit_viscosity(out, dt)?;
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::NumericalBlowup { t: t + dt });
        }
        Ok(())
    }

    fn range(&self, u: &[f64]) -> (f64, f64) {
        self.grid.active().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), j| (lo.min(u[j]), hi.max(u[j])))
    }

    /// Time derivative of every updated node into `scratch`.
    fn rate(&mut self, u: &[f64], t: f64, epsilon: f64) {
        let state = self.coeffs.state_factor().clone();
        self.scratch.iter_mut().for_each(|v| *v = 0.0);
        if self.config.interface == InterfaceRule::MeanValue {
            for j in self.grid.active() {
                self.primitive[j] = state.antiderivative(u[j]);
            }
        }
        for f in &self.faces {
            let (a, b) = (f.lower, f.upper);
            let du = u[b] - u[a];
            let diffusive = match self.config.interface {
                InterfaceRule::MeanValue => f.weight * (self.primitive[b] - self.primitive[a]),
                InterfaceRule::StateAverage => f.weight * state.value(0.5 * (u[a] + u[b])) * du,
                InterfaceRule::ValueAverage => {
                    0.5 * (self.node_weight[a] * state.value(u[a]) + self.node_weight[b] * state.value(u[b])) * du
                }
            };
            let flux = f.conductance * (diffusive + epsilon * du);
            self.scratch[a] += flux * self.inv_volume[a];
            self.scratch[b] -= flux * self.inv_volume[b];
        }

        let n = self.grid.dim();
        let has_drift = self.coeffs.has_convection();
        let reaction = self.coeffs.reaction().clone();
        let source = self.coeffs.source().clone();
        let domain = self.grid.domain();
        for &j in &self.updated {
            let mut r = 0.0;
            if has_drift {
                for k in 0..n {
                    let fk = self.drift[j * n + k];
                    if fk != 0.0 {
                        r += fk * self.upwind_difference(u, j, k, fk > 0.0);
                    }
                }
            }
            let x = self.grid.point(j);
            if !reaction.is_zero() {
                r -= reaction.value(domain, x, t) * u[j];
            }
            if !source.is_zero() {
                r += source.value(domain, x, t);
            }
            self.scratch[j] += r;
        }
    }

    /// One-sided difference toward the upwind side of `+f ∂u`, which is the
    /// forward neighbor when `f > 0`. A missing neighbor is replaced by the
    /// linear extrapolation through the node and its opposite neighbor.
    fn upwind_difference(&self, u: &[f64], j: usize, axis: usize, forward: bool) -> f64 {
        let h = self.grid.spacing()[axis];
        let g = self.grid;
        match (g.active_neighbor(j, axis, forward), g.active_neighbor(j, axis, !forward)) {
            (Some(nb), _) => {
                if forward {
                    (u[nb] - u[j]) / h
                } else {
                    (u[j] - u[nb]) / h
                }
            }
            (None, Some(op)) => {
                if forward {
                    (u[j] - u[op]) / h
                } else {
                    (u[op] - u[j]) / h
                }
            }
            (None, None) => 0.0,
        }
    }

    /// Solves `(V + dt ε K) u = V u*` for the updated nodes by Jacobi
    /// preconditioned conjugate gradients; `K` is the face Laplacian.
    fn implicit_viscosity(&mut self, u: &mut [f64], dt: f64) -> Result<()> {
        let len = u.len();
        let coef = dt * self.config.epsilon;
        let volume = |j: usize| if self.inv_volume[j] > 0.0 { 1.0 / self.inv_volume[j] } else { 0.0 };
        let mut diag = vec![0.0; len];
        let mut rhs = vec![0.0; len];
        for &j in &self.updated {
            diag[j] = volume(j);
            rhs[j] = volume(j) * u[j];
        }
        for f in &self.faces {
            let c = coef * f.conductance;
            let (a, b) = (f.lower, f.upper);
            match (self.fixed[a], self.fixed[b]) {
                (false, false) => {
                    diag[a] += c;
                    diag[b] += c;
                }
                (false, true) => {
                    diag[a] += c;
                    rhs[a] += c * u[b];
                }
                (true, false) => {
                    diag[b] += c;
                    rhs[b] += c * u[a];
                }
                (true, true) => {}
            }
        }
        let apply = |x: &[f64], y: &mut [f64]| {
            for &j in &self.updated {
                y[j] = diag[j] * x[j];
            }
            for f in &self.faces {
                let (a, b) = (f.lower, f.upper);
                let c = coef * f.conductance;
                if !self.fixed[a] && !self.fixed[b] {
                    y[a] -= c * x[b];
                    y[b] -= c * x[a];
                }
            }
        };
        let mut x = u.to_vec();
        let mut r = vec![0.0; len];
        let mut ax = vec![0.0; len];
        apply(&x, &mut ax);
        for &j in &self.updated {
            r[j] = rhs[j] - ax[j];
        }
        let norm_b = self.updated.iter().map(|&j| rhs[j] * rhs[j]).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let mut z = vec![0.0; len];
        for &j in &self.updated {
            z[j] = r[j] / diag[j];
        }
        let mut p = z.clone();
        let mut rz: f64 = self.updated.iter().map(|&j| r[j] * z[j]).sum();
        let max_iter = 10 * self.updated.len() + 100;
        let mut residual = self.updated.iter().map(|&j| r[j] * r[j]).sum::<f64>().sqrt();
        let mut iterations = 0;
        while residual > 1e-13 * norm_b {
            if iterations >= max_iter {
                return Err(Error::LinearSolverFailed { iterations, residual });
            }
            apply(&p, &mut ax);
            let pap: f64 = self.updated.iter().map(|&j| p[j] * ax[j]).sum();
            let alpha = rz / pap;
            for &j in &self.updated {
                x[j] += alpha * p[j];
                r[j] -= alpha * ax[j];
                z[j] = r[j] / diag[j];
            }
            let rz_new: f64 = self.updated.iter().map(|&j| r[j] * z[j]).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for &j in &self.updated {
                p[j] = z[j] + beta * p[j];
            }
            residual = self.updated.iter().map(|&j| r[j] * r[j]).sum::<f64>().sqrt();
            iterations += 1;
        }
        for &j in &self.updated {
            u[j] = x[j];
        }
        Ok(())
    }

    /// `Σ_faces (area/h) a(ū_f, x_f) (Δu)²`, the midpoint discretization of
    /// `∫ a |∇u|² dx`.
    pub fn dissipation(&self, u: &[f64]) -> f64 {
        dissipation_on_faces(&self.faces, self.coeffs.state_factor(), u)
    }
}

fn dissipation_on_faces(faces: &[FaceData], state: &StateFactor, u: &[f64]) -> f64 {
    faces
        .iter()
        .map(|f| {
            let du = u[f.upper] - u[f.lower];
            f.conductance * f.weight * state.value(0.5 * (u[f.lower] + u[f.upper])) * du * du
        })
        .sum()
}

/// `∫ a(u, x) |∇u|² dx` for one field, by the face midpoint rule.
pub fn dissipation(grid: &Grid, coeffs: &CoefficientSet, u: &[f64]) -> f64 {
    let mut mid = vec![0.0; grid.dim()];
    let state = coeffs.state_factor();
    grid.faces()
        .into_iter()
        .map(|f| {
            grid.midpoint(f.lower, f.upper, &mut mid);
            let du = u[f.upper] - u[f.lower];
            let h = grid.spacing()[f.axis];
            f.area / h * coeffs.diffusion_weight(&mid) * state.value(0.5 * (u[f.lower] + u[f.upper])) * du * du
        })
        .sum()
}
