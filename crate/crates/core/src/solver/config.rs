use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Forward Euler for every term.
    #[default]
    Explicit,
    /// Implicit artificial viscosity `εΔu`, explicit for everything else.
    ImexDiffusion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    /// Homogeneous Dirichlet data on every boundary node.
    #[default]
    DirichletAll,
    /// Homogeneous Dirichlet data on the partial boundary only; the rest of
    /// the boundary is updated like `None`.
    #[serde(rename = "dirichlet_sigma_p")]
    DirichletPartial,
    /// No boundary condition: zero-flux diffusion and one-sided convection.
    None,
}

/// How the diffusion coefficient is evaluated on a cell face.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterfaceRule {
    /// Exact mean of `a` over the states of the two nodes, i.e. the face
    /// flux is a difference of the primitive `A`. Monotone under the CFL limit.
    #[default]
    MeanValue,
    /// `a` at the average state. Not monotone when `a` varies with the state.
    StateAverage,
    /// Average of the nodal values of `a`.
    ValueAverage,
}

fn default_cfl_safety() -> f64 {
    0.45
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Artificial viscosity.
    #[serde(default)]
    pub epsilon: f64,
    /// Requested step; `None` picks the admissible explicit step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub final_time: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "default_cfl_safety")]
    pub cfl_safety: f64,
    #[serde(default)]
    pub boundary: BoundaryMode,
    #[serde(default)]
    pub interface: InterfaceRule,
    /// Nearest-neighbor averaging passes applied to the initial data.
    #[serde(default)]
    pub smoothing_sweeps: usize,
}

impl SolverConfig {
    pub fn new(final_time: f64) -> Self {
        Self {
            epsilon: 0.0,
            dt: None,
            final_time,
            scheme: Scheme::Explicit,
            cfl_safety: default_cfl_safety(),
            boundary: BoundaryMode::DirichletAll,
            interface: InterfaceRule::MeanValue,
            smoothing_sweeps: 0,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_boundary(mut self, boundary: BoundaryMode) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_interface(mut self, interface: InterfaceRule) -> Self {
        self.interface = interface;
        self
    }

    pub fn with_cfl_safety(mut self, cfl_safety: f64) -> Self {
        self.cfl_safety = cfl_safety;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::InvalidParameter { name: "epsilon", value: self.epsilon });
        }
        if !(self.final_time >= 0.0) || !self.final_time.is_finite() {
            return Err(Error::InvalidParameter { name: "final_time", value: self.final_time });
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidParameter { name: "cfl_safety", value: self.cfl_safety });
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(Error::InvalidParameter { name: "dt", value: dt });
            }
        }
        Ok(())
    }
}
