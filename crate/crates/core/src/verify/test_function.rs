//! Nonnegative space-time test functions `φ(x,t) = θ(t) ψ(x)` with analytic
//! derivatives.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::geometry::{DomainSpec, Grid};
use crate::solver::Field;
use crate::{Error, Result};

/// `θ(t) = (1 - τ²)⁴` on `(start, end)` with `τ` the window rescaled to
/// `(-1, 1)`, and zero outside. It is `C³` and vanishes near `t = 0`
/// whenever `start > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeBump {
    pub start: f64,
    pub end: f64,
}

impl TimeBump {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start >= 0.0 && end > start) {
            return Err(Error::InvalidTestFunction(format!("time window ({start}, {end}) is empty")));
        }
        Ok(Self { start, end })
    }

    /// The window `(frac_lo T, frac_hi T)`.
    pub fn within(final_time: f64, frac_lo: f64, frac_hi: f64) -> Result<Self> {
        Self::new(frac_lo * final_time, frac_hi * final_time)
    }

    fn tau(&self, t: f64) -> (f64, f64) {
        let half = 0.5 * (self.end - self.start);
        ((t - 0.5 * (self.start + self.end)) / half, 1.0 / half)
    }

    pub fn value(&self, t: f64) -> f64 {
        let (tau, _) = self.tau(t);
        if tau.abs() >= 1.0 {
            return 0.0;
        }
        (1.0 - tau * tau).powi(4)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let (tau, scale) = self.tau(t);
        if tau.abs() >= 1.0 {
            return 0.0;
        }
        -8.0 * tau * (1.0 - tau * tau).powi(3) * scale
    }
}

/// Spatial factor `ψ(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpatialTest {
    /// `(1 - |x-c|²/R²)⁴` inside the ball of radius `R` about `c`.
    Bump { center: Vec<f64>, radius: f64 },
    /// The boundary weight `φ_λ`: `1 - (d-λ)²/λ²` for `d < λ`, else `1`.
    BoundaryWeight { lambda: f64 },
}

/// `ψ`, `∇ψ` and `Δψ` at one point. For the boundary weight the Laplacian is
/// split into the `|∇d|²` part and the part carrying `Δd`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialValues {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub laplacian_flat: f64,
    pub laplacian_curvature: f64,
}

impl SpatialValues {
    pub fn laplacian(&self) -> f64 {
        self.laplacian_flat + self.laplacian_curvature
    }
}

impl SpatialTest {
    pub fn validate(&self, domain: &DomainSpec) -> Result<()> {
        match self {
            SpatialTest::Bump { center, radius } => {
                if center.len() != domain.dim() {
                    return Err(Error::DimensionMismatch { expected: domain.dim(), found: center.len() });
                }
                let d = domain.signed_distance(center);
                if !(*radius > 0.0) || *radius > d {
                    return Err(Error::InvalidTestFunction(format!(
                        "bump of radius {radius} about a point at distance {d} from the boundary is not compactly supported"
                    )));
                }
                Ok(())
            }
            SpatialTest::BoundaryWeight { lambda } => {
                if !(*lambda > 0.0) || *lambda >= domain.inradius() {
                    return Err(Error::InvalidParameter { name: "lambda", value: *lambda });
                }
                Ok(())
            }
        }
    }

    pub fn lambda(&self) -> Option<f64> {
        match self {
            SpatialTest::BoundaryWeight { lambda } => Some(*lambda),
            _ => None,
        }
    }

    pub fn eval(&self, domain: &DomainSpec, x: &[f64]) -> SpatialValues {
        let n = x.len();
        match self {
            SpatialTest::Bump { center, radius } => {
                let r2 = radius * radius;
                let q: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>() / r2;
                if q >= 1.0 {
                    return SpatialValues {
                        value: 0.0,
                        gradient: vec![0.0; n],
                        laplacian_flat: 0.0,
                        laplacian_curvature: 0.0,
                    };
                }
                let b = 1.0 - q;
                // ∇ψ = -8 b³ (x-c)/R², Δψ = 48 b² |x-c|²/R⁴ - 8 N b³/R²
                let gradient = x.iter().zip(center).map(|(a, c)| -8.0 * b * b * b * (a - c) / r2).collect();
                let laplacian = 48.0 * b * b * q / r2 - 8.0 * n as f64 * b * b * b / r2;
                SpatialValues { value: b.powi(4), gradient, laplacian_flat: laplacian, laplacian_curvature: 0.0 }
            }
            SpatialTest::BoundaryWeight { lambda } => {
                let lam = *lambda;
                let d = domain.signed_distance(x).max(0.0);
                if d >= lam {
                    return SpatialValues {
                        value: 1.0,
                        gradient: vec![0.0; n],
                        laplacian_flat: 0.0,
                        laplacian_curvature: 0.0,
                    };
                }
                let mut grad_d = vec![0.0; n];
                domain.distance_gradient_lenient(x, &mut grad_d);
                let g2: f64 = grad_d.iter().map(|g| g * g).sum();
                let lap_d = domain.laplacian_of_distance_lenient(x);
                let s = -2.0 * (d - lam) / (lam * lam);
                SpatialValues {
                    value: 1.0 - (d - lam) * (d - lam) / (lam * lam),
                    gradient: grad_d.iter().map(|g| s * g).collect(),
                    laplacian_flat: -2.0 * g2 / (lam * lam),
                    laplacian_curvature: s * lap_d,
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunction {
    pub time: TimeBump,
    pub space: SpatialTest,
}

impl TestFunction {
    pub fn new(time: TimeBump, space: SpatialTest) -> Self {
        Self { time, space }
    }

    pub fn validate(&self, domain: &DomainSpec) -> Result<()> {
        TimeBump::new(self.time.start, self.time.end)?;
        self.space.validate(domain)
    }

    pub fn lambda(&self) -> Option<f64> {
        self.space.lambda()
    }
}

/// Nodewise values of the boundary weight `φ_λ` on `grid`.
pub fn boundary_test_function(grid: &Grid, lambda: f64) -> Result<Field> {
    let test = SpatialTest::BoundaryWeight { lambda };
    test.validate(grid.domain())?;
    let domain = grid.domain();
    Ok(Field::from_fn(grid, 0.0, |x| test.eval(domain, x).value))
}
