//! Built-in coefficient families.
//!
//! The diffusion coefficient is a separable product
//! `a(s, x) = scale · state(s) · space(x)`. Every family supplies its spatial
//! gradient analytically and a closed-form antiderivative in `s`; the set is
//! cross-checked against finite differences when it is built.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::geometry::{DomainKind, DomainSpec};
use crate::sampling::{halton_point, linspace};
use crate::{Error, Result};

const PI: f64 = core::f64::consts::PI;

/// State dependence of the diffusion coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateFactor {
    One,
    /// `c0 + c1 s + c2 s² + ...`
    Polynomial {
        coefficients: Vec<f64>,
    },
    /// `max(s, 0)`
    PositivePart,
    /// `max(|s| - threshold, 0)`
    ExcessAbs {
        threshold: f64,
    },
}

impl StateFactor {
    pub fn value(&self, s: f64) -> f64 {
        match self {
            StateFactor::One => 1.0,
            StateFactor::Polynomial { coefficients } => coefficients.iter().rev().fold(0.0, |acc, c| acc * s + c),
            StateFactor::PositivePart => s.max(0.0),
            StateFactor::ExcessAbs { threshold } => (s.abs() - threshold).max(0.0),
        }
    }

    /// `∫_0^s state(r) dr` in closed form.
    pub fn antiderivative(&self, s: f64) -> f64 {
        match self {
            StateFactor::One => s,
            StateFactor::Polynomial { coefficients } => {
                coefficients.iter().enumerate().rev().fold(0.0, |acc, (k, c)| acc * s + c / (k + 1) as f64) * s
            }
            StateFactor::PositivePart => {
                if s > 0.0 {
                    0.5 * s * s
                } else {
                    0.0
                }
            }
            StateFactor::ExcessAbs { threshold } => {
                let t = *threshold;
                if s > t {
                    0.5 * (s - t) * (s - t)
                } else if s < -t {
                    -0.5 * (s + t) * (s + t)
                } else {
                    0.0
                }
            }
        }
    }

    /// Points where the factor is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            StateFactor::PositivePart => vec![0.0],
            StateFactor::ExcessAbs { threshold } => vec![-threshold, *threshold],
            _ => Vec::new(),
        }
    }

    /// `(min, max)` of the factor over `[lo, hi]`, exact for the piecewise
    /// linear factors and sampled densely for polynomials.
    pub fn range_on(&self, lo: f64, hi: f64) -> (f64, f64) {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut visit = |s: f64| {
            let v = self.value(s);
            min = min.min(v);
            max = max.max(v);
        };
        visit(lo);
        visit(hi);
        for b in self.breakpoints() {
            if b > lo && b < hi {
                visit(b);
            }
        }
        if let StateFactor::Polynomial { coefficients } = self {
            if coefficients.len() > 2 && hi > lo {
                linspace(lo, hi, 257).for_each(&mut visit);
            }
        }
        (min, max)
    }

    fn is_constant(&self) -> bool {
        match self {
            StateFactor::One => true,
            StateFactor::Polynomial { coefficients } => coefficients.iter().skip(1).all(|c| *c == 0.0),
            _ => false,
        }
    }
}

/// Spatial dependence of the diffusion coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceFactor {
    One,
    /// `d(x)^power`, `power = 0` or `power ≥ 1`.
    DistancePower {
        power: f64,
    },
    /// `∏ (x_i - lo_i)(hi_i - x_i)` on a box, `1 - |x|²` on the ball.
    Bubble,
    /// `offset + amplitude ∏ sin(wavenumber π ξ_i)` with `ξ` the coordinates
    /// rescaled to the unit bounding box.
    Sine {
        offset: f64,
        amplitude: f64,
        wavenumber: f64,
    },
}

impl SpaceFactor {
    pub fn value(&self, domain: &DomainSpec, x: &[f64]) -> f64 {
        match self {
            SpaceFactor::One => 1.0,
            SpaceFactor::DistancePower { power } => {
                if *power == 0.0 {
                    1.0
                } else {
                    domain.signed_distance(x).max(0.0).powf(*power)
                }
            }
            SpaceFactor::Bubble => bubble(domain, x),
            SpaceFactor::Sine { offset, amplitude, wavenumber } => {
                let (lo, hi) = domain.bounding_box();
                let prod: f64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, &xi)| (wavenumber * PI * (xi - lo[i]) / (hi[i] - lo[i])).sin())
                    .product();
                offset + amplitude * prod
            }
        }
    }

    pub fn gradient(&self, domain: &DomainSpec, x: &[f64], out: &mut [f64]) {
        match self {
            SpaceFactor::One => out.iter_mut().for_each(|v| *v = 0.0),
            SpaceFactor::DistancePower { power } => {
                let p = *power;
                if p == 0.0 {
                    out.iter_mut().for_each(|v| *v = 0.0);
                    return;
                }
                domain.distance_gradient_lenient(x, out);
                let d = domain.signed_distance(x).max(0.0);
                let scale = if p == 1.0 { 1.0 } else { p * d.powf(p - 1.0) };
                out.iter_mut().for_each(|v| *v *= scale);
            }
            SpaceFactor::Bubble => match domain.kind {
                DomainKind::UnitBall => {
                    for (o, xi) in out.iter_mut().zip(x) {
                        *o = -2.0 * xi;
                    }
                }
                _ => {
                    let (lo, hi) = domain.bounding_box();
                    for i in 0..x.len() {
                        let mut g = lo[i] + hi[i] - 2.0 * x[i];
                        for m in (0..x.len()).filter(|&m| m != i) {
                            g *= (x[m] - lo[m]) * (hi[m] - x[m]);
                        }
                        out[i] = g;
                    }
                }
            },
            SpaceFactor::Sine { amplitude, wavenumber, .. } => {
                let (lo, hi) = domain.bounding_box();
                let k = wavenumber * PI;
                for i in 0..x.len() {
                    let len = hi[i] - lo[i];
                    let mut g = amplitude * k / len * (k * (x[i] - lo[i]) / len).cos();
                    for m in (0..x.len()).filter(|&m| m != i) {
                        g *= (k * (x[m] - lo[m]) / (hi[m] - lo[m])).sin();
                    }
                    out[i] = g;
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let SpaceFactor::DistancePower { power } = self {
            if !(*power == 0.0 || *power >= 1.0) {
                return Err(Error::InvalidParameter { name: "power", value: *power });
            }
        }
        Ok(())
    }
}

fn bubble(domain: &DomainSpec, x: &[f64]) -> f64 {
    match domain.kind {
        DomainKind::UnitBall => 1.0 - x.iter().map(|v| v * v).sum::<f64>(),
        _ => {
            let (lo, hi) = domain.bounding_box();
            x.iter().enumerate().map(|(i, &xi)| (xi - lo[i]) * (hi[i] - xi)).product()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Diffusion {
    #[serde(default = "one")]
    pub scale: f64,
    pub state: StateFactor,
    pub space: SpaceFactor,
}

fn one() -> f64 {
    1.0
}

impl Diffusion {
    pub fn new(scale: f64, state: StateFactor, space: SpaceFactor) -> Self {
        Self { scale, state, space }
    }

    pub fn zero() -> Self {
        Self::new(0.0, StateFactor::One, SpaceFactor::One)
    }

    pub fn constant(value: f64) -> Self {
        Self::new(value, StateFactor::One, SpaceFactor::One)
    }

    /// `s² d(x)^p`
    pub fn state_squared_distance_power(p: f64) -> Self {
        Self::new(
            1.0,
            StateFactor::Polynomial { coefficients: vec![0.0, 0.0, 1.0] },
            SpaceFactor::DistancePower { power: p },
        )
    }
}

impl Default for Diffusion {
    fn default() -> Self {
        Self::zero()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Convection {
    #[default]
    Zero,
    Constant {
        velocity: Vec<f64>,
    },
    /// `velocity · d(x)^power`, vanishing on the boundary for `power > 0`.
    DistanceWeighted {
        velocity: Vec<f64>,
        power: f64,
    },
}

impl Convection {
    fn velocity(&self) -> Option<&[f64]> {
        match self {
            Convection::Zero => None,
            Convection::Constant { velocity } | Convection::DistanceWeighted { velocity, .. } => Some(velocity),
        }
    }
}

/// Reaction `c(x,t)` and source `g(x,t)` families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalarField {
    Constant {
        value: f64,
    },
    /// `offset + amplitude cos(frequency t) ∏ sin(wavenumber π ξ_i)`.
    Sine {
        offset: f64,
        amplitude: f64,
        wavenumber: f64,
        frequency: f64,
    },
}

impl Default for ScalarField {
    fn default() -> Self {
        ScalarField::Constant { value: 0.0 }
    }
}

impl ScalarField {
    pub fn constant(value: f64) -> Self {
        ScalarField::Constant { value }
    }

    pub fn value(&self, domain: &DomainSpec, x: &[f64], t: f64) -> f64 {
        match self {
            ScalarField::Constant { value } => *value,
            ScalarField::Sine { offset, amplitude, wavenumber, frequency } => {
                let space = SpaceFactor::Sine { offset: 0.0, amplitude: 1.0, wavenumber: *wavenumber };
                offset + amplitude * (frequency * t).cos() * space.value(domain, x)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ScalarField::Constant { value } if *value == 0.0)
            || matches!(self, ScalarField::Sine { offset, amplitude, .. } if *offset == 0.0 && *amplitude == 0.0)
    }

    /// Bounds `(min, max)` valid for all `x` and `t`.
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            ScalarField::Constant { value } => (*value, *value),
            ScalarField::Sine { offset, amplitude, .. } => (offset - amplitude.abs(), offset + amplitude.abs()),
        }
    }
}

fn default_delta1() -> f64 {
    0.1
}

fn default_delta2() -> f64 {
    0.01
}

/// Serializable description of a coefficient set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    pub diffusion: Diffusion,
    #[serde(default)]
    pub convection: Convection,
    #[serde(default)]
    pub reaction: ScalarField,
    #[serde(default)]
    pub source: ScalarField,
    /// Attainable states; when absent, set from the initial data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_range: Option<[f64; 2]>,
    #[serde(default = "default_delta1")]
    pub delta1: f64,
    #[serde(default = "default_delta2")]
    pub delta2: f64,
}

impl Default for CoefficientSpec {
    fn default() -> Self {
        Self {
            diffusion: Diffusion::zero(),
            convection: Convection::Zero,
            reaction: ScalarField::default(),
            source: ScalarField::default(),
            u_range: None,
            delta1: default_delta1(),
            delta2: default_delta2(),
        }
    }
}

/// Evaluators for `a`, `∂a/∂x_i`, `f_i`, `div f`, `c` and `g` on one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    domain: DomainSpec,
    spec: CoefficientSpec,
    u_range: (f64, f64),
}

/// Tolerance of the finite-difference cross-check of analytic partials.
const PARTIALS_TOLERANCE: f64 = 1e-5;
const NEGATIVITY_TOLERANCE: f64 = 1e-12;

impl CoefficientSet {
    pub fn new(domain: DomainSpec, spec: CoefficientSpec) -> Result<Self> {
        domain.validate()?;
        spec.diffusion.space.validate()?;
        if let Some(v) = spec.convection.velocity() {
            if v.len() != domain.dim() {
                return Err(Error::DimensionMismatch { expected: domain.dim(), found: v.len() });
            }
        }
        if let StateFactor::ExcessAbs { threshold } = spec.diffusion.state {
            if !(threshold >= 0.0) {
                return Err(Error::InvalidParameter { name: "threshold", value: threshold });
            }
        }
        for (name, v) in [("delta1", spec.delta1), ("delta2", spec.delta2)] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter { name, value: v });
            }
        }
        let u_range = match spec.u_range {
            Some([lo, hi]) if lo <= hi => (lo, hi),
            Some([lo, _]) => return Err(Error::InvalidParameter { name: "u_range", value: lo }),
            None => (-1.0, 1.0),
        };
        let set = Self { domain, spec, u_range };
        set.check_nonnegative()?;
        set.check_partials()?;
        Ok(set)
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn spec(&self) -> &CoefficientSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn u_range(&self) -> (f64, f64) {
        self.u_range
    }

    /// Replaces the attainable state interval, re-checking `a ≥ 0` on it.
    pub fn set_u_range(&mut self, lo: f64, hi: f64) -> Result<()> {
        if !(lo <= hi) {
            return Err(Error::InvalidParameter { name: "u_range", value: lo });
        }
        self.u_range = (lo, hi);
        self.check_nonnegative()
    }

    pub fn delta1(&self) -> f64 {
        self.spec.delta1
    }

    pub fn delta2(&self) -> f64 {
        self.spec.delta2
    }

    pub fn diffusion(&self) -> &Diffusion {
        &self.spec.diffusion
    }

    /// `a(s, x, t)`.
    pub fn a(&self, s: f64, x: &[f64], _t: f64) -> f64 {
        let d = &self.spec.diffusion;
        if d.scale == 0.0 {
            return 0.0;
        }
        d.scale * d.state.value(s) * d.space.value(&self.domain, x)
    }

    /// The spatial factor `scale · space(x)`, so that `a = state(s) · weight`.
    pub fn diffusion_weight(&self, x: &[f64]) -> f64 {
        let d = &self.spec.diffusion;
        if d.scale == 0.0 {
            return 0.0;
        }
        d.scale * d.space.value(&self.domain, x)
    }

    /// Gradient of [`diffusion_weight`](Self::diffusion_weight).
    pub fn diffusion_weight_gradient(&self, x: &[f64], out: &mut [f64]) {
        let d = &self.spec.diffusion;
        d.space.gradient(&self.domain, x, out);
        out.iter_mut().for_each(|v| *v *= d.scale);
    }

    pub fn state_factor(&self) -> &StateFactor {
        &self.spec.diffusion.state
    }

    /// `∂a/∂x_i` for all `i`.
    pub fn a_x(&self, s: f64, x: &[f64], _t: f64, out: &mut [f64]) {
        let d = &self.spec.diffusion;
        if d.scale == 0.0 {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        d.space.gradient(&self.domain, x, out);
        let f = d.scale * d.state.value(s);
        out.iter_mut().for_each(|v| *v *= f);
    }

    pub fn a_xi(&self, axis: usize, s: f64, x: &[f64], t: f64) -> f64 {
        let mut g = vec![0.0; self.dim()];
        self.a_x(s, x, t, &mut g);
        g[axis]
    }

    /// `∂a/∂t`; every built-in family is autonomous.
    pub fn a_t(&self, _s: f64, _x: &[f64], _t: f64) -> f64 {
        0.0
    }

    /// Closed-form `∫_0^s a(r, x, t) dr`.
    pub fn kirchhoff(&self, s: f64, x: &[f64], _t: f64) -> f64 {
        let d = &self.spec.diffusion;
        if d.scale == 0.0 {
            return 0.0;
        }
        d.scale * d.state.antiderivative(s) * d.space.value(&self.domain, x)
    }

    /// Nonsmooth points of `s ↦ a(s, x, t)`.
    pub fn state_breakpoints(&self) -> Vec<f64> {
        self.spec.diffusion.state.breakpoints()
    }

    /// `max_{s ∈ [lo, hi]} a(s, x, t)`.
    pub fn max_a_on(&self, lo: f64, hi: f64, x: &[f64], _t: f64) -> f64 {
        let w = self.diffusion_weight(x);
        if w == 0.0 {
            return 0.0;
        }
        let (smin, smax) = self.spec.diffusion.state.range_on(lo, hi);
        (w * smin).max(w * smax)
    }

    /// True when `a` does not depend on the state.
    pub fn is_state_independent(&self) -> bool {
        self.spec.diffusion.scale == 0.0 || self.spec.diffusion.state.is_constant()
    }

    pub fn f(&self, x: &[f64], out: &mut [f64]) {
        match &self.spec.convection {
            Convection::Zero => out.iter_mut().for_each(|v| *v = 0.0),
            Convection::Constant { velocity } => out.copy_from_slice(velocity),
            Convection::DistanceWeighted { velocity, power } => {
                let w = self.domain.signed_distance(x).max(0.0).powf(*power);
                for (o, v) in out.iter_mut().zip(velocity) {
                    *o = v * w;
                }
            }
        }
    }

    pub fn f_i(&self, axis: usize, x: &[f64]) -> f64 {
        let mut v = vec![0.0; self.dim()];
        self.f(x, &mut v);
        v[axis]
    }

    pub fn has_convection(&self) -> bool {
        match &self.spec.convection {
            Convection::Zero => false,
            Convection::Constant { velocity } | Convection::DistanceWeighted { velocity, .. } => {
                velocity.iter().any(|v| *v != 0.0)
            }
        }
    }

    pub fn div_f(&self, x: &[f64]) -> f64 {
        match &self.spec.convection {
            Convection::Zero | Convection::Constant { .. } => 0.0,
            Convection::DistanceWeighted { velocity, power } => {
                let p = *power;
                if p == 0.0 {
                    return 0.0;
                }
                let mut g = vec![0.0; self.dim()];
                self.domain.distance_gradient_lenient(x, &mut g);
                let d = self.domain.signed_distance(x).max(0.0);
                let scale = if p == 1.0 { 1.0 } else { p * d.powf(p - 1.0) };
                scale * g.iter().zip(velocity).map(|(a, b)| a * b).sum::<f64>()
            }
        }
    }

    pub fn c(&self, x: &[f64], t: f64) -> f64 {
        self.spec.reaction.value(&self.domain, x, t)
    }

    pub fn g(&self, x: &[f64], t: f64) -> f64 {
        self.spec.source.value(&self.domain, x, t)
    }

    pub fn reaction(&self) -> &ScalarField {
        &self.spec.reaction
    }

    pub fn source(&self) -> &ScalarField {
        &self.spec.source
    }

    /// Interior sample points where `d` is smooth, for self-checks.
    fn smooth_samples(&self, count: usize) -> Vec<Vec<f64>> {
        let (lo, hi) = self.domain.bounding_box();
        let margin = 1e-3 * self.domain.inradius();
        let mut out = Vec::with_capacity(count);
        let mut p = vec![0.0; self.dim()];
        let mut index = 1u64;
        while out.len() < count && index < 100_000 {
            halton_point(index, &lo, &hi, &mut p);
            index += 1;
            let d = self.domain.signed_distance(&p);
            let r = crate::geometry::norm(&p);
            let center_ok = self.domain.kind != DomainKind::UnitBall || r > margin;
            if d > margin && self.domain.ridge_gap(&p) > margin && center_ok {
                out.push(p.clone());
            }
        }
        out
    }

    fn check_nonnegative(&self) -> Result<()> {
        let (lo, hi) = self.u_range;
        for x in self.smooth_samples(32) {
            let w = self.diffusion_weight(&x);
            let (smin, smax) = self.spec.diffusion.state.range_on(lo, hi);
            let worst = (w * smin).min(w * smax);
            if worst < -NEGATIVITY_TOLERANCE {
                return Err(Error::NegativeDiffusion { value: worst });
            }
        }
        Ok(())
    }

    fn check_partials(&self) -> Result<()> {
        let n = self.dim();
        let (ulo, uhi) = self.u_range;
        let step = 1e-6;
        let mut analytic = vec![0.0; n];
        let mut fp = vec![0.0; n];
        let mut fm = vec![0.0; n];
        for x in self.smooth_samples(16) {
            for s in linspace(ulo, uhi, 3) {
                self.a_x(s, &x, 0.0, &mut analytic);
                for i in 0..n {
                    let mut q = x.clone();
                    q[i] += step;
                    let ap = self.a(s, &q, 0.0);
                    q[i] -= 2.0 * step;
                    let am = self.a(s, &q, 0.0);
                    let fd = (ap - am) / (2.0 * step);
                    let err = (fd - analytic[i]).abs();
                    if err > PARTIALS_TOLERANCE * (1.0 + analytic[i].abs()) {
                        return Err(Error::InconsistentPartials { what: "a", discrepancy: err });
                    }
                }
            }
            let mut div_fd = 0.0;
            for i in 0..n {
                let mut q = x.clone();
                q[i] += step;
                self.f(&q, &mut fp);
                q[i] -= 2.0 * step;
                self.f(&q, &mut fm);
                div_fd += (fp[i] - fm[i]) / (2.0 * step);
            }
            let div = self.div_f(&x);
            let err = (div_fd - div).abs();
            if err > PARTIALS_TOLERANCE * (1.0 + div.abs()) {
                return Err(Error::InconsistentPartials { what: "f", discrepancy: err });
            }
        }
        Ok(())
    }
}
