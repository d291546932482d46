//! Domains, uniform tensor grids and the boundary distance function.
//!
//! Three domain kinds are supported: the unit cube `(0,1)^N`, the unit ball
//! `|x| < 1` and an axis-aligned box. The ball is discretized by embedding it
//! in its bounding box `[-1,1]^N` with an inside mask.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::problem::{ConditionId, ConditionReport};
use crate::sampling::halton_point;
use crate::{Error, Result};

/// Relative slack used for exact geometric predicates (face hits, ties).
const GEOM_EPS: f64 = 1e-12;

/// Tolerance of the `Δd ≤ 0` check.
pub const CONCAVITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    UnitCube,
    UnitBall,
    IntervalProduct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub dimension: usize,
    /// Per-axis `[lo, hi]`, only for `interval_product`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<[f64; 2]>>,
}

impl DomainSpec {
    pub fn unit_cube(dimension: usize) -> Result<Self> {
        let d = Self { kind: DomainKind::UnitCube, dimension, bounds: None };
        d.validate()?;
        Ok(d)
    }

    pub fn unit_ball(dimension: usize) -> Result<Self> {
        let d = Self { kind: DomainKind::UnitBall, dimension, bounds: None };
        d.validate()?;
        Ok(d)
    }

    pub fn interval_product(bounds: Vec<[f64; 2]>) -> Result<Self> {
        let d = Self { kind: DomainKind::IntervalProduct, dimension: bounds.len(), bounds: Some(bounds) };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidDomain("dimension must be at least 1".into()));
        }
        match (self.kind, &self.bounds) {
            (DomainKind::IntervalProduct, None) => Err(Error::InvalidDomain("interval_product needs bounds".into())),
            (DomainKind::IntervalProduct, Some(b)) => {
                if b.len() != self.dimension {
                    return Err(Error::DimensionMismatch { expected: self.dimension, found: b.len() });
                }
                for (axis, [lo, hi]) in b.iter().enumerate() {
                    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                        return Err(Error::InvalidDomain(format!("axis {axis}: need lo < hi, got [{lo}, {hi}]")));
                    }
                }
                Ok(())
            }
            (_, Some(_)) => Err(Error::InvalidDomain("bounds are only allowed for interval_product".into())),
            (_, None) => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        self.dimension
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        match self.kind {
            DomainKind::UnitCube => (vec![0.0; self.dimension], vec![1.0; self.dimension]),
            DomainKind::UnitBall => (vec![-1.0; self.dimension], vec![1.0; self.dimension]),
            DomainKind::IntervalProduct => {
                let b = self.bounds.as_deref().unwrap_or(&[]);
                (b.iter().map(|p| p[0]).collect(), b.iter().map(|p| p[1]).collect())
            }
        }
    }

    fn axis_bounds(&self, axis: usize) -> (f64, f64) {
        match self.kind {
            DomainKind::UnitCube => (0.0, 1.0),
            DomainKind::UnitBall => (-1.0, 1.0),
            DomainKind::IntervalProduct => {
                let b = self.bounds.as_ref().expect("validated interval_product");
                (b[axis][0], b[axis][1])
            }
        }
    }

    fn scale(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        lo.iter().zip(&hi).map(|(l, h)| h - l).fold(0.0, f64::max)
    }

    /// Radius of the largest inscribed ball.
    pub fn inradius(&self) -> f64 {
        match self.kind {
            DomainKind::UnitBall => 1.0,
            _ => (0..self.dimension)
                .map(|a| {
                    let (lo, hi) = self.axis_bounds(a);
                    0.5 * (hi - lo)
                })
                .fold(f64::INFINITY, f64::min),
        }
    }

    fn check_dim(&self, point: &[f64]) -> Result<()> {
        if point.len() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, found: point.len() });
        }
        Ok(())
    }

    /// Distance to the boundary, positive inside and negative outside.
    pub fn signed_distance(&self, point: &[f64]) -> f64 {
        match self.kind {
            DomainKind::UnitBall => 1.0 - norm(point),
            _ => {
                let mut d = f64::INFINITY;
                for (axis, &x) in point.iter().enumerate() {
                    let (lo, hi) = self.axis_bounds(axis);
                    d = d.min(x - lo).min(hi - x);
                }
                d
            }
        }
    }

    /// `d(x) = dist(x, ∂Ω)` for a point of the closed domain.
    pub fn distance_to_boundary(&self, point: &[f64]) -> Result<f64> {
        self.check_dim(point)?;
        let d = self.signed_distance(point);
        if d < -GEOM_EPS * self.scale() {
            return Err(Error::OutOfDomain { distance: d });
        }
        Ok(d.max(0.0))
    }

    /// Gap between the second-nearest and nearest face distances of a box
    /// (infinite in 1D with a single nearest face, and for the ball).
    pub fn ridge_gap(&self, point: &[f64]) -> f64 {
        if self.kind == DomainKind::UnitBall {
            return f64::INFINITY;
        }
        let (mut first, mut second) = (f64::INFINITY, f64::INFINITY);
        for (axis, &x) in point.iter().enumerate() {
            let (lo, hi) = self.axis_bounds(axis);
            for v in [x - lo, hi - x] {
                if v < first {
                    second = first;
                    first = v;
                } else if v < second {
                    second = v;
                }
            }
        }
        second - first
    }

    /// Nearest face of a box as `(axis, sign)` where `sign = +1` means the
    /// `lo` face (inward direction `+e_axis`).
    fn nearest_face(&self, point: &[f64]) -> (usize, f64) {
        let mut best = (0, 1.0);
        let mut dist = f64::INFINITY;
        for (axis, &x) in point.iter().enumerate() {
            let (lo, hi) = self.axis_bounds(axis);
            if x - lo < dist {
                dist = x - lo;
                best = (axis, 1.0);
            }
            if hi - x < dist {
                dist = hi - x;
                best = (axis, -1.0);
            }
        }
        best
    }

    /// `∇d` at a point where `d` is differentiable.
    pub fn distance_gradient(&self, point: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(point)?;
        match self.kind {
            DomainKind::UnitBall => {
                let r = norm(point);
                if r <= GEOM_EPS {
                    return Err(Error::NonsmoothPoint);
                }
                Ok(point.iter().map(|x| -x / r).collect())
            }
            _ => {
                if self.ridge_gap(point) <= GEOM_EPS * self.scale() {
                    return Err(Error::NonsmoothPoint);
                }
                let mut g = vec![0.0; self.dimension];
                let (axis, sign) = self.nearest_face(point);
                g[axis] = sign;
                Ok(g)
            }
        }
    }

    /// `∇d` with ties broken deterministically: the first nearest face of a
    /// box, zero at the center of the ball. Used by coefficient families that
    /// compose with `d`.
    pub fn distance_gradient_lenient(&self, point: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        match self.kind {
            DomainKind::UnitBall => {
                let r = norm(point);
                if r > 0.0 {
                    for (o, x) in out.iter_mut().zip(point) {
                        *o = -x / r;
                    }
                }
            }
            _ => {
                let (axis, sign) = self.nearest_face(point);
                out[axis] = sign;
            }
        }
    }

    /// Analytic `Δd` at a smooth interior point.
    pub fn laplacian_of_distance(&self, point: &[f64]) -> Result<f64> {
        let d = self.distance_to_boundary(point)?;
        if d <= 0.0 {
            return Err(Error::NonsmoothPoint);
        }
        match self.kind {
            DomainKind::UnitBall => {
                let r = norm(point);
                if r <= GEOM_EPS {
                    return Err(Error::NonsmoothPoint);
                }
                Ok(-((self.dimension - 1) as f64) / r)
            }
            _ => {
                if self.ridge_gap(point) <= GEOM_EPS * self.scale() {
                    return Err(Error::NonsmoothPoint);
                }
                Ok(0.0)
            }
        }
    }

    /// Lenient `Δd`: zero on box ridges, and zero at the ball center.
    pub(crate) fn laplacian_of_distance_lenient(&self, point: &[f64]) -> f64 {
        match self.kind {
            DomainKind::UnitBall => {
                let r = norm(point);
                if r > 0.0 {
                    -((self.dimension - 1) as f64) / r
                } else {
                    0.0
                }
            }
            _ => 0.0,
        }
    }

    /// Unit inner normal at a boundary point. `tol` is the distance within
    /// which a point counts as lying on `∂Ω` (grid spacing for ball nodes).
    pub fn inner_normal(&self, point: &[f64], tol: f64) -> Result<Vec<f64>> {
        self.check_dim(point)?;
        let tol = tol.max(GEOM_EPS * self.scale());
        match self.kind {
            DomainKind::UnitBall => {
                let r = norm(point);
                if (1.0 - r).abs() > tol {
                    return Err(Error::NotOnBoundary { distance: 1.0 - r });
                }
                Ok(point.iter().map(|x| -x / r).collect())
            }
            _ => {
                let sd = self.signed_distance(point);
                if sd < -tol {
                    return Err(Error::OutOfDomain { distance: sd });
                }
                let mut normal = vec![0.0; self.dimension];
                let mut hits = 0;
                for (axis, &x) in point.iter().enumerate() {
                    let (lo, hi) = self.axis_bounds(axis);
                    if (x - lo).abs() <= tol {
                        normal[axis] = 1.0;
                        hits += 1;
                    }
                    if (hi - x).abs() <= tol {
                        normal[axis] = -1.0;
                        hits += 1;
                    }
                }
                match hits {
                    0 => Err(Error::NotOnBoundary { distance: sd }),
                    1 => Ok(normal),
                    _ => Err(Error::NonsmoothPoint),
                }
            }
        }
    }

    /// Inner normals of every boundary face through a point (one for a smooth
    /// point, several at box edges and corners).
    pub fn incident_normals(&self, point: &[f64], tol: f64) -> Vec<Vec<f64>> {
        match self.kind {
            DomainKind::UnitBall => self.inner_normal(point, tol).map(|n| vec![n]).unwrap_or_default(),
            _ => {
                let mut out = Vec::new();
                for (axis, &x) in point.iter().enumerate() {
                    let (lo, hi) = self.axis_bounds(axis);
                    for (face, sign) in [(lo, 1.0), (hi, -1.0)] {
                        if (x - face).abs() <= tol.max(GEOM_EPS * self.scale()) {
                            let mut n = vec![0.0; self.dimension];
                            n[axis] = sign;
                            out.push(n);
                        }
                    }
                }
                out
            }
        }
    }

    /// Closest point of `∂Ω` to `point` (radial projection for the ball).
    pub fn project_to_boundary(&self, point: &[f64]) -> Vec<f64> {
        match self.kind {
            DomainKind::UnitBall => {
                let r = norm(point);
                if r > 0.0 {
                    point.iter().map(|x| x / r).collect()
                } else {
                    let mut p = vec![0.0; self.dimension];
                    p[0] = 1.0;
                    p
                }
            }
            _ => {
                let mut p = point.to_vec();
                let (axis, sign) = self.nearest_face(point);
                let (lo, hi) = self.axis_bounds(axis);
                p[axis] = if sign > 0.0 { lo } else { hi };
                p
            }
        }
    }

    /// Samples the band `0 < d(x) < band_width` with a Halton sequence and
    /// checks `Δd ≤ 0` at every smooth sample. Samples within `ridge_margin`
    /// of a box ridge, or at the ball center, are skipped and counted.
    pub fn check_concavity_condition(
        &self,
        band_width: f64,
        samples: usize,
        ridge_margin: f64,
        seed: u64,
    ) -> Result<ConditionReport> {
        if !(band_width > 0.0) {
            return Err(Error::InvalidParameter { name: "band_width", value: band_width });
        }
        if band_width >= self.inradius() {
            return Err(Error::InvalidParameter { name: "band_width", value: band_width });
        }
        if samples == 0 {
            return Err(Error::InvalidParameter { name: "samples", value: 0.0 });
        }
        let (lo, hi) = self.bounding_box();
        let mut p = vec![0.0; self.dimension];
        let mut worst = f64::NEG_INFINITY;
        let (mut evaluated, mut skipped) = (0usize, 0usize);
        let mut index = 1 + seed;
        let max_draws = 10_000 * samples as u64 + 1000;
        while evaluated < samples && index < max_draws + seed {
            halton_point(index, &lo, &hi, &mut p);
            index += 1;
            let d = self.signed_distance(&p);
            if !(d > 0.0 && d < band_width) {
                continue;
            }
            if self.ridge_gap(&p) <= ridge_margin {
                skipped += 1;
                continue;
            }
            match self.laplacian_of_distance(&p) {
                Ok(lap) => {
                    worst = worst.max(lap);
                    evaluated += 1;
                }
                Err(_) => skipped += 1,
            }
        }
        if evaluated == 0 {
            worst = 0.0;
        }
        Ok(ConditionReport::new(
            ConditionId::BoundaryConcavity,
            worst,
            CONCAVITY_TOLERANCE,
            evaluated,
            format!("max Δd over {evaluated} band samples (band {band_width}); {skipped} nonsmooth samples skipped"),
        ))
    }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Interior,
    Boundary,
    /// Bounding-box node outside the ball.
    Outside,
}

/// Uniform tensor grid over the bounding box of a domain.
///
/// Nodes are numbered with axis 0 varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    domain: DomainSpec,
    counts: Vec<usize>,
    spacing: Vec<f64>,
    lo: Vec<f64>,
    strides: Vec<usize>,
    coords: Vec<f64>,
    kinds: Vec<NodeKind>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    volumes: Vec<f64>,
}

impl Grid {
    pub fn new(domain: DomainSpec, counts: &[usize]) -> Result<Self> {
        domain.validate()?;
        let n = domain.dim();
        if counts.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: counts.len() });
        }
        if let Some((axis, &count)) = counts.iter().enumerate().find(|(_, &c)| c < 3) {
            return Err(Error::InvalidResolution { axis, count });
        }
        let (lo, hi) = domain.bounding_box();
        let spacing: Vec<f64> = (0..n).map(|a| (hi[a] - lo[a]) / (counts[a] - 1) as f64).collect();
        let mut strides = vec![1usize; n];
        for a in 1..n {
            strides[a] = strides[a - 1] * counts[a - 1];
        }
        let total: usize = counts.iter().product();

        let mut coords = vec![0.0; total * n];
        for idx in 0..total {
            for a in 0..n {
                let i = (idx / strides[a]) % counts[a];
                coords[idx * n + a] = if i + 1 == counts[a] { hi[a] } else { lo[a] + spacing[a] * i as f64 };
            }
        }

        let mut kinds = vec![NodeKind::Interior; total];
        match domain.kind {
            DomainKind::UnitBall => {
                let inside = |p: &[f64]| norm(p) <= 1.0 + GEOM_EPS;
                for idx in 0..total {
                    let p = &coords[idx * n..(idx + 1) * n];
                    if !inside(p) {
                        kinds[idx] = NodeKind::Outside;
                        continue;
                    }
                    let mut on_edge = norm(p) >= 1.0 - GEOM_EPS;
                    for a in 0..n {
                        let i = (idx / strides[a]) % counts[a];
                        for nb in [i.checked_sub(1), Some(i + 1).filter(|&j| j < counts[a])] {
                            match nb {
                                None => on_edge = true,
                                Some(j) => {
                                    let q = idx + j * strides[a] - i * strides[a];
                                    if !inside(&coords[q * n..(q + 1) * n]) {
                                        on_edge = true;
                                    }
                                }
                            }
                        }
                    }
                    if on_edge {
                        kinds[idx] = NodeKind::Boundary;
                    }
                }
            }
            _ => {
                for (idx, kind) in kinds.iter_mut().enumerate() {
                    let edge = (0..n).any(|a| {
                        let i = (idx / strides[a]) % counts[a];
                        i == 0 || i + 1 == counts[a]
                    });
                    if edge {
                        *kind = NodeKind::Boundary;
                    }
                }
            }
        }

        let mut volumes = vec![0.0; total];
        for idx in 0..total {
            if kinds[idx] == NodeKind::Outside {
                continue;
            }
            let mut v = 1.0;
            for a in 0..n {
                let i = (idx / strides[a]) % counts[a];
                let w = if domain.kind != DomainKind::UnitBall && (i == 0 || i + 1 == counts[a]) { 0.5 } else { 1.0 };
                v *= w * spacing[a];
            }
            volumes[idx] = v;
        }

        let interior = (0..total).filter(|&i| kinds[i] == NodeKind::Interior).collect();
        let boundary = (0..total).filter(|&i| kinds[i] == NodeKind::Boundary).collect();
        Ok(Self { domain, counts: counts.to_vec(), spacing, lo, strides, coords, kinds, interior, boundary, volumes })
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_spacing(&self) -> f64 {
        self.spacing.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Total node count including nodes outside the ball.
    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }

    pub fn point(&self, idx: usize) -> &[f64] {
        let n = self.dim();
        &self.coords[idx * n..(idx + 1) * n]
    }

    pub fn kind(&self, idx: usize) -> NodeKind {
        self.kinds[idx]
    }

    pub fn is_active(&self, idx: usize) -> bool {
        self.kinds[idx] != NodeKind::Outside
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    /// Active (interior or boundary) node indices in ascending order.
    pub fn active(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.is_active(i))
    }

    /// Control volume of a node: trapezoid weights on box faces, a full cell
    /// for active ball nodes, zero outside.
    pub fn volume(&self, idx: usize) -> f64 {
        self.volumes[idx]
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn index_along(&self, idx: usize, axis: usize) -> usize {
        (idx / self.strides[axis]) % self.counts[axis]
    }

    /// Linear index from a multi-index.
    pub fn index_of(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    /// Neighbor along `axis` in direction `forward`, if it exists in the box.
    pub fn neighbor(&self, idx: usize, axis: usize, forward: bool) -> Option<usize> {
        let i = self.index_along(idx, axis);
        if forward {
            (i + 1 < self.counts[axis]).then(|| idx + self.strides[axis])
        } else {
            (i > 0).then(|| idx - self.strides[axis])
        }
    }

    /// Active neighbor along `axis`.
    pub fn active_neighbor(&self, idx: usize, axis: usize, forward: bool) -> Option<usize> {
        self.neighbor(idx, axis, forward).filter(|&j| self.is_active(j))
    }

    /// Lower corner of the bounding box.
    pub fn origin(&self) -> &[f64] {
        &self.lo
    }

    /// Edges `(j, j + e_axis)` joining two active nodes, with the transverse
    /// face area used by the finite-volume fluxes.
    pub fn faces(&self) -> Vec<Face> {
        let n = self.dim();
        let mut out = Vec::new();
        for axis in 0..n {
            for j in 0..self.len() {
                if !self.is_active(j) {
                    continue;
                }
                if let Some(nb) = self.active_neighbor(j, axis, true) {
                    let mut area = 1.0;
                    for m in (0..n).filter(|&m| m != axis) {
                        let i = self.index_along(j, m);
                        let w = if self.domain.kind != DomainKind::UnitBall && (i == 0 || i + 1 == self.counts[m]) {
                            0.5
                        } else {
                            1.0
                        };
                        area *= w * self.spacing[m];
                    }
                    out.push(Face { lower: j, upper: nb, axis, area });
                }
            }
        }
        out
    }

    /// Product of the spacings of all axes except `axis`.
    pub fn transverse_measure(&self, axis: usize) -> f64 {
        self.spacing.iter().enumerate().filter(|(m, _)| *m != axis).map(|(_, h)| h).product()
    }

    pub fn cell_measure(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Midpoint of the edge between two neighboring nodes.
    pub fn midpoint(&self, a: usize, b: usize, out: &mut [f64]) {
        for ((o, x), y) in out.iter_mut().zip(self.point(a)).zip(self.point(b)) {
            *o = 0.5 * (x + y);
        }
    }
}

/// An edge between two active neighbors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Face {
    pub lower: usize,
    pub upper: usize,
    pub axis: usize,
    pub area: f64,
}
