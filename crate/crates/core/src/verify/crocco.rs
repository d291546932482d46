//! The one-dimensional Crocco change of variables `η = u(y)`, `w(η) = u_y`
//! for a strictly increasing profile, and its inverse.

use alloc::vec::Vec;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::sampling::linspace;
use crate::{Error, Result};

fn uniform(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo, hi, n).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CroccoProfile {
    /// The input samples.
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    /// Uniform grid on `[u(y_0), u(y_end)]`.
    pub eta: Vec<f64>,
    /// `u_y` at `y(η)`.
    pub w: Vec<f64>,
}

/// `du/dy` by second-order differences, one-sided at the ends.
fn derivative(y: &[f64], u: &[f64]) -> Vec<f64> {
    let n = y.len();
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        // three-point formula on the nonuniform stencil around i
        let (a, b, c) = if i == 0 {
            (0, 1, 2)
        } else if i == n - 1 {
            (n - 3, n - 2, n - 1)
        } else {
            (i - 1, i, i + 1)
        };
        let (ya, yb, yc) = (y[a], y[b], y[c]);
        let x = y[i];
        let la = (2.0 * x - yb - yc) / ((ya - yb) * (ya - yc));
        let lb = (2.0 * x - ya - yc) / ((yb - ya) * (yb - yc));
        let lc = (2.0 * x - ya - yb) / ((yc - ya) * (yc - yb));
        d.push(la * u[a] + lb * u[b] + lc * u[c]);
    }
    d
}

/// Samples `w(η)` on `samples` uniform `η` points by piecewise-linear
/// interpolation of the pairs `(u_i, u_y(y_i))`, which preserves the
/// monotonicity of the data.
pub fn crocco_transform(y: &[f64], u: &[f64], samples: usize) -> Result<CroccoProfile> {
    if y.len() != u.len() {
        return Err(Error::DimensionMismatch { expected: y.len(), found: u.len() });
    }
    if y.len() < 3 {
        return Err(Error::InvalidParameter { name: "samples", value: y.len() as f64 });
    }
    if samples < 2 {
        return Err(Error::InvalidParameter { name: "samples", value: samples as f64 });
    }
    if let Some(i) = y.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter { name: "y", value: y[i + 1] });
    }
    if let Some(i) = u.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::NotInvertible { index: i + 1 });
    }
    let du = derivative(y, u);
    if let Some(i) = du.iter().position(|d| !(*d > 0.0)) {
        return Err(Error::NotInvertible { index: i });
    }
    let eta = uniform(u[0], u[u.len() - 1], samples);
    let w = eta
        .iter()
        .map(|&e| {
            let j = u.partition_point(|&v| v <= e).clamp(1, u.len() - 1);
            let s = ((e - u[j - 1]) / (u[j] - u[j - 1])).clamp(0.0, 1.0);
            du[j - 1] + s * (du[j] - du[j - 1])
        })
        .collect();
    Ok(CroccoProfile { y: y.to_vec(), u: u.to_vec(), eta, w })
}

/// `∫ dη / w` over one interval where `w` is linear from `wa` to `wb`.
fn reciprocal_integral(width: f64, wa: f64, wb: f64) -> f64 {
    let r = wb / wa - 1.0;
    if r.abs() < 1e-8 {
        width / wa * (1.0 - 0.5 * r + r * r / 3.0)
    } else {
        width * r.ln_1p() / (wb - wa)
    }
}

/// Solves `y(u) = y0 + ∫_{η_0}^u ds / w(s)` for `u` at each query `y`,
/// with `w` linear between the samples, in closed form.
pub fn invert_law(eta: &[f64], w: &[f64], y0: f64, queries: &[f64]) -> Result<Vec<f64>> {
    if eta.len() != w.len() {
        return Err(Error::DimensionMismatch { expected: eta.len(), found: w.len() });
    }
    if eta.len() < 2 {
        return Err(Error::InvalidParameter { name: "samples", value: eta.len() as f64 });
    }
    if let Some(i) = w.iter().position(|v| !(*v > 0.0)) {
        return Err(Error::DegenerateTransform { index: i, value: w[i] });
    }
    let mut ys = Vec::with_capacity(eta.len());
    ys.push(y0);
    for j in 1..eta.len() {
        let prev = ys[j - 1];
        ys.push(prev + reciprocal_integral(eta[j] - eta[j - 1], w[j - 1], w[j]));
    }
    let last = eta.len() - 1;
    Ok(queries
        .iter()
        .map(|&q| {
            if q <= ys[0] {
                return eta[0];
            }
            if q >= ys[last] {
                return eta[last];
            }
            let j = ys.partition_point(|&v| v <= q).clamp(1, last) - 1;
            let width = eta[j + 1] - eta[j];
            let (wa, wb) = (w[j], w[j + 1]);
            let slope = (wb - wa) / width;
            let dy = q - ys[j];
            // w(u) = wa + slope (u - η_j) and dy = ∫ ds/w give
            // u - η_j = wa (e^{slope dy} - 1) / slope.
            let step = if (slope * dy).abs() < 1e-12 { wa * dy } else { wa * (slope * dy).exp_m1() / slope };
            eta[j] + step.clamp(0.0, width)
        })
        .collect())
}

/// The profile `u(y)` rebuilt from `(η, w)` at the original `y` samples.
pub fn crocco_inverse(profile: &CroccoProfile) -> Result<Vec<f64>> {
    let y0 = *profile.y.first().ok_or(Error::InvalidParameter { name: "samples", value: 0.0 })?;
    invert_law(&profile.eta, &profile.w, y0, &profile.y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sup(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn linear_profile_has_unit_law() {
        let y = uniform(0.0, 1.0, 101);
        let p = crocco_transform(&y, &y, 50).unwrap();
        assert!(p.w.iter().all(|w| (w - 1.0).abs() < 1e-12));
        assert!(sup(&crocco_inverse(&p).unwrap(), &y) < 1e-12);
    }

    #[test]
    fn exponential_profile() {
        let y = uniform(0.0, 10.0, 1000);
        let u: Vec<f64> = y.iter().map(|y| 1.0 - (-y).exp()).collect();
        let p = crocco_transform(&y, &u, 1000).unwrap();
        let exact: Vec<f64> = p.eta.iter().map(|e| 1.0 - e).collect();
        assert!(sup(&p.w, &exact) < 1e-3);
        assert!(sup(&crocco_inverse(&p).unwrap(), &u) < 1e-3);
    }

    #[test]
    fn tanh_profile() {
        let y = uniform(0.0, 10.0, 1000);
        let u: Vec<f64> = y.iter().map(|y| y.tanh()).collect();
        let p = crocco_transform(&y, &u, 1000).unwrap();
        let exact: Vec<f64> = p.eta.iter().map(|e| 1.0 - e * e).collect();
        assert!(sup(&p.w, &exact) < 1e-3);
        assert!(sup(&crocco_inverse(&p).unwrap(), &u) < 1e-3);
    }

    #[test]
    fn analytic_laws_invert_exactly() {
        let eta = uniform(0.0, 0.999, 200);
        let ys = uniform(0.0, 5.0, 77);
        let one = invert_law(&eta, &vec![1.0; 200], 0.0, &uniform(0.0, 0.9, 10)).unwrap();
        assert!(sup(&one, &uniform(0.0, 0.9, 10)) < 1e-14);
        let w: Vec<f64> = eta.iter().map(|e| 1.0 - e).collect();
        let u = invert_law(&eta, &w, 0.0, &ys).unwrap();
        let exact: Vec<f64> = ys.iter().map(|y| 1.0 - (-y).exp()).collect();
        assert!(sup(&u, &exact) < 1e-12);
    }

    #[test]
    fn errors() {
        let y = uniform(0.0, 1.0, 10);
        let mut u = y.clone();
        u[5] = u[4];
        assert!(matches!(crocco_transform(&y, &u, 10), Err(Error::NotInvertible { index: 5 })));
        let bad = invert_law(&[0.0, 0.5, 1.0], &[1.0, 0.0, 1.0], 0.0, &[0.1]);
        assert!(matches!(bad, Err(Error::DegenerateTransform { index: 1, .. })));
    }
}
