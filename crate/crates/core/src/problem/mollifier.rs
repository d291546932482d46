//! The triangular mollifier family used to regularize Kruzkov entropies.
//!
//! With `h(s) = (2/η)(1 - |s|/η)_+`, `S(s) = ∫_0^s h` smooths `sign(s)` and
//! `I(s) = ∫_0^s S` smooths `|s|`. All three are evaluated in closed form.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mollifier {
    eta: f64,
}

impl Mollifier {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::InvalidParameter { name: "eta", value: eta });
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// `h(s)`: a tent of height `2/η` supported on `[-η, η]`.
    pub fn kernel(&self, s: f64) -> f64 {
        let e = self.eta;
        (2.0 / e) * (1.0 - s.abs() / e).max(0.0)
    }

    /// `S(s)`: odd, piecewise quadratic, equal to `sign(s)` for `|s| ≥ η`.
    pub fn sign(&self, s: f64) -> f64 {
        let e = self.eta;
        let a = s.abs();
        let v = if a >= e { 1.0 } else { 2.0 * a / e - a * a / (e * e) };
        if s < 0.0 {
            -v
        } else {
            v
        }
    }

    /// `I(s)`: even and convex, equal to `|s| - η/3` for `|s| ≥ η`.
    pub fn abs(&self, s: f64) -> f64 {
        let e = self.eta;
        let a = s.abs();
        if a >= e {
            a - self.abs_offset()
        } else {
            a * a / e - a * a * a / (3.0 * e * e)
        }
    }

    /// The constant `C(η) = η/3` with `I(s) = |s| - C(η)` outside `[-η, η]`.
    pub fn abs_offset(&self) -> f64 {
        self.eta / 3.0
    }

    /// `∫_0^s τ h(τ) dτ`, even, saturating at `η/3`.
    pub fn moment(&self, s: f64) -> f64 {
        let e = self.eta;
        let a = s.abs().min(e);
        a * a / e - 2.0 * a * a * a / (3.0 * e * e)
    }
}

pub fn mollifier_h(eta: f64, s: f64) -> Result<f64> {
    Ok(Mollifier::new(eta)?.kernel(s))
}

pub fn mollifier_s(eta: f64, s: f64) -> Result<f64> {
    Ok(Mollifier::new(eta)?.sign(s))
}

pub fn mollifier_i(eta: f64, s: f64) -> Result<f64> {
    Ok(Mollifier::new(eta)?.abs(s))
}
