//! Entropy primitives `A(u) = ∫_0^u a ds` and `A_η(u, k) = ∫_k^u a S_η(s-k) ds`.
//!
//! The free functions integrate `a` itself by Simpson doubling. The verifier
//! evaluates these millions of times, so [`EntropyKernel`] exploits the
//! separable structure `a = state(s) · weight(x)` and only integrates the
//! state factor, caching the saturated tails.

use alloc::vec::Vec;

use super::coefficients::{CoefficientSet, StateFactor};
use super::mollifier::Mollifier;
use super::quadrature::integrate;
use crate::{Error, Result};

/// Quadrature nodes where `a` is below this are reported as negative diffusion.
pub const NEGATIVE_DIFFUSION_TOLERANCE: f64 = 1e-12;

/// `∫_lo^hi a(s) w(s) ds`, failing if `a` is negative at a quadrature node.
fn checked_integral<A, W>(mut a: A, mut w: W, lo: f64, hi: f64, breaks: &[f64]) -> Result<f64>
where
    A: FnMut(f64) -> f64,
    W: FnMut(f64) -> f64,
{
    let mut negative: Option<f64> = None;
    let v = integrate(
        |s| {
            let value = a(s);
            if value < -NEGATIVE_DIFFUSION_TOLERANCE && negative.is_none() {
                negative = Some(value);
            }
            value * w(s)
        },
        lo,
        hi,
        breaks,
    );
    match negative {
        Some(value) => Err(Error::NegativeDiffusion { value }),
        None => Ok(v),
    }
}

/// `A(u, x, t) = ∫_0^u a(s, x, t) ds` by composite Simpson quadrature.
pub fn antiderivative_a(coeffs: &CoefficientSet, u: f64, x: &[f64], t: f64) -> Result<f64> {
    let breaks = coeffs.state_breakpoints();
    checked_integral(|s| coeffs.a(s, x, t), |_| 1.0, 0.0, u, &breaks)
}

/// `A_η(u, x, t, k) = ∫_k^u a(s, x, t) S_η(s - k) ds` by composite Simpson
/// quadrature split at `k` and `k ± η`.
pub fn entropy_a_eta(coeffs: &CoefficientSet, u: f64, x: &[f64], t: f64, k: f64, eta: f64) -> Result<f64> {
    let m = Mollifier::new(eta)?;
    let mut breaks = coeffs.state_breakpoints();
    breaks.extend([k, k - eta, k + eta]);
    checked_integral(|s| coeffs.a(s, x, t), |s| m.sign(s - k), k, u, &breaks)
}

/// Entropy evaluation for a fixed level `k` and either the exact sign
/// (`mollifier = None`) or its regularization `S_η`.
#[derive(Debug, Clone)]
pub struct EntropyKernel {
    state: StateFactor,
    k: f64,
    mollifier: Option<Mollifier>,
    breaks: Vec<f64>,
    /// `∫_k^{k±η} state(s) S_η(s-k) ds` (signed), reused once `|u-k| ≥ η`.
    tail_up: f64,
    tail_down: f64,
    state_at_k: f64,
}

impl EntropyKernel {
    pub fn classical(state: &StateFactor, k: f64) -> Self {
        Self {
            state: state.clone(),
            k,
            mollifier: None,
            breaks: Vec::new(),
            tail_up: 0.0,
            tail_down: 0.0,
            state_at_k: state.antiderivative(k),
        }
    }

    pub fn regularized(state: &StateFactor, k: f64, mollifier: Mollifier) -> Self {
        let eta = mollifier.eta();
        let mut breaks = state.breakpoints();
        breaks.extend([k - eta, k, k + eta]);
        let integrand = |s: f64| state.value(s) * mollifier.sign(s - k);
        let tail_up = integrate(integrand, k, k + eta, &breaks);
        let tail_down = integrate(integrand, k, k - eta, &breaks);
        Self {
            state: state.clone(),
            k,
            mollifier: Some(mollifier),
            breaks,
            tail_up,
            tail_down,
            state_at_k: state.antiderivative(k),
        }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn mollifier(&self) -> Option<Mollifier> {
        self.mollifier
    }

    /// `|u-k|` or `I_η(u-k)`.
    pub fn entropy(&self, u: f64) -> f64 {
        match self.mollifier {
            None => (u - self.k).abs(),
            Some(m) => m.abs(u - self.k),
        }
    }

    /// `sign(u-k)` (with `sign(0) = 0`) or `S_η(u-k)`.
    pub fn sign(&self, u: f64) -> f64 {
        match self.mollifier {
            None => sign(u - self.k),
            Some(m) => m.sign(u - self.k),
        }
    }

    /// `h_η(u-k)`; zero for the classical kernel.
    pub fn kernel(&self, u: f64) -> f64 {
        self.mollifier.map_or(0.0, |m| m.kernel(u - self.k))
    }

    /// `∫_0^{u-k} τ h_η(τ) dτ`; zero for the classical kernel.
    pub fn moment(&self, u: f64) -> f64 {
        self.mollifier.map_or(0.0, |m| m.moment(u - self.k))
    }

    /// `∫_k^u state(s) σ(s-k) ds` with `σ = sign` or `S_η`. Multiplying by the
    /// spatial weight gives `sign(u-k)(A(u)-A(k))` or `A_η`; multiplying by its
    /// gradient gives the `a_{x_i}` flux integrals.
    pub fn state_integral(&self, u: f64) -> f64 {
        let primitive = |s: f64| self.state.antiderivative(s);
        match self.mollifier {
            None => sign(u - self.k) * (primitive(u) - self.state_at_k),
            Some(m) => {
                let eta = m.eta();
                let k = self.k;
                if u >= k + eta {
                    self.tail_up + primitive(u) - primitive(k + eta)
                } else if u <= k - eta {
                    self.tail_down - (primitive(u) - primitive(k - eta))
                } else {
                    integrate(|s| self.state.value(s) * m.sign(s - k), k, u, &self.breaks)
                }
            }
        }
    }
}

/// Symmetric sign with `sign(0) = 0`.
pub fn sign(s: f64) -> f64 {
    if s > 0.0 {
        1.0
    } else if s < 0.0 {
        -1.0
    } else {
        0.0
    }
}
