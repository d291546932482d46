//! Composite Simpson quadrature with panel doubling.

use alloc::vec::Vec;

/// Starting number of Simpson subintervals on each smooth piece.
pub const INITIAL_PANELS: usize = 64;
/// Stop doubling once successive estimates differ by less than this.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;
const MAX_PANELS: usize = 1 << 16;

/// Integrates `f` over `[a, b]` (signed: negative when `b < a`), splitting at
/// every breakpoint strictly inside the interval so that each Simpson piece
/// sees a smooth integrand.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, breaks: &[f64]) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&c| c > lo && c < hi).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
    cuts.dedup();
    let pieces = cuts.len() + 1;
    let tol = QUADRATURE_TOLERANCE / pieces as f64;
    let mut total = 0.0;
    let mut left = lo;
    for &c in cuts.iter().chain(core::iter::once(&hi)) {
        total += simpson_doubling(&mut f, left, c, tol);
        left = c;
    }
    sign * total
}

/// Composite Simpson starting from [`INITIAL_PANELS`] subintervals and doubling,
/// reusing previous nodes, until two estimates agree within `tol`.
pub fn simpson_doubling<F: FnMut(f64) -> f64>(f: &mut F, lo: f64, hi: f64, tol: f64) -> f64 {
    let mut n = INITIAL_PANELS;
    let mut h = (hi - lo) / n as f64;
    let ends = f(lo) + f(hi);
    let mut even = 0.0; // interior nodes with even index
    let mut odd = 0.0;
    for i in 1..n {
        let v = f(lo + h * i as f64);
        if i % 2 == 0 {
            even += v
        } else {
            odd += v
        }
    }
    let mut estimate = (ends + 4.0 * odd + 2.0 * even) * h / 3.0;
    while n < MAX_PANELS {
        n *= 2;
        h *= 0.5;
        even += odd;
        odd = 0.0;
        for i in (1..n).step_by(2) {
            odd += f(lo + h * i as f64);
        }
        let refined = (ends + 4.0 * odd + 2.0 * even) * h / 3.0;
        let diff = (refined - estimate).abs();
        estimate = refined;
        if diff < tol {
            break;
        }
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics() {
        let v = integrate(|s| s * s * s - 2.0 * s + 1.0, 0.0, 2.0, &[]);
        assert!((v - (4.0 - 4.0 + 2.0)).abs() < 1e-13);
    }

    #[test]
    fn orientation_is_signed() {
        let v = integrate(|s| s * s, 2.0, 0.0, &[]);
        assert!((v + 8.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn breakpoints_resolve_kinks() {
        let v = integrate(|s: f64| s.abs(), -1.0, 3.0, &[0.0]);
        assert!((v - 5.0).abs() < 1e-13);
    }

    #[test]
    fn smooth_nonpolynomial_converges() {
        let v = integrate(|s: f64| s.sin(), 0.0, core::f64::consts::PI, &[]);
        assert!((v - 2.0).abs() < 1e-10);
    }
}
