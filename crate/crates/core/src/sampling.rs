//! Deterministic low-discrepancy sampling.

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `index` in base `PRIMES[dim]`.
pub(crate) fn halton(index: u64, dim: usize) -> f64 {
    let base = PRIMES[dim % PRIMES.len()];
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Fills `out` with the `index`-th Halton point mapped into `[lo, hi]` per axis.
pub(crate) fn halton_point(index: u64, lo: &[f64], hi: &[f64], out: &mut [f64]) {
    for (axis, x) in out.iter_mut().enumerate() {
        *x = lo[axis] + (hi[axis] - lo[axis]) * halton(index, axis);
    }
}

/// `n` equispaced values covering `[lo, hi]` (both ends included when `n >= 2`).
pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| if i + 1 == n && n > 1 { hi } else { lo + step * i as f64 })
}
