//! One-dimensional bracketed root finding and minimization.

use crate::error::{Error, Result};

/// Stop once the bracket is narrower than this, relative to its upper end.
pub const BISECTION_REL_WIDTH: f64 = 1e-12;
pub const BISECTION_MAX_ITER: usize = 200;

/// Bisection for a sign change of `f` on `[lo, hi]`, `0 < lo < hi`.
///
/// Midpoints are geometric, so brackets spanning many decades shrink
/// quickly. Returns the final bracket `(lo, hi)`; the root lies inside.
pub fn bisect_positive<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok((lo, lo));
    }
    if fhi == 0.0 {
        return Ok((hi, hi));
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::NotBracketed { lo, hi });
    }
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= BISECTION_REL_WIDTH * hi {
            break;
        }
        let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        let fm = f(mid);
        if fm == 0.0 {
            return Ok((mid, mid));
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}

/// Root of an increasing function on `(0, ∞)`.
///
/// Starts from `[1e-9, 1e9]` and widens by factors of 1e3 while `f` has
/// no sign change.
pub fn invert_increasing<F: Fn(f64) -> f64>(f: F) -> Result<f64> {
    let (mut lo, mut hi) = (1e-9, 1e9);
    while f(lo) > 0.0 && lo > 1e-300 {
        lo *= 1e-3;
    }
    while f(hi) < 0.0 && hi < 1e300 {
        hi *= 1e3;
    }
    let (a, b) = bisect_positive(&f, lo, hi)?;
    Ok(0.5 * (a + b))
}

/// Golden-section search for the minimum of a unimodal `f` on `[a, b]`.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..400 {
        if (b - a).abs() <= tol * (1.0 + c.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    // Decimal exponents keep decade points such as 1.0 exact.
    let (a, b) = (lo.log10(), hi.log10());
    let mut out: Vec<f64> = (0..n).map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64)).collect();
    out[0] = lo;
    out[n - 1] = hi;
    out
}
