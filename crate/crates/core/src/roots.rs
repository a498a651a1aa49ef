//! Bracketed root finding shared by the threshold searches.

use crate::error::{Error, Result};

/// Bisection on `[lower, upper]` until the bracket is narrower than `tol`.
/// `f(lower)` and `f(upper)` must have opposite signs (or one be zero).
pub fn bisect(mut f: impl FnMut(f64) -> f64, lower: f64, upper: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (lower, upper);
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::NoBracket { lower, upper });
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
