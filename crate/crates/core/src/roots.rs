//! Bracketed scalar root finding.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Root of `f` in `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs
/// (or one of them vanishes). Illinois-modified regula falsi, falling back
/// to bisection whenever the secant step stalls. Stops when the bracket is
/// narrower than `rel_tol·max(|lo|, |hi|)` or cannot shrink any further.
pub fn bracketed_root<T: Scalar>(mut f: impl FnMut(T) -> T, mut lo: T, mut hi: T, rel_tol: T) -> Result<T> {
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(Error::NumericDomain(format!(
            "no sign change on [{}, {}]: f = {}, {}",
            lo.as_f64(),
            hi.as_f64(),
            flo.as_f64(),
            fhi.as_f64()
        )));
    }
    let half = T::lit(0.5);
    let mut side = 0i8;
    for iter in 0..300 {
        let width = (hi - lo).abs();
        if width <= rel_tol * lo.abs().max(hi.abs()) {
            break;
        }
        let mut x = (lo * fhi - hi * flo) / (fhi - flo);
        // every fourth step, or if the secant leaves the bracket, bisect
        if iter % 4 == 3 || !(x > lo.min(hi) && x < lo.max(hi)) {
            x = lo + (hi - lo) * half;
        }
        if x == lo || x == hi {
            break;
        }
        let fx = f(x);
        if fx == T::zero() {
            return Ok(x);
        }
        if !fx.is_finite() {
            return Err(Error::NumericDomain(format!("non-finite value at {}", x.as_f64())));
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi = fhi * half;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo = flo * half;
            }
            side = 1;
        }
    }
    Ok(if flo.abs() < fhi.abs() { lo } else { hi })
}
