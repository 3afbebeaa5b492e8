use crate::error::{Error, Result};
use crate::scalar::Real;

/// Bisection root finder for a function with a sign change on `[lo, hi]`.
///
/// Stops once the bracket width is at most `tol * max(1, |x|)`; returns the midpoint.
pub fn bisect<S: Real>(mut f: impl FnMut(S) -> S, lo: S, hi: S, tol: S) -> Result<S> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == S::zero() {
        return Ok(lo);
    }
    if fhi == S::zero() {
        return Ok(hi);
    }
    if flo.is_nan() || fhi.is_nan() || (flo > S::zero()) == (fhi > S::zero()) {
        return Err(Error::NoSignChange {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    let two = S::lit(2.0);
    for _ in 0..2000 {
        let mid = lo + (hi - lo) / two;
        if hi - lo <= tol * S::one().max(mid.abs()) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == S::zero() {
            return Ok(mid);
        }
        if (fm > S::zero()) == (flo > S::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) / two)
}

/// Bisection on the geometric midpoint, for positive brackets spanning many decades.
///
/// Stops once `hi / lo - 1 <= rel_tol`.
pub fn bisect_log<S: Real>(mut f: impl FnMut(S) -> S, lo: S, hi: S, rel_tol: S) -> Result<S> {
    if !(lo > S::zero() && hi > S::zero()) {
        return Err(Error::InvalidParameter(
            "logarithmic bisection needs a positive bracket".into(),
        ));
    }
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let flo = f(lo);
    let fhi = f(hi);
    if flo == S::zero() {
        return Ok(lo);
    }
    if fhi == S::zero() {
        return Ok(hi);
    }
    if flo.is_nan() || fhi.is_nan() || (flo > S::zero()) == (fhi > S::zero()) {
        return Err(Error::NoSignChange {
            lo: lo.to_f64_lossy(),
            hi: hi.to_f64_lossy(),
        });
    }
    let lo_positive = flo > S::zero();
    for _ in 0..2000 {
        let mid = (lo * hi).sqrt();
        if hi / lo - S::one() <= rel_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == S::zero() {
            return Ok(mid);
        }
        if (fm > S::zero()) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}
