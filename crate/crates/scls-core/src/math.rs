//! Scalar float helpers that route through `std` or `libm` depending on the
//! build. Only the handful of functions the kernels need.

#[cfg(feature = "std")]
#[inline(always)]
pub fn sqrt(x: f64) -> f64 {
    x.sqrt()
}

#[cfg(not(feature = "std"))]
#[inline(always)]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[cfg(feature = "std")]
#[inline(always)]
pub fn abs(x: f64) -> f64 {
    x.abs()
}

#[cfg(not(feature = "std"))]
#[inline(always)]
pub fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// sqrt(a^2 + b^2) without undue overflow, for rotation coefficients.
#[inline]
pub fn hypot(a: f64, b: f64) -> f64 {
    let (a, b) = (abs(a), abs(b));
    let (big, small) = if a > b { (a, b) } else { (b, a) };
    if big == 0.0 {
        return 0.0;
    }
    let ratio = small / big;
    big * sqrt(1.0 + ratio * ratio)
}
