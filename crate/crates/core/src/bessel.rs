//! Modified Bessel functions of the first kind, orders 0 and 1, by power series.

use crate::error::{Error, Result};

/// Largest argument accepted before the series risks overflowing `f64`.
pub const MAX_ARG: f64 = 700.0;

const TERM_RATIO_CUTOFF: f64 = 1e-17;

/// `I_alpha(x)` for `alpha` in `{0, 1}` and `0 <= x <= 700`.
pub fn bessel_i(alpha: u32, x: f64) -> Result<f64> {
    if alpha > 1 {
        return Err(Error::Domain(format!("Bessel order {alpha} not supported")));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("Bessel argument {x} must be nonnegative")));
    }
    if x > MAX_ARG {
        return Err(Error::BesselOverflow(x));
    }
    let half = 0.5 * x;
    let q = half * half;
    // m = 0 term: (x/2)^alpha / Gamma(alpha + 1)
    let mut term = if alpha == 0 { 1.0 } else { half };
    let mut sum = term;
    let mut m = 0.0f64;
    loop {
        m += 1.0;
        term *= q / (m * (m + alpha as f64));
        sum += term;
        if term <= TERM_RATIO_CUTOFF * sum {
            break;
        }
    }
    Ok(sum)
}

pub fn i0(x: f64) -> Result<f64> {
    bessel_i(0, x)
}

pub fn i1(x: f64) -> Result<f64> {
    bessel_i(1, x)
}
