//! Principal real branch `W₀` of the Lambert W function, the inverse of
//! `w -> w e^w` on `[-1, ∞)`.

use std::f64::consts::E;

use crate::error::{Error, Result};

const MAX_ITER: usize = 64;

/// `W₀(x)` for `x >= -1/e`.
///
/// Starts from a branch-point series near `-1/e`, a logarithmic estimate
/// elsewhere, and refines with Halley's method. For `x > e` the iteration
/// runs on the equivalent equation `w + ln w = ln x`, which does not
/// overflow.
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::NonFinite("lambert_w0 argument is NaN".into()));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    // q = e x + 1 = p² / 2, computed with a single rounding.
    let q = E.mul_add(x, 1.0);
    if q < -4.0 * f64::EPSILON {
        return Err(Error::Domain {
            x,
            domain: crate::interval::Interval {
                lo: -1.0 / E,
                hi: f64::INFINITY,
            },
        });
    }
    if q <= 0.0 {
        return Ok(-1.0);
    }
    if x > E {
        return Ok(w_from_log(x.ln()));
    }

    let p = (2.0 * q).sqrt();
    if p < 1e-3 {
        return Ok(branch_point_series(p));
    }
    let mut w = if q < 0.3 {
        branch_point_series(p)
    } else {
        let l = x.ln_1p();
        l * (1.0 - (1.0 + l).ln() / (2.0 + l))
    };
    for _ in 0..MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 2.0 * f64::EPSILON * w.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(w)
}

/// `W₀(e^l)`, usable when `e^l` itself would overflow or underflow.
pub fn lambert_w0_exp(l: f64) -> Result<f64> {
    if l.is_nan() {
        return Err(Error::NonFinite("lambert_w0_exp argument is NaN".into()));
    }
    if l > 1.0 {
        Ok(w_from_log(l))
    } else {
        lambert_w0(l.exp())
    }
}

/// Solves `w + ln w = l` for `l > 1` (so `w > 1`).
fn w_from_log(l: f64) -> f64 {
    if l == f64::INFINITY {
        return f64::INFINITY;
    }
    let ll = l.ln();
    let mut w = if l > 3.0 { l - ll + ll / l } else { 0.5 + 0.5 * l };
    for _ in 0..MAX_ITER {
        let f = w + w.ln() - l;
        let fp = 1.0 + 1.0 / w;
        let fpp = -1.0 / (w * w);
        let step = f / fp / (1.0 - f * fpp / (2.0 * fp * fp));
        w -= step;
        if step.abs() <= 2.0 * f64::EPSILON * w {
            break;
        }
    }
    w
}

/// Expansion of `W₀` about the branch point in `p = sqrt(2 (e x + 1))`.
fn branch_point_series(p: f64) -> f64 {
    const C: [f64; 7] = [
        -1.0,
        1.0,
        -1.0 / 3.0,
        11.0 / 72.0,
        -43.0 / 540.0,
        769.0 / 17280.0,
        -221.0 / 8505.0,
    ];
    C.iter().rev().fold(0.0, |acc, &c| acc * p + c)
}
