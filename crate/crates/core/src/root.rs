//! Bracketed scalar root finding.
//!
//! Brent's method: inverse quadratic interpolation and secant steps,
//! falling back to bisection whenever the interpolated step misbehaves. It
//! never leaves the sign-changing bracket, so convergence is guaranteed.

use crate::error::{Error, Result};

/// Stopping rule `|b - a| <= atol + rtol * |x|`.
#[derive(Debug, Clone, Copy)]
pub struct RootTolerance {
    pub atol: f64,
    pub rtol: f64,
    pub max_iter: usize,
}

impl Default for RootTolerance {
    fn default() -> Self {
        RootTolerance {
            atol: 0.0,
            rtol: 4.0 * f64::EPSILON,
            max_iter: 200,
        }
    }
}

/// Finds a root of `f` in `[a, b]` given `f(a)` and `f(b)` of opposite sign
/// (or one of them zero).
pub fn brent<F>(mut f: F, a: f64, b: f64, fa: f64, fb: f64, tol: RootTolerance) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::Parameter(format!(
            "root not bracketed: f({a}) = {fa}, f({b}) = {fb}"
        )));
    }

    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for _ in 0..tol.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * (tol.atol + tol.rtol * b.abs());
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::NonFinite(format!("f({b}) evaluated to NaN")));
        }
    }
    Err(Error::NoConvergence {
        what: "brent root finder",
        iterations: tol.max_iter,
    })
}

/// Outcome of an outward bracket search.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Grows `[center - w, center + w]` geometrically by `growth` until `f`
/// changes sign, or returns `None` once the half-width exceeds `max_width`.
/// Both ends are probed at every stage; the side that changes sign closest
/// to `center` wins.
pub fn expand_bracket<F>(mut f: F, center: f64, initial_half_width: f64, growth: f64, max_width: f64) -> Option<Bracket>
where
    F: FnMut(f64) -> f64,
{
    let fc = f(center);
    if fc == 0.0 {
        return Some(Bracket {
            lo: center,
            hi: center,
            f_lo: 0.0,
            f_hi: 0.0,
        });
    }
    let (mut inner_lo, mut inner_hi) = (center, center);
    let (mut f_inner_lo, mut f_inner_hi) = (fc, fc);
    let mut w = initial_half_width.max(f64::MIN_POSITIVE);
    while w <= max_width {
        let lo = center - w;
        let hi = center + w;
        let f_lo = f(lo);
        let f_hi = f(hi);
        let lo_changes = f_lo.is_finite() && f_lo.signum() != f_inner_lo.signum();
        let hi_changes = f_hi.is_finite() && f_hi.signum() != f_inner_hi.signum();
        match (lo_changes, hi_changes) {
            (_, true) if !lo_changes || f_hi.abs() <= f_lo.abs() => {
                return Some(Bracket {
                    lo: inner_hi,
                    hi,
                    f_lo: f_inner_hi,
                    f_hi,
                })
            }
            (true, _) => {
                return Some(Bracket {
                    lo,
                    hi: inner_lo,
                    f_lo,
                    f_hi: f_inner_lo,
                })
            }
            _ => {}
        }
        if f_lo.is_finite() {
            inner_lo = lo;
            f_inner_lo = f_lo;
        }
        if f_hi.is_finite() {
            inner_hi = hi;
            f_inner_hi = f_hi;
        }
        w *= growth;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_cubic_root() {
        let f = |x: f64| x * x * x - 2.0 * x - 5.0;
        let r = brent(f, 2.0, 3.0, f(2.0), f(3.0), RootTolerance::default()).unwrap();
        assert!((r - 2.094_551_481_542_326_5).abs() < 1e-15);
    }

    #[test]
    fn brent_rejects_unbracketed() {
        let f = |x: f64| x * x + 1.0;
        assert!(brent(f, -1.0, 1.0, f(-1.0), f(1.0), RootTolerance::default()).is_err());
    }

    #[test]
    fn brent_returns_exact_endpoint_root() {
        let f = |x: f64| x - 1.0;
        assert_eq!(brent(f, 1.0, 3.0, 0.0, 2.0, RootTolerance::default()).unwrap(), 1.0);
    }

    #[test]
    fn expansion_finds_far_root() {
        let f = |y: f64| y - 1000.0;
        let b = expand_bracket(f, 0.0, 1.0, 2.0, 1e12).unwrap();
        assert!(b.lo <= 1000.0 && 1000.0 <= b.hi);
    }

    #[test]
    fn expansion_prefers_nearest_sign_change() {
        // roots at -10 and 3: the first stage with a sign change is w = 4 on the right.
        let f = |y: f64| (y + 10.0) * (y - 3.0);
        let b = expand_bracket(f, 0.0, 1.0, 2.0, 1e6).unwrap();
        assert!(b.lo <= 3.0 && 3.0 <= b.hi);
    }

    #[test]
    fn expansion_gives_up() {
        let f = |y: f64| y * y + 1.0;
        assert!(expand_bracket(f, 0.0, 1.0, 2.0, 1e6).is_none());
    }
}
