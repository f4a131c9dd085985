//! Involutions: C¹ decreasing self-maps `h` of an open interval `J ∋ 0` with
//! `h ∘ h = id`, `h(0) = 0` and `h'(0) = -1`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Interval;

/// The evaluable part of an involution. Implementors may assume `x` has
/// already been checked against the domain.
pub trait InvolutionMap: Send + Sync {
    fn value(&self, x: f64) -> Result<f64>;

    /// Analytic `h'(x)`, when the family provides one.
    fn derivative(&self, _x: f64) -> Option<Result<f64>> {
        None
    }
}

struct FnMap<F, D> {
    f: F,
    df: Option<D>,
}

impl<F, D> InvolutionMap for FnMap<F, D>
where
    F: Fn(f64) -> f64 + Send + Sync,
    D: Fn(f64) -> f64 + Send + Sync,
{
    fn value(&self, x: f64) -> Result<f64> {
        Ok((self.f)(x))
    }

    fn derivative(&self, x: f64) -> Option<Result<f64>> {
        self.df.as_ref().map(|d| Ok(d(x)))
    }
}

/// An involution `h: J -> J`. Cheap to clone; evaluation is pure and may be
/// shared across threads.
#[derive(Clone)]
pub struct Involution {
    domain: Interval,
    map: Arc<dyn InvolutionMap>,
    label: String,
}

impl fmt::Debug for Involution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Involution")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .finish()
    }
}

impl Involution {
    pub fn new(label: impl Into<String>, domain: Interval, map: Arc<dyn InvolutionMap>) -> Result<Self> {
        if !domain.contains(0.0) {
            return Err(Error::Parameter(format!("involution domain {domain} must contain 0")));
        }
        Ok(Involution {
            domain,
            map,
            label: label.into(),
        })
    }

    /// Wraps plain closures. `deriv` is the analytic derivative if known.
    pub fn from_fn<F, D>(label: impl Into<String>, domain: Interval, f: F, deriv: Option<D>) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(label, domain, Arc::new(FnMap { f, df: deriv }))
    }

    /// `h(x) = -x` on ℝ.
    pub fn negation() -> Self {
        Self::from_fn("negation", Interval::REAL_LINE, |x| -x, Some(|_| -1.0)).expect("ℝ contains 0")
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.domain.check(x)?;
        self.map.value(x)
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.map.derivative(0.0).is_some()
    }

    /// `h'(x)`: the analytic derivative when attached, otherwise a
    /// once-Richardson-extrapolated central difference.
    pub fn deriv(&self, x: f64) -> Result<f64> {
        self.domain.check(x)?;
        match self.map.derivative(x) {
            Some(d) => d,
            None => self.numeric_deriv(x),
        }
    }

    /// Central difference with step `1e-6 * max(1, |x|)`, shrunk to stay
    /// inside the domain, extrapolated once: `(4 D(h/2) - D(h)) / 3`.
    pub fn numeric_deriv(&self, x: f64) -> Result<f64> {
        self.domain.check(x)?;
        let mut step = 1e-6 * x.abs().max(1.0);
        step = step.min(0.25 * self.domain.distance_to_boundary(x));
        let d = |s: f64| -> Result<f64> { Ok((self.map.value(x + s)? - self.map.value(x - s)?) / (2.0 * s)) };
        let coarse = d(step)?;
        let fine = d(0.5 * step)?;
        Ok((4.0 * fine - coarse) / 3.0)
    }

    /// `x -> h(a x) / a`, an involution on the rescaled interval.
    pub fn homothety(&self, a: f64) -> Result<Involution> {
        if a == 0.0 || !a.is_finite() {
            return Err(Error::Parameter(format!(
                "homothety factor must be finite and nonzero, got {a}"
            )));
        }
        Involution::new(
            format!("{}∘scale({a})", self.label),
            self.domain.scaled_by_inverse(a),
            Arc::new(Homothety { inner: self.clone(), a }),
        )
    }

    /// Evaluates the numerical defects of the involution properties on `grid`.
    pub fn check(&self, grid: &[f64]) -> Result<InvolutionReport> {
        check_involution(self, grid)
    }
}

struct Homothety {
    inner: Involution,
    a: f64,
}

impl InvolutionMap for Homothety {
    fn value(&self, x: f64) -> Result<f64> {
        Ok(self.inner.eval(self.a * x)? / self.a)
    }

    fn derivative(&self, x: f64) -> Option<Result<f64>> {
        self.inner.map.derivative(self.a * x)
    }
}

/// Defect thresholds of the form `atol + rtol * |x|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DefectTolerance {
    pub atol: f64,
    pub rtol: f64,
}

impl DefectTolerance {
    pub const CLOSED_FORM: DefectTolerance = DefectTolerance { atol: 1e-9, rtol: 1e-9 };
    pub const IMPLICIT: DefectTolerance = DefectTolerance { atol: 1e-7, rtol: 1e-7 };

    pub fn bound(&self, x: f64) -> f64 {
        self.atol + self.rtol * x.abs()
    }
}

/// Result of [`check_involution`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvolutionReport {
    /// max |h(h(x)) - x| over the grid.
    pub max_identity_defect: f64,
    /// max |h(h(x)) - x| / (1 + |x|) over the grid.
    pub max_scaled_identity_defect: f64,
    /// Largest `h(x_{i+1}) - h(x_i)` over consecutive increasing grid points,
    /// clipped at zero. Zero means strictly decreasing on the grid unless
    /// `non_strict_pairs` is positive.
    pub max_monotonicity_violation: f64,
    pub non_strict_pairs: usize,
    /// |h(0)|
    pub origin_defect: f64,
    /// |h'(0) + 1|
    pub slope_defect: f64,
    /// Grid point with the largest identity defect.
    pub worst_x: f64,
}

impl InvolutionReport {
    pub fn passes(&self, tol: DefectTolerance) -> bool {
        self.max_scaled_identity_defect <= tol.atol.max(tol.rtol)
            && self.max_monotonicity_violation == 0.0
            && self.non_strict_pairs == 0
            && self.origin_defect <= tol.atol
            && self.slope_defect <= 1e-6
    }
}

pub fn check_involution(h: &Involution, grid: &[f64]) -> Result<InvolutionReport> {
    for &x in grid {
        h.domain.check(x)?;
    }
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(grid.len());
    let mut max_identity_defect = 0.0_f64;
    let mut max_scaled = 0.0_f64;
    let mut worst_x = 0.0;
    for &x in grid {
        let y = h.eval(x)?;
        let back = h.eval(y)?;
        let defect = (back - x).abs();
        if defect > max_identity_defect || defect.is_nan() {
            max_identity_defect = defect;
            worst_x = x;
        }
        max_scaled = max_scaled.max(defect / (1.0 + x.abs()));
        pts.push((x, y));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut max_monotonicity_violation = 0.0_f64;
    let mut non_strict_pairs = 0;
    for w in pts.windows(2) {
        if w[1].0 > w[0].0 {
            let rise = w[1].1 - w[0].1;
            if rise >= 0.0 {
                non_strict_pairs += 1;
                max_monotonicity_violation = max_monotonicity_violation.max(rise);
            }
        }
    }
    let origin_defect = h.eval(0.0)?.abs();
    let slope_defect = (h.deriv(0.0)? + 1.0).abs();
    Ok(InvolutionReport {
        max_identity_defect,
        max_scaled_identity_defect: max_scaled,
        max_monotonicity_violation,
        non_strict_pairs,
        origin_defect,
        slope_defect,
        worst_x,
    })
}

/// `n` Chebyshev–Lobatto points on `[lo, hi]`, increasing.
pub fn chebyshev_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    match n {
        0 => Vec::new(),
        1 => vec![mid],
        // sin form: exactly symmetric about `mid`, which is hit exactly for odd n.
        _ => (0..n)
            .map(|k| {
                let j = 2.0 * k as f64 - (n - 1) as f64;
                mid + half * (std::f64::consts::FRAC_PI_2 * j / (n - 1) as f64).sin()
            })
            .collect(),
    }
}

/// Default checking grid: 1001 Chebyshev points on `domain ∩ window`, with
/// every finite endpoint of `domain` pulled inward by 1% of the window width.
pub fn default_grid(domain: Interval, window: Interval) -> Result<Vec<f64>> {
    grid_with_points(domain, window, 1001)
}

pub fn grid_with_points(domain: Interval, window: Interval, n: usize) -> Result<Vec<f64>> {
    let w = domain
        .intersect(&window)
        .ok_or_else(|| Error::Parameter(format!("window {window} does not meet domain {domain}")))?;
    if !w.lo.is_finite() || !w.hi.is_finite() {
        return Err(Error::Parameter(format!("grid window {w} must be bounded")));
    }
    let margin = 0.01 * (w.hi - w.lo);
    let lo = if domain.lo.is_finite() && w.lo <= domain.lo {
        domain.lo + margin
    } else {
        w.lo
    };
    let hi = if domain.hi.is_finite() && w.hi >= domain.hi {
        domain.hi - margin
    } else {
        w.hi
    };
    Ok(chebyshev_points(lo, hi, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn upper_hyperbola() -> Involution {
        Involution::from_fn(
            "hyperbola",
            Interval::new(-1.0, f64::INFINITY).unwrap(),
            |x| -x / (1.0 + x),
            Some(|x: f64| -1.0 / ((1.0 + x) * (1.0 + x))),
        )
        .unwrap()
    }

    #[test]
    fn negation_evaluates() {
        assert_eq!(Involution::negation().eval(2.0).unwrap(), -2.0);
    }

    #[test]
    fn eval_rejects_points_outside_domain() {
        let h = upper_hyperbola();
        assert!(matches!(h.eval(-1.0), Err(Error::Domain { .. })));
        assert!(matches!(h.eval(-3.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn domain_must_contain_origin() {
        let r = Involution::from_fn(
            "bad",
            Interval::new(1.0, 2.0).unwrap(),
            |x| 3.0 - x,
            None::<fn(f64) -> f64>,
        );
        assert!(r.is_err());
    }

    #[test]
    fn homothety_of_negation_is_negation() {
        let h = Involution::negation().homothety(5.0).unwrap();
        assert!(h.domain().is_real_line());
        for x in [-3.0, 0.0, 0.7, 12.0] {
            assert_eq!(h.eval(x).unwrap(), -x);
        }
    }

    #[test]
    fn homothety_rescales_hyperbola() {
        let h = upper_hyperbola().homothety(2.0).unwrap();
        assert_eq!(h.domain().lo, -0.5);
        assert_eq!(h.domain().hi, f64::INFINITY);
        for x in [-0.4, 0.0, 0.3, 5.0] {
            let expect = -x / (1.0 + 2.0 * x);
            assert!((h.eval(x).unwrap() - expect).abs() < 1e-15);
        }
        let y = h.eval(0.3).unwrap();
        assert!((h.eval(y).unwrap() - 0.3).abs() < 1e-15);
        assert!((h.deriv(0.0).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn homothety_negative_factor_flips_domain() {
        let h = upper_hyperbola().homothety(-2.0).unwrap();
        assert_eq!(h.domain().lo, f64::NEG_INFINITY);
        assert_eq!(h.domain().hi, 0.5);
        let y = h.eval(0.4).unwrap();
        assert!((h.eval(y).unwrap() - 0.4).abs() < 1e-14);
    }

    #[test]
    fn homothety_rejects_zero() {
        assert!(Involution::negation().homothety(0.0).is_err());
    }

    #[test]
    fn check_negation_has_no_defects() {
        let r = check_involution(&Involution::negation(), &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(r.max_identity_defect, 0.0);
        assert_eq!(r.max_monotonicity_violation, 0.0);
        assert_eq!(r.non_strict_pairs, 0);
        assert_eq!(r.origin_defect, 0.0);
        assert_eq!(r.slope_defect, 0.0);
    }

    #[test]
    fn check_rejects_grid_outside_domain() {
        assert!(check_involution(&upper_hyperbola(), &[-2.0, 0.0]).is_err());
    }

    #[test]
    fn check_flags_increasing_map() {
        let bad = Involution::from_fn("id", Interval::REAL_LINE, |x| x, None::<fn(f64) -> f64>).unwrap();
        let r = check_involution(&bad, &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(r.max_identity_defect, 0.0);
        assert_eq!(r.non_strict_pairs, 2);
        assert!((r.slope_defect - 2.0).abs() < 1e-9);
        assert!(!r.passes(DefectTolerance::CLOSED_FORM));
    }

    #[test]
    fn numeric_derivative_matches_analytic() {
        let h = upper_hyperbola();
        for x in [-0.5, 0.0, 0.5, 3.0, 40.0] {
            let exact = h.deriv(x).unwrap();
            let approx = h.numeric_deriv(x).unwrap();
            assert!((exact - approx).abs() < 1e-8 * (1.0 + exact.abs()), "x={x}");
        }
    }

    #[test]
    fn default_grid_clips_finite_endpoint() {
        let g = default_grid(
            Interval::new(-1.0, f64::INFINITY).unwrap(),
            Interval::new(-10.0, 10.0).unwrap(),
        )
        .unwrap();
        assert_eq!(g.len(), 1001);
        assert!((g[0] - (-1.0 + 0.11)).abs() < 1e-12);
        assert_eq!(*g.last().unwrap(), 10.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
