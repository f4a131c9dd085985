//! Isochronous potentials `V(x) = (ω²/8)(x - h(x))²` built from involutions,
//! the closed forms of the shipped families, and the checks that go with
//! them.

use std::fmt;
use std::sync::Arc;

use log::{debug, warn};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{
    dorignac_involution, dorignac_log_half_phi, lambert_involution, rational_domain, rational_involution,
    stillinger_involution, FamilySpec,
};
use crate::interval::Interval;
use crate::involution::{chebyshev_points, Involution};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Printed closed forms of `V` that can be evaluated without the involution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClosedForm {
    Rational { a: f64 },
    Stillinger { lambda: f64, a: f64 },
    StillingerXiBeta { xi: f64, beta: f64 },
    Dorignac { beta: f64 },
}

impl ClosedForm {
    fn value(&self, omega: f64, x: f64) -> f64 {
        let w2 = omega * omega;
        match *self {
            ClosedForm::Rational { a } => {
                let r = (2.0 + a * x) / (1.0 + a * x);
                w2 / 8.0 * x * x * r * r
            }
            ClosedForm::Stillinger { lambda, a } => {
                let ax = a + x;
                let inner = (lambda + 2.0 * a * a) * ax - 2.0 * a * (lambda + a * a).sqrt() * lambda.sqrt().hypot(ax);
                w2 * (lambda + a * a) / (2.0 * lambda * lambda) * (lambda * a * a + ax * inner)
            }
            ClosedForm::StillingerXiBeta { xi, beta } => {
                let sb = beta.sqrt();
                let radicand = 1.0 + 2.0 * xi * sb * x + beta * x * x;
                let q = x + xi / sb * (1.0 - radicand.sqrt());
                let d = 1.0 - xi * xi;
                w2 / (2.0 * d * d) * q * q
            }
            ClosedForm::Dorignac { beta } => {
                let l = dorignac_log_half_phi(3.0 * beta * x);
                w2 / (8.0 * beta * beta) * l * l
            }
        }
    }
}

#[derive(Clone)]
enum Source {
    Involution { h: Involution, closed: Option<ClosedForm> },
    Custom { v: ScalarFn, g: ScalarFn },
}

/// A potential `V` with force `g = V'` and angular frequency `ω = sqrt(V''(0))`.
#[derive(Clone)]
pub struct Potential {
    omega: f64,
    domain: Interval,
    source: Source,
    label: String,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("label", &self.label)
            .field("omega", &self.omega)
            .field("domain", &self.domain)
            .finish()
    }
}

fn check_omega(omega: f64) -> Result<f64> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(Error::Parameter(format!(
            "omega must be finite and nonzero, got {omega}"
        )));
    }
    Ok(omega.abs())
}

impl Potential {
    /// `V = (ω²/8)(x - h(x))²` on the domain of `h`. Only `|ω|` matters.
    pub fn from_involution(h: Involution, omega: f64) -> Result<Self> {
        let omega = check_omega(omega)?;
        Ok(Potential {
            omega,
            domain: h.domain(),
            label: format!("V[{}]", h.label()),
            source: Source::Involution { h, closed: None },
        })
    }

    fn with_closed_form(h: Involution, omega: f64, closed: ClosedForm, label: String) -> Result<Self> {
        let omega = check_omega(omega)?;
        Ok(Potential {
            omega,
            domain: h.domain(),
            label,
            source: Source::Involution {
                h,
                closed: Some(closed),
            },
        })
    }

    /// An arbitrary potential with given `V` and `g`, used for control
    /// experiments; `omega` is the small-oscillation frequency.
    pub fn custom<V, G>(label: impl Into<String>, omega: f64, domain: Interval, v: V, g: G) -> Result<Self>
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let omega = check_omega(omega)?;
        if !domain.contains(0.0) {
            return Err(Error::Parameter(format!("domain {domain} must contain 0")));
        }
        Ok(Potential {
            omega,
            domain,
            label: label.into(),
            source: Source::Custom {
                v: Arc::new(v),
                g: Arc::new(g),
            },
        })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `2π/ω`
    pub fn expected_period(&self) -> f64 {
        std::f64::consts::TAU / self.omega
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn involution(&self) -> Option<&Involution> {
        match &self.source {
            Source::Involution { h, .. } => Some(h),
            Source::Custom { .. } => None,
        }
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        match &self.source {
            Source::Involution { closed, .. } => *closed,
            Source::Custom { .. } => None,
        }
    }

    /// `V(x)`, from the closed form when there is one.
    pub fn v(&self, x: f64) -> Result<f64> {
        self.domain.check(x)?;
        match &self.source {
            Source::Involution { closed: Some(c), .. } => Ok(c.value(self.omega, x)),
            Source::Involution { h, closed: None } => {
                let d = x - h.eval(x)?;
                Ok(self.omega * self.omega / 8.0 * d * d)
            }
            Source::Custom { v, .. } => Ok(v(x)),
        }
    }

    /// `(ω²/8)(x - h(x))²`, bypassing any closed form.
    pub fn v_from_involution(&self, x: f64) -> Option<Result<f64>> {
        let h = self.involution()?;
        Some(h.eval(x).map(|y| self.omega * self.omega / 8.0 * (x - y) * (x - y)))
    }

    /// `g(x) = V'(x) = (ω²/4)(x - h(x))(1 - h'(x))`.
    pub fn g(&self, x: f64) -> Result<f64> {
        self.domain.check(x)?;
        match &self.source {
            Source::Involution { h, .. } => {
                let y = h.eval(x)?;
                let dy = h.deriv(x)?;
                Ok(self.omega * self.omega / 4.0 * (x - y) * (1.0 - dy))
            }
            Source::Custom { g, .. } => Ok(g(x)),
        }
    }

    /// `sign(x) sqrt(V(x))`, a monotone coordinate that is linear at 0.
    /// Computed from the involution as `ω (x - h(x)) / (2√2)` when possible.
    pub fn signed_sqrt_v(&self, x: f64) -> Result<f64> {
        self.domain.check(x)?;
        match &self.source {
            Source::Involution { h, .. } => Ok(self.omega * (x - h.eval(x)?) / (2.0 * std::f64::consts::SQRT_2)),
            Source::Custom { v, .. } => Ok(v(x).max(0.0).sqrt().copysign(x)),
        }
    }

    /// `V` as used for local derivative estimates: the involution form when
    /// available, because it keeps full relative accuracy near 0.
    fn v_local(&self, x: f64) -> Result<f64> {
        match self.v_from_involution(x) {
            Some(v) => v,
            None => self.v(x),
        }
    }
}

/// `V(x) = ω²x²/2` on ℝ.
pub fn harmonic(omega: f64) -> Result<Potential> {
    let mut p = Potential::from_involution(Involution::negation(), omega)?;
    p.label = format!("harmonic(omega={})", p.omega);
    Ok(p)
}

/// `V(x) = x²/2 + x⁴`: a global center that is not isochronous.
pub fn quartic_control() -> Potential {
    Potential::custom(
        "quartic-control",
        1.0,
        Interval::REAL_LINE,
        |x| 0.5 * x * x + x.powi(4),
        |x| x + 4.0 * x.powi(3),
    )
    .expect("valid control")
}

pub fn rational_potential(a: f64, omega: f64) -> Result<Potential> {
    let h = rational_involution(a)?;
    debug_assert_eq!(h.domain(), rational_domain(a));
    Potential::with_closed_form(h, omega, ClosedForm::Rational { a }, format!("rational(a={a})"))
}

pub fn stillinger_potential(lambda: f64, a: f64, omega: f64) -> Result<Potential> {
    let h = stillinger_involution(lambda, a)?;
    Potential::with_closed_form(
        h,
        omega,
        ClosedForm::Stillinger { lambda, a },
        format!("stillinger(lambda={lambda}, a={a})"),
    )
}

/// The Stillinger potential in the `(ξ, β)` parameters, `λ = (1 - ξ²)/β`,
/// `a = ξ/√β`.
pub fn stillinger_xi_beta(xi: f64, beta: f64, omega: f64) -> Result<Potential> {
    if !(xi.abs() < 1.0) {
        return Err(Error::Parameter(format!("xi must lie in (-1, 1), got {xi}")));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Parameter(format!("beta must be positive, got {beta}")));
    }
    let (lambda, a) = xi_beta_to_lambda_a(xi, beta);
    let h = stillinger_involution(lambda, a)?;
    Potential::with_closed_form(
        h,
        omega,
        ClosedForm::StillingerXiBeta { xi, beta },
        format!("stillinger(xi={xi}, beta={beta})"),
    )
}

pub fn xi_beta_to_lambda_a(xi: f64, beta: f64) -> (f64, f64) {
    ((1.0 - xi * xi) / beta, xi / beta.sqrt())
}

pub fn dorignac_potential(beta: f64, omega: f64) -> Result<Potential> {
    let h = dorignac_involution(beta)?;
    Potential::with_closed_form(
        h,
        omega,
        ClosedForm::Dorignac { beta },
        format!("dorignac(beta={beta})"),
    )
}

/// The Lambert family has no printed closed form for `V`.
pub fn lambert_potential(rho: f64, a: f64, omega: f64) -> Result<Potential> {
    let mut p = Potential::from_involution(lambert_involution(rho, a)?, omega)?;
    p.label = format!("lambert(rho={rho}, a={a})");
    Ok(p)
}

/// Potential of a closed-form family, with its printed `V` where one exists.
pub fn family_potential(spec: &FamilySpec, omega: f64) -> Result<Potential> {
    match *spec {
        FamilySpec::Rational { a } => rational_potential(a, omega),
        FamilySpec::Stillinger { lambda, a } => stillinger_potential(lambda, a, omega),
        FamilySpec::Dorignac { beta } => dorignac_potential(beta, omega),
        FamilySpec::LambertExp { rho, a } => lambert_potential(rho, a, omega),
    }
}

/// The printed Stillinger force law
/// `g(x) = ω²(λ+a²)^{3/2}/λ² ((a+x)(λ+2a²)/sqrt(λ+a²) - a(λ+2(a+x)²)/sqrt(λ+(a+x)²))`.
pub fn stillinger_force(lambda: f64, a: f64, omega: f64, x: f64) -> f64 {
    let s0 = (lambda + a * a).sqrt();
    let ax = a + x;
    omega * omega * s0.powi(3) / (lambda * lambda)
        * (ax * (lambda + 2.0 * a * a) / s0 - a * (lambda + 2.0 * ax * ax) / lambda.sqrt().hypot(ax))
}

/// The force law
/// `g(x) = 2cω²/(b²-4c)² ((b²+4c)(b+2x) + b(b²-4c-2(b+2x)²)/sqrt(1 + x(b+x)/c))`,
/// defined on all of ℝ exactly when `b² - 4c < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GCmp {
    pub omega: f64,
    pub b: f64,
    pub c: f64,
}

pub fn g_cmp(omega: f64, b: f64, c: f64) -> Result<GCmp> {
    let omega = check_omega(omega)?;
    if c == 0.0 || !c.is_finite() || !b.is_finite() {
        return Err(Error::Parameter(format!(
            "g_cmp requires finite b and c != 0, got b = {b}, c = {c}"
        )));
    }
    let disc = b * b - 4.0 * c;
    if !(disc < 0.0) {
        return Err(Error::Parameter(format!(
            "g_cmp is global only when b² - 4c < 0, got b² - 4c = {disc}"
        )));
    }
    Ok(GCmp { omega, b, c })
}

impl GCmp {
    pub fn g(&self, x: f64) -> f64 {
        let GCmp { omega, b, c } = *self;
        let disc = b * b - 4.0 * c;
        let s = b + 2.0 * x;
        let root = (1.0 + x * (b + x) / c).sqrt();
        2.0 * c * omega * omega / (disc * disc) * ((b * b + 4.0 * c) * s + b * (disc - 2.0 * s * s) / root)
    }

    /// Stillinger parameters with the same force law:
    /// `λ = c - b²/4 = (4c - b²)/4`, `a = b/2`.
    pub fn stillinger_parameters(&self) -> (f64, f64) {
        (self.c - 0.25 * self.b * self.b, 0.5 * self.b)
    }
}

/// Result of [`check_global_inequality`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    /// min over the grid of `V(x) - ω²x²/8`.
    pub min_margin: f64,
    pub argmin: f64,
    /// Points with margin below `-1e-12 (1 + x²)`, as `(x, margin)`.
    pub violations: Vec<(f64, f64)>,
}

impl InequalityReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `V(x) - (ω²/8) x²`
pub fn inequality_margin(p: &Potential, x: f64) -> Result<f64> {
    Ok(p.v(x)? - p.omega * p.omega / 8.0 * x * x)
}

pub fn check_global_inequality(p: &Potential, grid: &[f64]) -> Result<InequalityReport> {
    let mut report = InequalityReport {
        min_margin: f64::INFINITY,
        argmin: f64::NAN,
        violations: Vec::new(),
    };
    for &x in grid {
        let m = inequality_margin(p, x)?;
        if m < report.min_margin {
            report.min_margin = m;
            report.argmin = x;
        }
        if m < -1e-12 * (1.0 + x * x) || m.is_nan() {
            report.violations.push((x, m));
        }
    }
    Ok(report)
}

/// Result of [`check_necessary_conditions`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NecessaryReport {
    /// `V''(0), V'''(0), V⁽⁴⁾(0), V⁽⁵⁾(0), V⁽⁶⁾(0)`
    pub derivatives: [f64; 5],
    /// `|V⁽⁴⁾ - 5 V'''² / (3 V'')|`
    pub v4_residual: f64,
    /// `|V⁽⁶⁾ - 7 V''' V⁽⁵⁾ / V'' + 140 V'''⁴ / (9 V''³)|`
    pub v6_residual: f64,
    /// `v4_residual / max(1, |V⁽⁴⁾|)`
    pub v4_normalized: f64,
    /// `v6_residual / max(1, |V⁽⁶⁾|)`
    pub v6_normalized: f64,
    /// Half-width of the fitting window.
    pub window: f64,
    /// Max misfit of the polynomial on the fitting nodes.
    pub fit_residual: f64,
    pub well_conditioned: bool,
}

impl NecessaryReport {
    pub const THRESHOLD: f64 = 1e-4;

    pub fn passes(&self) -> bool {
        self.v4_normalized < Self::THRESHOLD && self.v6_normalized < Self::THRESHOLD
    }
}

const FIT_DEGREE: usize = 8;
const FIT_NODES: usize = 33;

/// Fits a degree-8 polynomial to `V` on 33 Chebyshev nodes of `[-r, r]`,
/// reads off `V''(0) … V⁽⁶⁾(0)`, and evaluates the two local identities
/// every isochronous potential obeys.
///
/// The window starts at `r₀ = 0.01 · scale(J)` and doubles up to
/// [`WINDOW_RUNGS`] times while staying within a quarter of the distance
/// to the domain boundary. Small windows amplify rounding in `V`
/// (roughly `ε / r⁴` in `V⁽⁶⁾`), large ones pick up truncation error from
/// the neglected Taylor terms. The rung whose derivative estimates agree
/// best with both neighbours is reported.
pub fn check_necessary_conditions(p: &Potential) -> Result<NecessaryReport> {
    let r0 = 1e-2 * p.domain.scale();
    let cap = 0.25 * p.domain.distance_to_boundary(0.0);
    let mut rungs = Vec::new();
    let mut r = r0;
    while rungs.len() < WINDOW_RUNGS && (rungs.is_empty() || r <= cap) {
        rungs.push(fit_window(p, r)?);
        r *= 2.0;
    }
    let disagreement = |a: &NecessaryReport, b: &NecessaryReport| {
        let [_, _, a4, _, a6] = a.derivatives;
        let [_, _, b4, _, b6] = b.derivatives;
        ((a4 - b4).abs() / a4.abs().max(1.0)).max((a6 - b6).abs() / a6.abs().max(1.0))
    };
    let n = rungs.len();
    let mut best = 0;
    let mut best_score = f64::INFINITY;
    for k in 0..n {
        let below = if k > 0 {
            disagreement(&rungs[k], &rungs[k - 1])
        } else {
            0.0
        };
        let above = if k + 1 < n {
            disagreement(&rungs[k], &rungs[k + 1])
        } else {
            0.0
        };
        let score = if n == 1 { 0.0 } else { below.max(above) };
        if score < best_score {
            best = k;
            best_score = score;
        }
    }
    debug!(
        "{}: necessary-condition window r = {:e} (score {best_score:e})",
        p.label, rungs[best].window
    );
    Ok(warn_if_ill_conditioned(p, rungs.swap_remove(best)))
}

/// Number of window sizes tried by [`check_necessary_conditions`].
pub const WINDOW_RUNGS: usize = 6;

/// [`check_necessary_conditions`] on the window `[-r, r]`.
pub fn check_necessary_conditions_at(p: &Potential, r: f64) -> Result<NecessaryReport> {
    Ok(warn_if_ill_conditioned(p, fit_window(p, r)?))
}

fn warn_if_ill_conditioned(p: &Potential, report: NecessaryReport) -> NecessaryReport {
    if !report.well_conditioned {
        warn!(
            "{}: derivative fit residual {:e} on window {:e} is not small against the scale of V",
            p.label, report.fit_residual, report.window
        );
    }
    report
}

fn fit_window(p: &Potential, r: f64) -> Result<NecessaryReport> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Parameter(format!("fit window radius must be positive, got {r}")));
    }
    let t = chebyshev_points(-1.0, 1.0, FIT_NODES);
    let values = t.iter().map(|&ti| p.v_local(r * ti)).collect::<Result<Vec<f64>>>()?;

    // Fit in the Chebyshev basis, which is far better conditioned than the
    // monomials, then convert.
    let a = DMatrix::from_fn(FIT_NODES, FIT_DEGREE + 1, |i, k| (k as f64 * t[i].acos()).cos());
    let b = DVector::from_vec(values.clone());
    let cheb = a
        .clone()
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::NonFinite(format!("least-squares fit failed: {e}")))?;
    let fitted = &a * &cheb;
    let coeffs = chebyshev_to_monomial(cheb.as_slice());
    let fit_residual = fitted
        .iter()
        .zip(values.iter())
        .map(|(f, v)| (f - v).abs())
        .fold(0.0, f64::max);
    let v_scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let well_conditioned = fit_residual <= 1e-10 * v_scale.max(f64::MIN_POSITIVE);

    let mut d = [0.0; 5];
    let mut factorial = 1.0;
    for k in 1..=6 {
        factorial *= k as f64;
        if k >= 2 {
            d[k - 2] = coeffs[k] * factorial / r.powi(k as i32);
        }
    }
    let [v2, v3, v4, v5, v6] = d;
    let v4_residual = (v4 - 5.0 * v3 * v3 / (3.0 * v2)).abs();
    let v6_residual = (v6 - 7.0 * v3 * v5 / v2 + 140.0 * v3.powi(4) / (9.0 * v2.powi(3))).abs();
    Ok(NecessaryReport {
        derivatives: d,
        v4_residual,
        v6_residual,
        v4_normalized: v4_residual / v4.abs().max(1.0),
        v6_normalized: v6_residual / v6.abs().max(1.0),
        window: r,
        fit_residual,
        well_conditioned,
    })
}

/// Monomial coefficients of `Σ c_k T_k(t)`.
fn chebyshev_to_monomial(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    let mut out = vec![0.0; n];
    // T_{k-1} and T_k as monomial coefficient vectors; all entries are exact integers.
    let mut prev = vec![0.0; n];
    let mut cur = vec![0.0; n];
    prev[0] = 1.0;
    if n > 1 {
        cur[1] = 1.0;
    }
    for (k, &ck) in c.iter().enumerate() {
        let tk = if k == 0 { &prev } else { &cur };
        for (o, &m) in out.iter_mut().zip(tk.iter()) {
            *o += ck * m;
        }
        if k >= 1 && k + 1 < n {
            let mut next = vec![0.0; n];
            for j in 0..n {
                let shifted = if j > 0 { 2.0 * cur[j - 1] } else { 0.0 };
                next[j] = shifted - prev[j];
            }
            prev = std::mem::replace(&mut cur, next);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::involution::grid_with_points;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn chebyshev_conversion() {
        let mut c = [0.0; 9];
        c[8] = 1.0;
        assert_eq!(
            chebyshev_to_monomial(&c),
            vec![1.0, 0.0, -32.0, 0.0, 160.0, 0.0, -256.0, 0.0, 128.0]
        );
        assert_eq!(chebyshev_to_monomial(&[2.0, 3.0, 1.0]), vec![1.0, 3.0, 2.0]);
    }

    #[test]
    fn harmonic_values() {
        let p = harmonic(1.0).unwrap();
        assert_eq!(p.v(2.0).unwrap(), 2.0);
        let p = harmonic(2.0).unwrap();
        assert_eq!(p.g(3.0).unwrap(), 12.0);
        assert_eq!(p.expected_period(), std::f64::consts::PI);
    }

    #[test]
    fn omega_sign_is_normalized() {
        let p = harmonic(-3.0).unwrap();
        assert_eq!(p.omega(), 3.0);
        assert!(harmonic(0.0).is_err());
    }

    #[test]
    fn rational_closed_form_and_involution_agree() {
        let p = rational_potential(1.0, 1.0).unwrap();
        assert!(close(p.v(1.0).unwrap(), 9.0 / 32.0, 1e-16));
        assert!(close(p.v_from_involution(1.0).unwrap().unwrap(), 9.0 / 32.0, 1e-16));
        let p0 = rational_potential(0.0, 1.5).unwrap();
        assert!(p0.domain().is_real_line());
        assert!(close(p0.v(2.0).unwrap(), 1.5 * 1.5 * 2.0, 1e-15));
        let pn = rational_potential(-1.0, 1.0).unwrap();
        assert_eq!(
            pn.domain(),
            Interval {
                lo: f64::NEG_INFINITY,
                hi: 1.0
            }
        );
        assert!(matches!(pn.v(1.0), Err(Error::Domain { .. })));
        assert!(matches!(pn.g(2.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn rational_force_matches_finite_difference() {
        let p = rational_potential(1.0, 1.0).unwrap();
        for x in [-0.8, -0.3, 0.2, 1.0, 5.0] {
            let h = 1e-5;
            let fd = (p.v(x + h).unwrap() - p.v(x - h).unwrap()) / (2.0 * h);
            let g = p.g(x).unwrap();
            assert!(close(g, fd, 1e-7 * (1.0 + g.abs())), "x={x}: {g} vs {fd}");
        }
    }

    #[test]
    fn stillinger_dual_paths() {
        let p = stillinger_potential(1.0, 1.0, 1.0).unwrap();
        let v = p.v(1.0).unwrap();
        let expect = (8.0 - 2.0 * 10f64.sqrt()).powi(2) / 8.0;
        assert!(close(v, expect, 1e-12), "{v} vs {expect}");
        assert!(close(v, 0.350_889, 1e-6));
        assert!(close(p.v_from_involution(1.0).unwrap().unwrap(), v, 1e-12));
        assert!(close(p.v(0.0).unwrap(), 0.0, 1e-15));
        let p0 = stillinger_potential(3.0, 0.0, 2.0).unwrap();
        assert!(close(p0.v(1.5).unwrap(), 4.5, 1e-14));
        assert!(stillinger_potential(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn stillinger_force_closed_form_matches_involution_route() {
        let p = stillinger_potential(1.0, 1.0, 1.0).unwrap();
        for x in chebyshev_points(-20.0, 20.0, 101) {
            let a = p.g(x).unwrap();
            let b = stillinger_force(1.0, 1.0, 1.0, x);
            assert!(close(a, b, 1e-9 * (1.0 + b.abs())), "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn xi_beta_form() {
        let p = stillinger_xi_beta(0.0, 2.0, 1.0).unwrap();
        assert!(close(p.v(3.0).unwrap(), 4.5, 1e-14));
        let q = stillinger_xi_beta(0.5, 1.0, 1.0).unwrap();
        assert_eq!(q.v(0.0).unwrap(), 0.0);
        let r = stillinger_potential(0.75, 0.5, 1.0).unwrap();
        for x in chebyshev_points(-10.0, 10.0, 101) {
            assert!(close(q.v(x).unwrap(), r.v(x).unwrap(), 1e-11 * (1.0 + r.v(x).unwrap())));
        }
        assert!(stillinger_xi_beta(1.0, 1.0, 1.0).is_err());
        assert!(stillinger_xi_beta(0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn gcmp_examples() {
        let g = g_cmp(1.0, 0.0, 1.0).unwrap();
        for x in [-2.0, 0.5, 3.0] {
            assert!(close(g.g(x), x, 1e-15));
        }
        for (b, c, lambda, a) in [(2.0, 2.0, 1.0, 1.0), (2.0, 1.25, 0.25, 1.0), (-1.0, 3.0, 2.75, -0.5)] {
            let g = g_cmp(1.0, b, c).unwrap();
            assert_eq!(g.stillinger_parameters(), (lambda, a));
            assert!(close(g.g(0.0), 0.0, 1e-15));
            for x in chebyshev_points(-10.0, 10.0, 101) {
                let s = stillinger_force(lambda, a, 1.0, x);
                assert!(close(g.g(x), s, 1e-10 * (1.0 + s.abs())), "b={b} c={c} x={x}");
            }
        }
        assert!(g_cmp(1.0, 2.0, 1.0).is_err());
        assert!(g_cmp(1.0, 1.0, 0.0).is_err());
        assert!(g_cmp(1.0, 3.0, -1.0).is_err());
    }

    #[test]
    fn dorignac_dual_paths() {
        let p = dorignac_potential(1.0, 1.0).unwrap();
        assert_eq!(p.v(0.0).unwrap(), 0.0);
        let h = dorignac_involution(1.0).unwrap();
        let via_h = (1.0 - h.eval(1.0).unwrap()).powi(2) / 8.0;
        assert!(close(p.v(1.0).unwrap(), via_h, 1e-12));
        for x in [-1.0, 1.0, -5.0, 5.0, -20.0, 20.0] {
            assert!(p.v(x).unwrap() >= x * x / 8.0);
        }
        for x in [-400.0, -30.0, -1.5, 1e-9, 0.9, 250.0, 1000.0] {
            let a = p.v(x).unwrap();
            let b = p.v_from_involution(x).unwrap().unwrap();
            assert!(close(a, b, 1e-11 * (1.0 + b)), "x={x}: {a} vs {b}");
        }
    }

    #[test]
    fn inequality_checks() {
        let p = harmonic(1.0).unwrap();
        let r = check_global_inequality(&p, &[-2.0, 0.0, 1.0]).unwrap();
        assert_eq!(r.min_margin, 0.0);
        assert!(r.passes());
        let broken = Potential::custom("x²/16", 1.0, Interval::REAL_LINE, |x| x * x / 16.0, |x| x / 8.0).unwrap();
        let r = check_global_inequality(&broken, &[-1.0, 0.0, 0.5]).unwrap();
        assert_eq!(r.violations.len(), 2);
        assert!(!r.passes());
    }

    #[test]
    fn families_satisfy_inequality() {
        let window = Interval { lo: -10.0, hi: 10.0 };
        for spec in FamilySpec::defaults() {
            let p = family_potential(&spec, 1.0).unwrap();
            let grid = grid_with_points(p.domain(), window, 1001).unwrap();
            let r = check_global_inequality(&p, &grid).unwrap();
            assert!(r.passes(), "{spec}: {r:?}");
        }
    }

    #[test]
    fn fixed_small_window_is_noise_limited() {
        // At r = 0.01 rounding of V (~ε V(r)) reaches V⁽⁶⁾ as ~720 · 256 · ε V(r) / r⁶.
        let p = stillinger_potential(2.0, -1.0, 2.0).unwrap();
        let fixed = check_necessary_conditions_at(&p, 0.01).unwrap();
        let chosen = check_necessary_conditions(&p).unwrap();
        assert!(fixed.v6_normalized > 1e-4, "{fixed:?}");
        assert!(chosen.passes() && chosen.window > 0.01, "{chosen:?}");
    }

    #[test]
    fn necessary_conditions_harmonic_and_rational() {
        let r = check_necessary_conditions(&harmonic(1.0).unwrap()).unwrap();
        assert!(r.v4_residual < 1e-8 && r.v6_residual < 1e-8, "{r:?}");
        assert!(close(r.derivatives[0], 1.0, 1e-6));
        let r = check_necessary_conditions(&rational_potential(1.0, 1.0).unwrap()).unwrap();
        assert!(r.passes(), "{r:?}");
        assert!(close(r.derivatives[0], 1.0, 1e-6));
    }

    #[test]
    fn necessary_conditions_flag_quartic() {
        let r = check_necessary_conditions(&quartic_control()).unwrap();
        assert!(close(r.derivatives[2], 24.0, 1e-4), "{r:?}");
        assert!(r.v4_residual > 1.0);
        assert!(!r.passes());
    }
}
