//! Involutions defined implicitly by symmetric functions.
//!
//! If `f(x, y) = f(y, x)`, `f(0, 0) = 0`, `∂₂f` does not vanish on the
//! component Γ of `{f = 0}` through the origin, and Γ projects onto the
//! whole x-axis, then Γ is the graph of a global involution. This module
//! traces Γ numerically.
//!
//! The branch is followed by continuation from the origin over a fixed
//! lattice of anchors `x_k = ±sinh(k Δ)`. Each anchor is solved from its
//! predecessor, and an arbitrary `x` is solved from the nearest anchor
//! between it and the origin. Every evaluation therefore follows the same
//! path no matter which points were evaluated before, so results are
//! reproducible and independent of cache state or thread interleaving.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, RwLock};

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{parse_address, Params};
use crate::interval::Interval;
use crate::involution::{Involution, InvolutionMap};
use crate::root::{brent, expand_bracket, RootTolerance};

pub type BivariateFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A symmetric function `f(x, y)` on `Ω = domain × domain`.
#[derive(Clone)]
pub struct SymmetricImplicit {
    f: BivariateFn,
    df_dy: Option<BivariateFn>,
    domain: Interval,
    label: String,
}

impl std::fmt::Debug for SymmetricImplicit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymmetricImplicit")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("has_df_dy", &self.df_dy.is_some())
            .finish()
    }
}

impl SymmetricImplicit {
    /// Fails unless `|f(0, 0)| <= 1e-12`.
    pub fn new<F>(label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        let label = label.into();
        let f0 = f(0.0, 0.0);
        if !(f0.abs() <= 1e-12) {
            return Err(Error::Parameter(format!(
                "{label}: f(0, 0) = {f0}, the curve must pass through the origin"
            )));
        }
        Ok(SymmetricImplicit {
            f: Arc::new(f),
            df_dy: None,
            domain: Interval::REAL_LINE,
            label,
        })
    }

    /// Attaches `∂f/∂y`. By symmetry `∂f/∂x (x, y) = df_dy(y, x)`.
    pub fn with_df_dy<D>(mut self, df_dy: D) -> Self
    where
        D: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        self.df_dy = Some(Arc::new(df_dy));
        self
    }

    pub fn with_domain(mut self, domain: Interval) -> Result<Self> {
        if !domain.contains(0.0) {
            return Err(Error::Parameter(format!("domain {domain} must contain 0")));
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    #[inline]
    pub fn f(&self, x: f64, y: f64) -> f64 {
        (self.f)(x, y)
    }

    #[inline]
    pub fn df_dy(&self, x: f64, y: f64) -> Option<f64> {
        self.df_dy.as_ref().map(|d| d(x, y))
    }

    pub fn has_df_dy(&self) -> bool {
        self.df_dy.is_some()
    }
}

/// Knobs of the branch solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BranchSolveConfig {
    pub bracket_growth: f64,
    pub max_bracket: f64,
    pub root_atol: f64,
    pub root_rtol: f64,
    pub max_iter: usize,
}

impl Default for BranchSolveConfig {
    fn default() -> Self {
        BranchSolveConfig {
            bracket_growth: 2.0,
            max_bracket: 1e12,
            root_atol: 1e-13,
            root_rtol: 1e-13,
            max_iter: 200,
        }
    }
}

impl BranchSolveConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("max_bracket", self.max_bracket),
            ("root_atol", self.root_atol),
            ("root_rtol", self.root_rtol),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(Error::Parameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.bracket_growth > 1.0) {
            return Err(Error::Parameter(format!(
                "bracket_growth must exceed 1, got {}",
                self.bracket_growth
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::Parameter("max_iter must be positive".into()));
        }
        Ok(())
    }

    fn root_tolerance(&self) -> RootTolerance {
        RootTolerance {
            atol: self.root_atol,
            rtol: self.root_rtol,
            max_iter: self.max_iter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub max_asymmetry: f64,
    pub worst_pair: (f64, f64),
    pub samples: usize,
}

fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    r
}

/// Max of `|f(x, y) - f(y, x)|` over `n_samples` Halton points of `range²`.
pub fn verify_symmetry(s: &SymmetricImplicit, n_samples: usize, range: Interval) -> Result<SymmetryReport> {
    if n_samples == 0 {
        return Err(Error::Parameter("n_samples must be at least 1".into()));
    }
    let r = range
        .intersect(&s.domain)
        .filter(|r| r.lo.is_finite() && r.hi.is_finite())
        .ok_or_else(|| Error::Parameter(format!("symmetry range {range} must be bounded and meet the domain")))?;
    let mut report = SymmetryReport {
        max_asymmetry: 0.0,
        worst_pair: (0.0, 0.0),
        samples: n_samples,
    };
    for i in 1..=n_samples {
        let x = r.lo + (r.hi - r.lo) * radical_inverse(i, 2);
        let y = r.lo + (r.hi - r.lo) * radical_inverse(i, 3);
        let d = (s.f(x, y) - s.f(y, x)).abs();
        if d > report.max_asymmetry || d.is_nan() {
            report.max_asymmetry = d;
            report.worst_pair = (x, y);
        }
    }
    Ok(report)
}

/// A point of Γ accepted by the solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub x: f64,
    pub y: f64,
    /// `f(x, y)` at the accepted root.
    pub residual: f64,
    /// `|∇f(x, y)|`, when `∂₂f` is available.
    pub gradient_norm: Option<f64>,
}

/// Anchor spacing in `asinh(x)`.
const ANCHOR_STEP: f64 = 1.0 / 16.0;
const MAX_SUBSTEPS: usize = 100_000;

#[derive(Debug, Clone, Copy)]
struct Anchor {
    y: f64,
    slope: f64,
}

fn anchor_x(k: usize, sign: f64) -> f64 {
    sign * (k as f64 * ANCHOR_STEP).sinh()
}

/// Traces the branch of `f = 0` through the origin.
pub struct ImplicitSolver {
    s: SymmetricImplicit,
    cfg: BranchSolveConfig,
    // anchors[0] is x = +sinh(Δ), ...; index 0 of each side is k = 1.
    positive: RwLock<Vec<Anchor>>,
    negative: RwLock<Vec<Anchor>>,
    fold_warnings: AtomicUsize,
}

impl ImplicitSolver {
    /// Validates the configuration and audits the symmetry of `f`.
    pub fn new(s: SymmetricImplicit, cfg: BranchSolveConfig) -> Result<Self> {
        cfg.validate()?;
        let window = Interval { lo: -1.0, hi: 1.0 };
        let audit = verify_symmetry(&s, 64, window)?;
        let (x, y) = audit.worst_pair;
        let scale = 1.0 + s.f(x, y).abs().max(s.f(y, x).abs());
        if !(audit.max_asymmetry <= 1e-12 * scale) {
            return Err(Error::Parameter(format!(
                "{}: f is not symmetric, |f(x,y) - f(y,x)| = {:e} at ({x}, {y})",
                s.label, audit.max_asymmetry
            )));
        }
        Ok(ImplicitSolver {
            s,
            cfg,
            positive: RwLock::new(Vec::new()),
            negative: RwLock::new(Vec::new()),
            fold_warnings: AtomicUsize::new(0),
        })
    }

    pub fn implicit(&self) -> &SymmetricImplicit {
        &self.s
    }

    /// Number of accepted roots at which `∂₂f` was numerically zero.
    pub fn fold_warnings(&self) -> usize {
        self.fold_warnings.load(Ordering::Relaxed)
    }

    /// Slope of Γ at a point on it, `-∂₁f / ∂₂f`.
    fn tangent(&self, x: f64, y: f64) -> Option<f64> {
        let dy = self.s.df_dy(x, y)?;
        let dx = self.s.df_dy(y, x)?;
        let m = -dx / dy;
        m.is_finite().then_some(m)
    }

    pub fn solve(&self, x: f64) -> Result<BranchPoint> {
        self.s.domain.check(x)?;
        let y = self.solve_value(x)?;
        let residual = self.s.f(x, y);
        let gradient_norm = self.s.df_dy(x, y).zip(self.s.df_dy(y, x)).map(|(dy, dx)| dx.hypot(dy));
        Ok(BranchPoint {
            x,
            y,
            residual,
            gradient_norm,
        })
    }

    fn solve_value(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Ok(0.0);
        }
        let sign = x.signum();
        let k = (x.abs().asinh() / ANCHOR_STEP).floor() as usize;
        let (x0, start) = if k == 0 {
            (
                0.0,
                Anchor {
                    y: 0.0,
                    slope: self.tangent(0.0, 0.0).unwrap_or(-1.0),
                },
            )
        } else {
            (anchor_x(k, sign), self.anchor(k, sign)?)
        };
        if x0 == x {
            return Ok(start.y);
        }
        self.continue_to(x0, start, x).map(|a| a.y)
    }

    fn anchor(&self, k: usize, sign: f64) -> Result<Anchor> {
        let side = if sign > 0.0 { &self.positive } else { &self.negative };
        {
            let read = side.read().unwrap_or_else(|e| e.into_inner());
            if let Some(a) = read.get(k - 1) {
                return Ok(*a);
            }
        }
        let mut write = side.write().unwrap_or_else(|e| e.into_inner());
        while write.len() < k {
            let j = write.len();
            let (x0, prev) = if j == 0 {
                (
                    0.0,
                    Anchor {
                        y: 0.0,
                        slope: self.tangent(0.0, 0.0).unwrap_or(-1.0),
                    },
                )
            } else {
                (anchor_x(j, sign), write[j - 1])
            };
            let x1 = anchor_x(j + 1, sign);
            if !self.s.domain.contains(x1) {
                return Err(Error::Domain {
                    x: x1,
                    domain: self.s.domain,
                });
            }
            let next = self.continue_to(x0, prev, x1)?;
            write.push(next);
        }
        Ok(write[k - 1])
    }

    /// Follows Γ from `(x0, start.y)` to abscissa `x1`.
    ///
    /// Each substep predicts along the tangent, then looks for the root in a
    /// bracket proportional to the step. The step is halved when the bracket
    /// shows no sign change or the root lands farther than a quarter of the
    /// bracket width from the prediction.
    fn continue_to(&self, x0: f64, start: Anchor, x1: f64) -> Result<Anchor> {
        let tol = self.cfg.root_tolerance();
        let min_step = 1e-12 * (1.0 + x0.abs().max(x1.abs()));
        let full = x1 - x0;
        let mut step = full;
        let (mut xc, mut yc, mut slope) = (x0, start.y, start.slope);

        for _ in 0..MAX_SUBSTEPS {
            let remaining = x1 - xc;
            let xt = if remaining.abs() <= step.abs() { x1 } else { xc + step };
            let dx = xt - xc;
            let predicted = yc + slope * dx;
            let half = 0.5 * dx.abs() * slope.abs().max(1.0) + 10.0 * (tol.atol + tol.rtol * predicted.abs());
            let g = |y: f64| self.s.f(xt, y);
            let (lo, hi) = (predicted - half, predicted + half);
            let (f_lo, f_hi) = (g(lo), g(hi));

            let accepted = if f_lo.is_finite() && f_hi.is_finite() && f_lo.signum() != f_hi.signum() {
                let y = self.polish(xt, brent(g, lo, hi, f_lo, f_hi, tol)?, lo, hi);
                ((y - predicted).abs() <= 0.25 * (hi - lo)).then_some(y)
            } else {
                None
            };

            let y = match accepted {
                Some(y) => y,
                None if dx.abs() > min_step => {
                    step = 0.5 * dx;
                    continue;
                }
                None => self.cold_solve(xt, predicted)?,
            };

            self.check_fold(xt, y);
            slope = match self.tangent(xt, y) {
                Some(m) => m,
                None => (y - yc) / dx,
            };
            xc = xt;
            yc = y;
            if xc == x1 {
                return Ok(Anchor { y: yc, slope });
            }
            if step.abs() < full.abs() {
                step *= 2.0;
            }
        }
        Err(Error::NoConvergence {
            what: "branch continuation",
            iterations: MAX_SUBSTEPS,
        })
    }

    /// Bracket expansion from `center` with no continuation information.
    fn cold_solve(&self, x: f64, center: f64) -> Result<f64> {
        let g = |y: f64| self.s.f(x, y);
        let initial = 1e-3 * (1.0 + center.abs());
        let b = expand_bracket(g, center, initial, self.cfg.bracket_growth, self.cfg.max_bracket).ok_or(
            Error::BracketFailure {
                x,
                max_bracket: self.cfg.max_bracket,
            },
        )?;
        if b.lo == b.hi {
            return Ok(b.lo);
        }
        let y = brent(g, b.lo, b.hi, b.f_lo, b.f_hi, self.cfg.root_tolerance())?;
        Ok(self.polish(x, y, b.lo, b.hi))
    }

    /// One Newton step when `∂₂f` is known, kept only if it stays in the
    /// bracket and reduces the residual.
    fn polish(&self, x: f64, y: f64, lo: f64, hi: f64) -> f64 {
        let Some(d) = self.s.df_dy(x, y) else {
            return y;
        };
        let fy = self.s.f(x, y);
        if fy == 0.0 || d == 0.0 {
            return y;
        }
        let candidate = y - fy / d;
        if candidate >= lo && candidate <= hi && self.s.f(x, candidate).abs() < fy.abs() {
            candidate
        } else {
            y
        }
    }

    fn check_fold(&self, x: f64, y: f64) {
        let (Some(dy), Some(dx)) = (self.s.df_dy(x, y), self.s.df_dy(y, x)) else {
            return;
        };
        if dy.abs() < 1e-10 * (1.0 + dx.abs()) {
            self.fold_warnings.fetch_add(1, Ordering::Relaxed);
            warn!(
                "{}: ∂f/∂y = {dy:e} at ({x}, {y}); the branch may fold here",
                self.s.label
            );
        }
    }

    pub fn into_involution(self) -> Result<Involution> {
        let label = format!("implicit[{}]", self.s.label);
        let domain = self.s.domain;
        Involution::new(label, domain, Arc::new(self))
    }
}

impl InvolutionMap for ImplicitSolver {
    fn value(&self, x: f64) -> Result<f64> {
        self.solve_value(x)
    }

    fn derivative(&self, x: f64) -> Option<Result<f64>> {
        if !self.s.has_df_dy() {
            return None;
        }
        Some(self.solve_value(x).and_then(|y| {
            self.tangent(x, y)
                .ok_or_else(|| Error::NonFinite(format!("tangent of Γ at ({x}, {y})")))
        }))
    }
}

/// The involution whose graph is the branch of `f = 0` through the origin.
pub fn implicit_involution(s: SymmetricImplicit, cfg: BranchSolveConfig) -> Result<Involution> {
    ImplicitSolver::new(s, cfg)?.into_involution()
}

/// `x - x² + x⁵ + y - y² + y⁵`.
pub fn quintic() -> SymmetricImplicit {
    let p = |t: f64| t - t * t + t.powi(5);
    SymmetricImplicit::new("quintic", move |x, y| p(x) + p(y))
        .expect("quintic vanishes at the origin")
        .with_df_dy(|_, y| 1.0 - 2.0 * y + 5.0 * y.powi(4))
}

/// The quintic times the circle `(x-1)² + (y-1)² - 1`; same branch Γ.
pub fn quintic_circle() -> SymmetricImplicit {
    let p = |t: f64| t - t * t + t.powi(5);
    let dp = |t: f64| 1.0 - 2.0 * t + 5.0 * t.powi(4);
    let c = |x: f64, y: f64| (x - 1.0).powi(2) + (y - 1.0).powi(2) - 1.0;
    SymmetricImplicit::new("quintic-circle", move |x, y| (p(x) + p(y)) * c(x, y))
        .expect("product vanishes at the origin")
        .with_df_dy(move |x, y| dp(y) * c(x, y) + (p(x) + p(y)) * 2.0 * (y - 1.0))
}

/// `x + y + ρ(e^x + e^y - 2)`, ρ ≥ 0.
pub fn exponential(rho: f64) -> Result<SymmetricImplicit> {
    if !(rho >= 0.0) || !rho.is_finite() {
        return Err(Error::Parameter(format!("exp requires rho >= 0, got {rho}")));
    }
    Ok(SymmetricImplicit::new(format!("exp:rho={rho}"), move |x, y| {
        x + y + rho * (x.exp_m1() + y.exp_m1())
    })?
    .with_df_dy(move |_, y| 1.0 + rho * y.exp()))
}

/// `λ(x² + y²) + 2(λ + 2a²) x y + 4a(λ + a²)(x + y)`, a hyperbola with
/// vertices `(0, 0)` and `(-2a, -2a)`.
pub fn stillinger_quadratic(lambda: f64, a: f64) -> Result<SymmetricImplicit> {
    if !(lambda > 0.0) || !lambda.is_finite() || !a.is_finite() {
        return Err(Error::Parameter(format!(
            "stillinger-f requires lambda > 0 and finite a, got lambda = {lambda}, a = {a}"
        )));
    }
    let b = 2.0 * (lambda + 2.0 * a * a);
    let c = 4.0 * a * (lambda + a * a);
    Ok(
        SymmetricImplicit::new(format!("stillinger-f:lambda={lambda},a={a}"), move |x, y| {
            lambda * (x * x + y * y) + b * x * y + c * (x + y)
        })?
        .with_df_dy(move |x, y| 2.0 * lambda * y + b * x + c),
    )
}

/// `(sqrt(1 + 8e^{3βx}) - 1)(sqrt(1 + 8e^{3βy}) - 1) - 4`, β ≠ 0.
pub fn dorignac_f(beta: f64) -> Result<SymmetricImplicit> {
    if beta == 0.0 || !beta.is_finite() {
        return Err(Error::Parameter(format!("dorignac-f requires beta != 0, got {beta}")));
    }
    // sqrt(1 + u) - 1 = u / (sqrt(1 + u) + 1)
    let phi = move |t: f64| {
        let u = 8.0 * (3.0 * beta * t).exp();
        u / ((1.0 + u).sqrt() + 1.0)
    };
    let dphi = move |t: f64| {
        let e = (3.0 * beta * t).exp();
        12.0 * beta * e / (1.0 + 8.0 * e).sqrt()
    };
    Ok(
        SymmetricImplicit::new(format!("dorignac-f:beta={beta}"), move |x, y| phi(x) * phi(y) - 4.0)?
            .with_df_dy(move |x, y| phi(x) * dphi(y)),
    )
}

/// The five built-in symmetric functions at their default parameters.
pub fn catalog() -> Vec<SymmetricImplicit> {
    vec![
        quintic(),
        exponential(1.0).expect("valid"),
        quintic_circle(),
        stillinger_quadratic(1.0, 1.0).expect("valid"),
        dorignac_f(1.0).expect("valid"),
    ]
}

pub const CATALOG_NAMES: [&str; 5] = ["quintic", "quintic-circle", "exp", "stillinger-f", "dorignac-f"];

/// Looks up a catalog entry by address, e.g. `exp:rho=1` or
/// `stillinger-f:lambda=1,a=1`. Missing parameters take the defaults.
pub fn catalog_entry(address: &str) -> Result<SymmetricImplicit> {
    let (name, items) = parse_address(address)?;
    let p = Params::new(&name, items);
    match name.as_str() {
        "quintic" => {
            p.only(&[])?;
            Ok(quintic())
        }
        "quintic-circle" => {
            p.only(&[])?;
            Ok(quintic_circle())
        }
        "exp" => {
            p.only(&["rho"])?;
            exponential(p.get("rho", Some(1.0))?)
        }
        "stillinger-f" => {
            p.only(&["lambda", "a"])?;
            stillinger_quadratic(p.get("lambda", Some(1.0))?, p.get("a", Some(1.0))?)
        }
        "dorignac-f" => {
            p.only(&["beta"])?;
            dorignac_f(p.get("beta", Some(1.0))?)
        }
        other => Err(Error::Parameter(format!("unknown catalog entry '{other}'"))),
    }
}

/// Slopes `(-(λ + 2a²) ± 2a sqrt(λ + a²)) / λ` of the two asymptotes of the
/// Stillinger hyperbola, `+` first. Both are negative.
pub fn hyperbola_asymptote_slopes(lambda: f64, a: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0) || a == 0.0 || !a.is_finite() || !lambda.is_finite() {
        return Err(Error::Parameter(format!(
            "asymptotes require lambda > 0 and a != 0, got lambda = {lambda}, a = {a}"
        )));
    }
    let base = -(lambda + 2.0 * a * a);
    let spread = 2.0 * a * (lambda + a * a).sqrt();
    Ok(((base + spread) / lambda, (base - spread) / lambda))
}
