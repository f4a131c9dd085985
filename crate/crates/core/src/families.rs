//! Closed-form involution families.
//!
//! * rational: `h(x) = -x / (1 + a x)`, the only rational involutions;
//! * Stillinger: the branch through the origin of a symmetric hyperbola;
//! * Dorignac: `h(x) = β⁻¹ ln(2 e^{βx} / (sqrt(1 + 8 e^{3βx}) - 1))`;
//! * Lambert: `h(x) = -x + (ρ/a)(2 - e^{ax}) - a⁻¹ W₀(ρ e^{-ax + ρ(2 - e^{ax})})`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::involution::{Involution, InvolutionMap};
use crate::lambert::{lambert_w0, lambert_w0_exp};

/// A closed-form family together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilySpec {
    Rational {
        a: f64,
    },
    Stillinger {
        lambda: f64,
        a: f64,
    },
    Dorignac {
        beta: f64,
    },
    #[serde(rename = "lambert", alias = "lambertexp", alias = "lambert-exp")]
    LambertExp {
        rho: f64,
        a: f64,
    },
}

impl FamilySpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{name} must be finite, got {v}")))
            }
        };
        match *self {
            FamilySpec::Rational { a } => finite("a", a),
            FamilySpec::Stillinger { lambda, a } => {
                finite("lambda", lambda)?;
                finite("a", a)?;
                if lambda <= 0.0 {
                    return Err(Error::Parameter(format!(
                        "stillinger requires lambda > 0, got {lambda}"
                    )));
                }
                Ok(())
            }
            FamilySpec::Dorignac { beta } => {
                finite("beta", beta)?;
                if beta == 0.0 {
                    return Err(Error::Parameter("dorignac requires beta != 0".into()));
                }
                Ok(())
            }
            FamilySpec::LambertExp { rho, a } => {
                finite("rho", rho)?;
                finite("a", a)?;
                if rho < 0.0 {
                    return Err(Error::Parameter(format!("lambert requires rho >= 0, got {rho}")));
                }
                if a == 0.0 {
                    return Err(Error::Parameter("lambert requires a != 0".into()));
                }
                Ok(())
            }
        }
    }

    pub fn involution(&self) -> Result<Involution> {
        match *self {
            FamilySpec::Rational { a } => rational_involution(a),
            FamilySpec::Stillinger { lambda, a } => stillinger_involution(lambda, a),
            FamilySpec::Dorignac { beta } => dorignac_involution(beta),
            FamilySpec::LambertExp { rho, a } => lambert_involution(rho, a),
        }
    }

    /// Parameters the acceptance checks use when none are given.
    pub fn defaults() -> [FamilySpec; 4] {
        [
            FamilySpec::Rational { a: 1.0 },
            FamilySpec::Stillinger { lambda: 1.0, a: 1.0 },
            FamilySpec::Dorignac { beta: 1.0 },
            FamilySpec::LambertExp { rho: 1.0, a: 1.0 },
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Rational { .. } => "rational",
            FamilySpec::Stillinger { .. } => "stillinger",
            FamilySpec::Dorignac { .. } => "dorignac",
            FamilySpec::LambertExp { .. } => "lambert",
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            FamilySpec::Rational { a } => write!(f, "rational:a={a}"),
            FamilySpec::Stillinger { lambda, a } => write!(f, "stillinger:lambda={lambda},a={a}"),
            FamilySpec::Dorignac { beta } => write!(f, "dorignac:beta={beta}"),
            FamilySpec::LambertExp { rho, a } => write!(f, "lambert:rho={rho},a={a}"),
        }
    }
}

/// Splits `name[:key=val,...]` into a lowercase name and key/value pairs.
pub fn parse_address(s: &str) -> Result<(String, Vec<(String, f64)>)> {
    let s = s.trim();
    let (name, rest) = match s.split_once(':') {
        Some((n, r)) => (n, r),
        None => (s, ""),
    };
    let mut params = Vec::new();
    for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Parameter(format!("expected key=value, got '{item}'")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("parameter {k} has non-numeric value '{v}'")))?;
        params.push((k.trim().to_ascii_lowercase(), v));
    }
    Ok((name.to_ascii_lowercase(), params))
}

pub(crate) struct Params {
    family: String,
    items: Vec<(String, f64)>,
}

impl Params {
    pub(crate) fn new(family: &str, items: Vec<(String, f64)>) -> Self {
        Params {
            family: family.to_string(),
            items,
        }
    }

    pub(crate) fn get(&self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.items.iter().find(|(k, _)| k == key) {
            Some(&(_, v)) => Ok(v),
            None => default.ok_or_else(|| Error::Parameter(format!("{} requires parameter '{key}'", self.family))),
        }
    }

    pub(crate) fn only(&self, allowed: &[&str]) -> Result<()> {
        match self.items.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, _)) => Err(Error::Parameter(format!(
                "unknown parameter '{k}' for {} (expected {})",
                self.family,
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, items) = parse_address(s)?;
        let p = Params::new(&name, items);
        let spec = match name.as_str() {
            "rational" => {
                p.only(&["a"])?;
                FamilySpec::Rational {
                    a: p.get("a", Some(1.0))?,
                }
            }
            "stillinger" => {
                p.only(&["lambda", "a"])?;
                FamilySpec::Stillinger {
                    lambda: p.get("lambda", Some(1.0))?,
                    a: p.get("a", Some(1.0))?,
                }
            }
            "dorignac" => {
                p.only(&["beta"])?;
                FamilySpec::Dorignac {
                    beta: p.get("beta", Some(1.0))?,
                }
            }
            "lambert" | "lambertexp" | "lambert-exp" => {
                p.only(&["rho", "a"])?;
                FamilySpec::LambertExp {
                    rho: p.get("rho", Some(1.0))?,
                    a: p.get("a", Some(1.0))?,
                }
            }
            other => return Err(Error::Parameter(format!("unknown family '{other}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Domain `J` of the rational family.
pub fn rational_domain(a: f64) -> Interval {
    if a > 0.0 {
        Interval {
            lo: -1.0 / a,
            hi: f64::INFINITY,
        }
    } else if a < 0.0 {
        Interval {
            lo: f64::NEG_INFINITY,
            hi: -1.0 / a,
        }
    } else {
        Interval::REAL_LINE
    }
}

struct Rational {
    a: f64,
}

impl InvolutionMap for Rational {
    fn value(&self, x: f64) -> Result<f64> {
        Ok(-x / (1.0 + self.a * x))
    }

    fn derivative(&self, x: f64) -> Option<Result<f64>> {
        let d = 1.0 + self.a * x;
        Some(Ok(-1.0 / (d * d)))
    }
}

pub fn rational_involution(a: f64) -> Result<Involution> {
    FamilySpec::Rational { a }.validate()?;
    Involution::new(format!("rational(a={a})"), rational_domain(a), Arc::new(Rational { a }))
}

struct Stillinger {
    lambda: f64,
    a: f64,
    /// sqrt(λ + a²)
    s0: f64,
}

impl Stillinger {
    fn radius(&self, x: f64) -> f64 {
        self.lambda.sqrt().hypot(self.a + x)
    }
}

impl InvolutionMap for Stillinger {
    // The closed form minus its (zero) value at the origin, so that the
    // constant terms cancel analytically instead of in floating point.
    fn value(&self, x: f64) -> Result<f64> {
        let Stillinger { lambda, a, s0 } = *self;
        let ratio = (2.0 * a + x) / (self.radius(x) + s0);
        Ok(-(x / lambda) * ((lambda + 2.0 * a * a) - 2.0 * a * s0 * ratio))
    }

    fn derivative(&self, x: f64) -> Option<Result<f64>> {
        let Stillinger { lambda, a, s0 } = *self;
        let d = -((lambda + 2.0 * a * a) - 2.0 * a * s0 * (a + x) / self.radius(x)) / lambda;
        Some(Ok(d))
    }
}

pub fn stillinger_involution(lambda: f64, a: f64) -> Result<Involution> {
    FamilySpec::Stillinger { lambda, a }.validate()?;
    Involution::new(
        format!("stillinger(lambda={lambda}, a={a})"),
        Interval::REAL_LINE,
        Arc::new(Stillinger {
            lambda,
            a,
            s0: (lambda + a * a).sqrt(),
        }),
    )
}

/// `ln((sqrt(1 + 8e^t) - 1) / 2)`, with full relative accuracy near
/// `t = 0` where it vanishes, and no overflow for large `|t|`.
pub(crate) fn dorignac_log_half_phi(t: f64) -> f64 {
    use std::f64::consts::LN_2;
    let ln_u = 8f64.ln() + t;
    if t < -1.0 {
        let u = ln_u.exp();
        ln_u - (1.0 + (1.0 + u).sqrt()).ln() - LN_2
    } else if t < 600.0 {
        // φ/2 - 1 = 8(e^t - 1) / (2 (sqrt(1 + 8e^t) + 3))
        let u = 8.0 * t.exp();
        (8.0 * t.exp_m1() / (2.0 * ((1.0 + u).sqrt() + 3.0))).ln_1p()
    } else {
        0.5 * ln_u - (-0.5 * ln_u).exp().asinh() - LN_2
    }
}

struct Dorignac {
    beta: f64,
}

impl InvolutionMap for Dorignac {
    fn value(&self, x: f64) -> Result<f64> {
        let b = self.beta;
        Ok(x - dorignac_log_half_phi(3.0 * b * x) / b)
    }

    fn derivative(&self, x: f64) -> Option<Result<f64>> {
        let e = (3.0 * self.beta * x).exp();
        Some(Ok(1.0 - 1.5 * (1.0 + 1.0 / (1.0 + 8.0 * e).sqrt())))
    }
}

pub fn dorignac_involution(beta: f64) -> Result<Involution> {
    FamilySpec::Dorignac { beta }.validate()?;
    Involution::new(
        format!("dorignac(beta={beta})"),
        Interval::REAL_LINE,
        Arc::new(Dorignac { beta }),
    )
}

struct LambertExp {
    rho: f64,
    a: f64,
}

impl LambertExp {
    /// `t + ρ(e^t - 1)`, increasing.
    fn f(&self, t: f64) -> f64 {
        t + self.rho * t.exp_m1()
    }

    /// `s = a h(x)`, the solution of `F(s) = -F(ax)`.
    fn scaled_value(&self, x: f64) -> Result<f64> {
        let LambertExp { rho, a } = *self;
        let ax = a * x;
        // Closed form: s = ln W₀(ρ e^z) - ln ρ with z = ρ - F(ax), and
        // z - w = ln(w / ρ) on the solution.
        let z = -ax + rho * (2.0 - ax.exp());
        let log_arg = rho.ln() + z;
        let mut s = if log_arg < -20.0 {
            z - lambert_w0(log_arg.exp())?
        } else {
            lambert_w0_exp(log_arg)?.ln() - rho.ln()
        };
        // Newton on F(s) = -F(ax) restores relative accuracy near the origin,
        // where the closed form loses digits to cancellation.
        let target = -self.f(ax);
        if target.is_finite() && s.is_finite() {
            for _ in 0..4 {
                let step = (self.f(s) - target) / (1.0 + rho * s.exp());
                if !step.is_finite() {
                    break;
                }
                s -= step;
                if step.abs() <= f64::EPSILON * s.abs() {
                    break;
                }
            }
        }
        Ok(s)
    }
}

impl InvolutionMap for LambertExp {
    fn value(&self, x: f64) -> Result<f64> {
        if self.rho == 0.0 {
            return Ok(-x);
        }
        Ok(self.scaled_value(x)? / self.a)
    }

    fn derivative(&self, x: f64) -> Option<Result<f64>> {
        let LambertExp { rho, a } = *self;
        if rho == 0.0 {
            return Some(Ok(-1.0));
        }
        // Implicit differentiation of F(a h) = -F(a x).
        Some(
            self.scaled_value(x)
                .map(|s| -(1.0 + rho * (a * x).exp()) / (1.0 + rho * s.exp())),
        )
    }
}

pub fn lambert_involution(rho: f64, a: f64) -> Result<Involution> {
    FamilySpec::LambertExp { rho, a }.validate()?;
    Involution::new(
        format!("lambert(rho={rho}, a={a})"),
        Interval::REAL_LINE,
        Arc::new(LambertExp { rho, a }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::involution::{check_involution, default_grid, DefectTolerance};

    #[test]
    fn rational_examples() {
        let h = rational_involution(0.0).unwrap();
        assert!(h.domain().is_real_line());
        assert_eq!(h.eval(3.0).unwrap(), -3.0);

        let h = rational_involution(1.0).unwrap();
        assert_eq!(
            h.domain(),
            Interval {
                lo: -1.0,
                hi: f64::INFINITY
            }
        );
        assert_eq!(h.eval(1.0).unwrap(), -0.5);
        assert_eq!(h.eval(-0.5).unwrap(), 1.0);

        let h = rational_involution(-2.0).unwrap();
        assert_eq!(
            h.domain(),
            Interval {
                lo: f64::NEG_INFINITY,
                hi: 0.5
            }
        );
        let y = h.eval(-1.0).unwrap();
        assert!((y - 1.0 / 3.0).abs() < 1e-16);
        assert!((h.eval(y).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn rational_is_exact_at_origin() {
        for a in [-3.0, -0.5, 0.0, 1.0, 7.0] {
            let h = rational_involution(a).unwrap();
            assert_eq!(h.eval(0.0).unwrap(), 0.0);
            assert_eq!(h.deriv(0.0).unwrap(), -1.0);
        }
    }

    #[test]
    fn stillinger_examples() {
        let h = stillinger_involution(2.5, 0.0).unwrap();
        for x in [-7.0, -1.0, 0.0, 0.3, 11.0] {
            assert_eq!(h.eval(x).unwrap(), -x);
        }
        let h = stillinger_involution(1.0, 1.0).unwrap();
        assert_eq!(h.eval(0.0).unwrap(), 0.0);
        let y = h.eval(1.0).unwrap();
        let expect = -7.0 + 2.0 * 10f64.sqrt();
        assert!((y - expect).abs() < 1e-15, "{y} vs {expect}");
        assert!((h.eval(y).unwrap() - 1.0).abs() < 1e-12);
        assert!((h.deriv(0.0).unwrap() + 1.0).abs() < 1e-15);
    }

    /// The closed form exactly as printed, evaluated naively.
    fn stillinger_textbook(lambda: f64, a: f64, x: f64) -> f64 {
        -a - ((lambda + 2.0 * a * a) * (a + x)
            - 2.0 * a * (lambda + a * a).sqrt() * (lambda + (a + x) * (a + x)).sqrt())
            / lambda
    }

    #[test]
    fn stillinger_rearrangement_matches_textbook_form() {
        for (lambda, a) in [(1.0, 1.0), (2.0, -1.0), (0.3, 2.0)] {
            let h = stillinger_involution(lambda, a).unwrap();
            for x in [-20.0, -3.0, -0.5, 0.25, 1.0, 4.0, 30.0] {
                let d = h.eval(x).unwrap() - stillinger_textbook(lambda, a, x);
                assert!(d.abs() < 1e-12 * (1.0 + x.abs()), "λ={lambda} a={a} x={x}");
            }
        }
    }

    #[test]
    fn stillinger_rejects_nonpositive_lambda() {
        assert!(stillinger_involution(0.0, 1.0).is_err());
        assert!(stillinger_involution(-1.0, 1.0).is_err());
    }

    #[test]
    fn stillinger_sign_flip_symmetry() {
        let (lambda, a) = (1.7, 0.8);
        let h = stillinger_involution(lambda, a).unwrap();
        let m = stillinger_involution(lambda, -a).unwrap();
        for i in -50..=50 {
            let x = 0.37 * i as f64;
            assert!((m.eval(x).unwrap() + h.eval(-x).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn dorignac_origin_and_composition() {
        for beta in [-2.0, -0.5, 0.5, 1.0, 3.0] {
            let h = dorignac_involution(beta).unwrap();
            assert!(h.eval(0.0).unwrap().abs() < 4.0 * f64::EPSILON);
        }
        let h = dorignac_involution(1.0).unwrap();
        let y = h.eval(0.5).unwrap();
        assert!((h.eval(y).unwrap() - 0.5).abs() < 1e-10);
        assert!(dorignac_involution(0.0).is_err());
    }

    #[test]
    fn dorignac_at_one_solves_symmetric_equation() {
        // The printed formula, naive evaluation.
        let naive = (2.0 * 1f64.exp() / ((1.0 + 8.0 * 3f64.exp()).sqrt() - 1.0)).ln();
        let h = dorignac_involution(1.0).unwrap();
        let y = h.eval(1.0).unwrap();
        assert!((y - naive).abs() < 1e-14);
        // Independent check: bisection on φ(1) φ(y) - 4 = 0.
        let phi = |t: f64| (1.0 + 8.0 * (3.0 * t).exp()).sqrt() - 1.0;
        let (mut lo, mut hi) = (-5.0_f64, 5.0_f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi(1.0) * phi(mid) - 4.0 > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((y - 0.5 * (lo + hi)).abs() < 1e-13);
    }

    #[test]
    fn dorignac_is_stable_far_out() {
        let h = dorignac_involution(1.0).unwrap();
        for x in [-500.0, -50.0, 50.0, 300.0, 1000.0] {
            let y = h.eval(x).unwrap();
            assert!(y.is_finite());
            assert!((h.eval(y).unwrap() - x).abs() < 1e-9 * (1.0 + x.abs()), "x={x}");
        }
        // h ≈ -2x - ln 2 as x → -∞
        assert!((h.eval(-500.0).unwrap() - (1000.0 - std::f64::consts::LN_2)).abs() < 1e-9);
    }

    #[test]
    fn lambert_examples() {
        let h = lambert_involution(0.0, 1.0).unwrap();
        assert_eq!(h.eval(2.5).unwrap(), -2.5);
        let h = lambert_involution(1.0, 1.0).unwrap();
        assert!(h.eval(0.0).unwrap().abs() < 4.0 * f64::EPSILON);
        for x in [-2.0_f64, -1.0, 0.5, 3.0] {
            let y = h.eval(x).unwrap();
            let residual = x + y + (x.exp() + y.exp() - 2.0);
            assert!(residual.abs() < 1e-10, "x={x} residual={residual}");
        }
        assert!(lambert_involution(-1.0, 1.0).is_err());
        assert!(lambert_involution(1.0, 0.0).is_err());
    }

    #[test]
    fn lambert_growth_bounds() {
        let h = lambert_involution(1.0, 1.0).unwrap();
        assert!(h.eval(10.0).unwrap() < -(9.0_f64).exp());
        let y = h.eval(-1e4).unwrap();
        assert!(y.abs() < 2.0 * (1.0 + 1e4_f64).ln() + 5.0, "{y}");
    }

    #[test]
    fn families_pass_involution_check() {
        let window = Interval { lo: -10.0, hi: 10.0 };
        let specs = [
            FamilySpec::Rational { a: 1.0 },
            FamilySpec::Rational { a: -0.5 },
            FamilySpec::Stillinger { lambda: 1.0, a: 1.0 },
            FamilySpec::Stillinger { lambda: 2.0, a: -1.0 },
            FamilySpec::Dorignac { beta: 0.5 },
            FamilySpec::Dorignac { beta: 1.0 },
            FamilySpec::LambertExp { rho: 1.0, a: 1.0 },
            FamilySpec::LambertExp { rho: 2.0, a: 0.5 },
        ];
        for spec in specs {
            let h = spec.involution().unwrap();
            let grid = default_grid(h.domain(), window).unwrap();
            let r = check_involution(&h, &grid).unwrap();
            assert!(r.max_identity_defect < 1e-9, "{spec}: {r:?}");
            assert!(r.passes(DefectTolerance::CLOSED_FORM), "{spec}: {r:?}");
        }
    }

    #[test]
    fn parses_addresses() {
        let s: FamilySpec = "Stillinger:lambda=2,a=-1".parse().unwrap();
        assert_eq!(s, FamilySpec::Stillinger { lambda: 2.0, a: -1.0 });
        let s: FamilySpec = "lambert:rho=1,a=1".parse().unwrap();
        assert_eq!(s, FamilySpec::LambertExp { rho: 1.0, a: 1.0 });
        assert!("stillinger:lambda=0".parse::<FamilySpec>().is_err());
        assert!("dorignac:gamma=1".parse::<FamilySpec>().is_err());
        assert!("nope".parse::<FamilySpec>().is_err());
    }

    #[test]
    fn json_round_trip() {
        let s: FamilySpec = serde_json::from_str(r#"{"kind": "stillinger", "lambda": 1.0, "a": 1.0}"#).unwrap();
        assert_eq!(s, FamilySpec::Stillinger { lambda: 1.0, a: 1.0 });
        let back: FamilySpec = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        let l: FamilySpec = serde_json::from_str(r#"{"kind": "lambert", "rho": 2.0, "a": 0.5}"#).unwrap();
        assert_eq!(l, FamilySpec::LambertExp { rho: 2.0, a: 0.5 });
    }
}
