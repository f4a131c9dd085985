//! Orbits of `ẍ = -g(x)`: turning points, the period by energy quadrature
//! and by direct integration, and sweeps over energy levels.

use std::f64::consts::FRAC_PI_2;

use log::debug;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::{DenseStep, Dopri5, OdeConfig};
use crate::potential::Potential;
use crate::quadrature::{integrate, QuadConfig};
use crate::root::{brent, RootTolerance};

/// Environment variable capping the sweep worker count (0 or unset: all cores).
pub const THREADS_ENV: &str = "ISOCHRONE_THREADS";

/// Default ODE tolerance for period computations.
pub const DEFAULT_ODE_TOL: f64 = 1e-11;

/// Distance kept between a turning point and a finite domain endpoint.
pub const WALL_MARGIN: f64 = 1e-3;

/// A point of phase space at time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct State {
    pub x: f64,
    pub v: f64,
    pub t: f64,
}

impl State {
    pub fn new(x: f64, v: f64, t: f64) -> Result<Self> {
        if !(x.is_finite() && v.is_finite() && t.is_finite()) {
            return Err(Error::NonFinite(format!("state ({x}, {v}, {t})")));
        }
        Ok(State { x, v, t })
    }

    pub fn energy(&self, p: &Potential) -> Result<f64> {
        Ok(0.5 * self.v * self.v + p.v(self.x)?)
    }
}

fn check_energy(e: f64) -> Result<()> {
    if e > 0.0 && e.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("energy must be positive and finite, got {e}")))
    }
}

/// Solves `V(x) = E` on one side of the origin (`side = ±1`) by walking out
/// from 0 and polishing with Brent on `sign(x) sqrt(V)`.
fn turning_point(p: &Potential, e: f64, side: f64) -> Result<f64> {
    let target = e.sqrt();
    let domain = p.domain();
    let limit = if side > 0.0 { domain.hi } else { -domain.lo };
    let f = |t: f64| -> Result<f64> { Ok(side * p.signed_sqrt_v(side * t)? - target) };
    let unbounded = || Error::UnboundedSide {
        energy: e,
        side: if side > 0.0 { "right" } else { "left" },
        domain,
    };

    let mut inner = 0.0;
    let mut f_inner = -target;
    let mut w = (0.5 * (2.0 * e).sqrt() / p.omega()).min(0.5 * limit);
    loop {
        if !(w > inner) || !w.is_finite() {
            return Err(unbounded());
        }
        match f(w) {
            Ok(fw) if fw >= 0.0 => {
                let t = brent(
                    |t| f(t).unwrap_or(f64::NAN),
                    inner,
                    w,
                    f_inner,
                    fw,
                    RootTolerance::default(),
                )?;
                return Ok(side * t);
            }
            Ok(fw) if fw.is_finite() => {
                inner = w;
                f_inner = fw;
                w = if 2.0 * w < limit {
                    2.0 * w
                } else {
                    inner + 0.5 * (limit - inner)
                };
            }
            Ok(_) | Err(Error::Domain { .. }) | Err(Error::NonFinite(_)) => {
                w = inner + 0.5 * (w - inner);
            }
            Err(err) => return Err(err),
        }
    }
}

/// The turning points `x₋ < 0 < x₊` with `V(x±) = E`.
pub fn turning_points(p: &Potential, e: f64) -> Result<(f64, f64)> {
    check_energy(e)?;
    Ok((turning_point(p, e, -1.0)?, turning_point(p, e, 1.0)?))
}

/// Largest energy whose turning points stay `WALL_MARGIN` away from every
/// finite endpoint of the domain; infinite on ℝ.
pub fn energy_cap(p: &Potential) -> f64 {
    let d = p.domain();
    let mut cap = f64::INFINITY;
    if d.lo.is_finite() {
        cap = cap.min(p.v(d.lo + WALL_MARGIN).unwrap_or(0.0));
    }
    if d.hi.is_finite() {
        cap = cap.min(p.v(d.hi - WALL_MARGIN).unwrap_or(0.0));
    }
    cap
}

/// Period by quadrature of `T = √2 ∫ dx / sqrt(E - V)`.
///
/// On each side of the origin the coordinate `u = sign(x) sqrt(V)` is
/// monotone, and with `u = √E sin φ` the period becomes
/// `√2 Σ ∫₀^{π/2} 2|u| / |g(x(φ))| dφ`, whose integrand is smooth on the
/// closed interval, turning points included.
pub fn period_quadrature(p: &Potential, e: f64) -> Result<f64> {
    let (xm, xp) = turning_points(p, e)?;
    period_quadrature_between(p, e, xm, xp)
}

fn period_quadrature_between(p: &Potential, e: f64, xm: f64, xp: f64) -> Result<f64> {
    let cfg = QuadConfig {
        atol: 0.0,
        rtol: 1e-13,
        max_intervals: 4000,
    };
    let root_tol = RootTolerance::default();
    let sqrt_e = e.sqrt();
    let mut total = 0.0;
    for (side, end) in [(-1.0, xm.abs()), (1.0, xp)] {
        let solve = |target: f64| -> Result<f64> {
            let f = |t: f64| side * p.signed_sqrt_v(side * t).unwrap_or(f64::NAN) - target;
            let f_end = f(end);
            if f_end <= 0.0 {
                return Ok(end);
            }
            brent(f, 0.0, end, -target, f_end, root_tol)
        };
        let integrand = |phi: f64| -> Result<f64> {
            let u = sqrt_e * phi.sin();
            let t = solve(u)?;
            Ok(2.0 * u / p.g(side * t)?.abs())
        };
        total += integrate(integrand, 0.0, FRAC_PI_2, cfg)?.value;
    }
    Ok(std::f64::consts::SQRT_2 * total)
}

/// A simulated trajectory with its dense interpolant and energy record.
#[derive(Debug, Clone)]
pub struct Trajectory {
    start: State,
    steps: Vec<DenseStep<2>>,
    energies: Vec<f64>,
}

impl Trajectory {
    pub fn start(&self) -> State {
        self.start
    }

    pub fn end(&self) -> State {
        match self.steps.last() {
            Some(s) => State {
                x: s.y1[0],
                v: s.y1[1],
                t: s.t1(),
            },
            None => self.start,
        }
    }

    /// State at every step boundary, the start included.
    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        std::iter::once(self.start).chain(self.steps.iter().map(|s| State {
            x: s.y1[0],
            v: s.y1[1],
            t: s.t1(),
        }))
    }

    /// `v²/2 + V(x)` at every step boundary.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energies[0];
        self.energies.iter().fold(0.0, |m, e| m.max((e - e0).abs()))
    }

    pub fn steps(&self) -> usize {
        self.steps.len()
    }

    /// Interpolated state at time `t`.
    pub fn at(&self, t: f64) -> Result<State> {
        let end = self.end().t;
        if !(t >= self.start.t && t <= end) {
            return Err(Error::Parameter(format!(
                "time {t} outside the simulated span [{}, {end}]",
                self.start.t
            )));
        }
        if self.steps.is_empty() {
            return Ok(self.start);
        }
        let k = self.steps.partition_point(|s| s.t1() < t).min(self.steps.len() - 1);
        let y = self.steps[k].at(t);
        Ok(State { x: y[0], v: y[1], t })
    }
}

#[allow(clippy::type_complexity)]
fn integrator(
    p: &Potential,
    s0: State,
    tol: f64,
) -> Result<Dopri5<impl FnMut(f64, &[f64; 2]) -> Result<[f64; 2]> + '_, 2>> {
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    p.domain().check(s0.x)?;
    let cfg = OdeConfig {
        rtol: tol,
        atol: tol,
        h_max: p.expected_period() / 16.0,
        ..Default::default()
    };
    let rhs = move |_t: f64, y: &[f64; 2]| Ok([y[1], -p.g(y[0])?]);
    Dopri5::new(rhs, s0.t, [s0.x, s0.v], cfg)
}

fn step_or_exit<F>(p: &Potential, ode: &mut Dopri5<F, 2>, h_limit: f64) -> Result<DenseStep<2>>
where
    F: FnMut(f64, &[f64; 2]) -> Result<[f64; 2]>,
{
    ode.step(h_limit).map_err(|e| match e {
        Error::StepUnderflow { t, .. } if !p.domain().is_real_line() => Error::DomainExit { t, x: ode.y()[0] },
        other => other,
    })
}

/// Integrates `ẋ = v, v̇ = -g(x)` from `s0` to `t_end` with local error
/// below `tol (1 + |state|)` per step.
pub fn simulate(p: &Potential, s0: State, t_end: f64, tol: f64) -> Result<Trajectory> {
    if !(t_end > s0.t) {
        return Err(Error::Parameter(format!("t_end = {t_end} must exceed t0 = {}", s0.t)));
    }
    let mut ode = integrator(p, s0, tol)?;
    let mut steps = Vec::new();
    let mut energies = vec![s0.energy(p)?];
    while ode.t() < t_end {
        let remaining = t_end - ode.t();
        let s = step_or_exit(p, &mut ode, remaining)?;
        energies.push(0.5 * s.y1[1] * s.y1[1] + p.v(s.y1[0])?);
        steps.push(s);
    }
    Ok(Trajectory {
        start: s0,
        steps,
        energies,
    })
}

/// Period from direct integration, with the half-period and energy drift.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OdePeriod {
    pub period: f64,
    /// Time from `x₊` to `x₋`.
    pub half_period: f64,
    pub max_energy_drift: f64,
    pub steps: usize,
}

impl OdePeriod {
    /// `|t(x₊→x₋) - t(x₋→x₊)| / T`
    pub fn half_period_asymmetry(&self) -> f64 {
        (2.0 * self.half_period - self.period).abs() / self.period
    }
}

/// Time for the orbit through `(x₊(E), 0)` to come back: integrates until
/// the velocity has changed sign twice, locating each sign change on the
/// dense output.
pub fn period_ode(p: &Potential, e: f64, tol: f64) -> Result<f64> {
    Ok(period_ode_detail(p, e, tol)?.period)
}

pub fn period_ode_detail(p: &Potential, e: f64, tol: f64) -> Result<OdePeriod> {
    let (_, xp) = turning_points(p, e)?;
    period_ode_from(p, xp, tol)
}

fn period_ode_from(p: &Potential, xp: f64, tol: f64) -> Result<OdePeriod> {
    let s0 = State::new(xp, 0.0, 0.0)?;
    let e0 = s0.energy(p)?;
    let mut ode = integrator(p, s0, tol)?;
    let t_max = 100.0 * p.expected_period();
    let mut half = None;
    let mut drift: f64 = 0.0;
    let root_tol = RootTolerance {
        atol: 1e-15,
        ..Default::default()
    };
    while ode.t() < t_max {
        let s = step_or_exit(p, &mut ode, f64::INFINITY)?;
        drift = drift.max((0.5 * s.y1[1] * s.y1[1] + p.v(s.y1[0])? - e0).abs());
        let (v0, v1) = (s.y0[1], s.y1[1]);
        let crossed = match half {
            None => v0 < 0.0 && v1 >= 0.0,
            Some(_) => v0 > 0.0 && v1 <= 0.0,
        };
        if !crossed {
            continue;
        }
        let theta = brent(|th| s.at_theta(th)[1], 0.0, 1.0, v0, v1, root_tol)?;
        let t = s.t0 + theta * s.h;
        match half {
            None => half = Some(t),
            Some(h) => {
                return Ok(OdePeriod {
                    period: t,
                    half_period: h,
                    max_energy_drift: drift,
                    steps: ode.stats().accepted,
                })
            }
        }
    }
    Err(Error::CrossingDetection { t: ode.t() })
}

/// Both period estimates at one energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodReport {
    pub energy: f64,
    pub x_minus: f64,
    pub x_plus: f64,
    pub t_quadrature: f64,
    pub t_ode: f64,
    pub t_expected: f64,
    pub max_energy_drift: f64,
    pub half_period_asymmetry: f64,
}

impl PeriodReport {
    pub fn quadrature_deviation(&self) -> f64 {
        (self.t_quadrature - self.t_expected).abs() / self.t_expected
    }

    pub fn ode_deviation(&self) -> f64 {
        (self.t_ode - self.t_expected).abs() / self.t_expected
    }

    /// Larger of the two relative deviations from `2π/ω`.
    pub fn rel_deviation(&self) -> f64 {
        self.quadrature_deviation().max(self.ode_deviation())
    }
}

pub fn period_report(p: &Potential, e: f64, tol: f64) -> Result<PeriodReport> {
    let (xm, xp) = turning_points(p, e)?;
    let t_quadrature = period_quadrature_between(p, e, xm, xp)?;
    let ode = period_ode_from(p, xp, tol)?;
    Ok(PeriodReport {
        energy: e,
        x_minus: xm,
        x_plus: xp,
        t_quadrature,
        t_ode: ode.period,
        t_expected: p.expected_period(),
        max_energy_drift: ode.max_energy_drift,
        half_period_asymmetry: ode.half_period_asymmetry(),
    })
}

/// One energy level of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub energy: f64,
    pub report: Option<PeriodReport>,
    pub error: Option<String>,
    /// Above [`energy_cap`]; not attempted and not counted as a failure.
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub entries: Vec<SweepEntry>,
    pub max_rel_period_deviation: f64,
    pub max_quadrature_deviation: f64,
    pub max_ode_deviation: f64,
    pub failures: usize,
    pub skipped: usize,
}

impl SweepReport {
    /// True when no entry failed.
    pub fn complete(&self) -> bool {
        self.failures == 0
    }

    pub fn computed(&self) -> impl Iterator<Item = &PeriodReport> {
        self.entries.iter().filter_map(|e| e.report.as_ref())
    }

    pub fn passes(&self, threshold: f64) -> bool {
        self.complete() && self.computed().next().is_some() && self.max_rel_period_deviation < threshold
    }

    /// First energy that failed or exceeded `threshold`.
    pub fn first_offender(&self, threshold: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| !e.skipped && e.report.is_none_or(|r| !(r.rel_deviation() < threshold)))
            .map(|e| e.energy)
    }
}

/// `n` points evenly spaced in `log10` between `lo` and `hi`.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    hi
                } else {
                    10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64)
                }
            })
            .collect(),
    }
}

/// Eleven energies log-spaced over `[1e-2, 1e2]`.
pub fn default_energies() -> Vec<f64> {
    logspace(1e-2, 1e2, 11)
}

/// Worker count from `ISOCHRONE_THREADS`; 0 lets rayon decide.
pub fn configured_threads() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0)
}

/// Both period oracles at every energy, in parallel. Entries come back in
/// input order whatever the completion order, and a failure at one energy
/// does not stop the others.
pub fn isochrony_sweep(p: &Potential, energies: &[f64], tol: f64) -> Result<SweepReport> {
    if let Some(&bad) = energies.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::Parameter(format!(
            "energies must be positive and finite, got {bad}"
        )));
    }
    let cap = energy_cap(p);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(configured_threads())
        .build()
        .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    let entries: Vec<SweepEntry> = pool.install(|| {
        energies
            .par_iter()
            .map(|&energy| {
                if energy > cap {
                    return SweepEntry {
                        energy,
                        report: None,
                        error: Some(format!("energy above the admissible cap {cap}")),
                        skipped: true,
                    };
                }
                let r = period_report(p, energy, tol);
                debug!("{}: E = {energy}: {r:?}", p.label());
                match r {
                    Ok(report) => SweepEntry {
                        energy,
                        report: Some(report),
                        error: None,
                        skipped: false,
                    },
                    Err(e) => SweepEntry {
                        energy,
                        report: None,
                        error: Some(e.to_string()),
                        skipped: false,
                    },
                }
            })
            .collect()
    });
    let mut out = SweepReport {
        max_rel_period_deviation: 0.0,
        max_quadrature_deviation: 0.0,
        max_ode_deviation: 0.0,
        failures: entries.iter().filter(|e| !e.skipped && e.report.is_none()).count(),
        skipped: entries.iter().filter(|e| e.skipped).count(),
        entries,
    };
    for r in out.entries.iter().filter_map(|e| e.report) {
        out.max_quadrature_deviation = out.max_quadrature_deviation.max(r.quadrature_deviation());
        out.max_ode_deviation = out.max_ode_deviation.max(r.ode_deviation());
    }
    out.max_rel_period_deviation = out.max_quadrature_deviation.max(out.max_ode_deviation);
    Ok(out)
}
