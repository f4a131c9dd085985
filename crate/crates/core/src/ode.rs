//! Dormand–Prince 5(4) integrator with step-size control and the
//! fourth-order continuous extension of Hairer, Nørsett and Wanner.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Step-size control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    /// Largest allowed step.
    pub h_max: f64,
    /// Steps below `h_min · max(1, |t|)` are an error.
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeConfig {
    fn default() -> Self {
        OdeConfig {
            rtol: 1e-12,
            atol: 1e-14,
            h_init: None,
            h_max: f64::INFINITY,
            h_min: 1e-14,
            max_steps: 10_000_000,
        }
    }
}

/// One accepted step together with its dense interpolant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    rcont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    /// Interpolated state at `t0 + θ h`, `θ ∈ [0, 1]`.
    pub fn at_theta(&self, theta: f64) -> [f64; N] {
        let t1 = 1.0 - theta;
        let r = &self.rcont;
        std::array::from_fn(|i| r[0][i] + theta * (r[1][i] + t1 * (r[2][i] + theta * (r[3][i] + t1 * r[4][i]))))
    }

    pub fn at(&self, t: f64) -> [f64; N] {
        self.at_theta((t - self.t0) / self.h)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Integrator state for `y' = f(t, y)`.
pub struct Dopri5<F, const N: usize> {
    f: F,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    cfg: OdeConfig,
    stats: OdeStats,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
}

impl<F, const N: usize> Dopri5<F, N>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    pub fn new(mut f: F, t0: f64, y0: [f64; N], cfg: OdeConfig) -> Result<Self> {
        if y0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("initial state".into()));
        }
        let k1 = f(t0, &y0)?;
        let mut s = Dopri5 {
            f,
            t: t0,
            y: y0,
            k1,
            h: 0.0,
            cfg,
            stats: OdeStats {
                evaluations: 1,
                ..Default::default()
            },
        };
        s.h = match cfg.h_init {
            Some(h) => h,
            None => s.initial_step()?,
        };
        Ok(s)
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> [f64; N] {
        self.y
    }

    pub fn stats(&self) -> OdeStats {
        self.stats
    }

    fn scale(&self, a: &[f64; N], b: &[f64; N], i: usize) -> f64 {
        self.cfg.atol + self.cfg.rtol * a[i].abs().max(b[i].abs())
    }

    fn norm(&self, v: &[f64; N], a: &[f64; N], b: &[f64; N]) -> f64 {
        let s: f64 = (0..N).map(|i| (v[i] / self.scale(a, b, i)).powi(2)).sum();
        (s / N as f64).sqrt()
    }

    /// Starting step from the usual two-evaluation heuristic.
    fn initial_step(&mut self) -> Result<f64> {
        let y = self.y;
        let d0 = self.norm(&y, &y, &y);
        let d1 = self.norm(&self.k1, &y, &y);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(self.cfg.h_max);
        let y1 = axpy(&y, h0, &[(1.0, &self.k1)]);
        let d2 = match (self.f)(self.t + h0, &y1) {
            Ok(k) => {
                self.stats.evaluations += 1;
                let diff: [f64; N] = std::array::from_fn(|i| k[i] - self.k1[i]);
                self.norm(&diff, &y, &y) / h0
            }
            Err(_) => return Ok(h0 * 1e-3),
        };
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        Ok((100.0 * h0).min(h1).min(self.cfg.h_max))
    }

    /// Takes one accepted step of size at most `h_limit`, shrinking the
    /// step on error-test failure or when the right-hand side leaves its
    /// domain.
    pub fn step(&mut self, h_limit: f64) -> Result<DenseStep<N>> {
        let mut h = self.h.min(h_limit).min(self.cfg.h_max);
        loop {
            if self.stats.accepted + self.stats.rejected >= self.cfg.max_steps {
                return Err(Error::NoConvergence {
                    what: "ODE integration step budget",
                    iterations: self.cfg.max_steps,
                });
            }
            if h < self.cfg.h_min * self.t.abs().max(1.0) {
                return Err(Error::StepUnderflow { t: self.t, h });
            }
            match self.try_step(h) {
                Ok((dense, err, k7)) => {
                    let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
                    if err <= 1.0 {
                        self.stats.accepted += 1;
                        self.t = dense.t1();
                        self.y = dense.y1;
                        self.k1 = k7;
                        self.h = if self.stats.rejected > 0 && err > 0.5 {
                            h * fac.min(1.0)
                        } else {
                            h * fac
                        };
                        return Ok(dense);
                    }
                    self.stats.rejected += 1;
                    h *= fac.min(0.9);
                }
                Err(Error::Domain { .. }) | Err(Error::NonFinite(_)) => {
                    self.stats.rejected += 1;
                    h *= 0.25;
                }
                Err(e) => return Err(e),
            }
        }
    }

    #[allow(clippy::type_complexity)]
    fn try_step(&mut self, h: f64) -> Result<(DenseStep<N>, f64, [f64; N])> {
        let (t, y, k1) = (self.t, self.y, self.k1);
        let f = &mut self.f;
        let k2 = f(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]))?;
        let k3 = f(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]))?;
        let k4 = f(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
        let k5 = f(
            t + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        )?;
        let k6 = f(
            t + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        )?;
        let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &y1)?;
        self.stats.evaluations += 6;
        if y1.iter().chain(k7.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("state after step from t = {t}")));
        }
        let e: [f64; N] =
            std::array::from_fn(|i| h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]));
        let err = self.norm(&e, &y, &y1);

        let r2: [f64; N] = std::array::from_fn(|i| y1[i] - y[i]);
        let r3: [f64; N] = std::array::from_fn(|i| h * k1[i] - r2[i]);
        let r4: [f64; N] = std::array::from_fn(|i| r2[i] - h * k7[i] - r3[i]);
        let r5: [f64; N] =
            std::array::from_fn(|i| h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]));
        let dense = DenseStep {
            t0: t,
            h,
            y0: y,
            y1,
            rcont: [y, r2, r3, r4, r5],
        };
        Ok((dense, err, k7))
    }
}
