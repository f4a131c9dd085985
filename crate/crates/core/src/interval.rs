use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An open interval `(lo, hi)` of the extended real line.
///
/// Unbounded ends are stored as IEEE infinities; membership is strict on
/// both sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) {
            return Err(Error::Parameter(format!("interval requires lo < hi, got ({lo}, {hi})")));
        }
        Ok(Interval { lo, hi })
    }

    /// An interval that must strictly contain the origin, as required for
    /// the domain of an involution.
    pub fn around_origin(lo: f64, hi: f64) -> Result<Self> {
        let i = Interval::new(lo, hi)?;
        if !i.contains(0.0) {
            return Err(Error::Parameter(format!("interval ({lo}, {hi}) does not contain 0")));
        }
        Ok(i)
    }

    pub fn real_line() -> Self {
        Self::REAL_LINE
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn check(&self, x: f64) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::Domain { x, domain: *self })
        }
    }

    pub fn is_bounded_below(&self) -> bool {
        self.lo.is_finite()
    }

    pub fn is_bounded_above(&self) -> bool {
        self.hi.is_finite()
    }

    pub fn is_real_line(&self) -> bool {
        !self.is_bounded_below() && !self.is_bounded_above()
    }

    /// Length scale used for step sizes and fitting windows: the distance
    /// from 0 to the nearest finite endpoint, capped at 1.
    pub fn scale(&self) -> f64 {
        let mut s: f64 = 1.0;
        if self.lo.is_finite() {
            s = s.min(self.lo.abs());
        }
        if self.hi.is_finite() {
            s = s.min(self.hi.abs());
        }
        s
    }

    /// Distance from `x` to the closer endpoint (infinite for ℝ).
    pub fn distance_to_boundary(&self, x: f64) -> f64 {
        (x - self.lo).min(self.hi - x)
    }

    /// Image of the interval under `x -> x / a`.
    pub fn scaled_by_inverse(&self, a: f64) -> Interval {
        if a > 0.0 {
            Interval {
                lo: self.lo / a,
                hi: self.hi / a,
            }
        } else {
            Interval {
                lo: self.hi / a,
                hi: self.lo / a,
            }
        }
    }

    /// Intersection with `other`, if non-empty.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        Interval::new(self.lo.max(other.lo), self.hi.min(other.hi)).ok()
    }

    /// Parses `lo:hi`; either side may be `-inf`/`inf`.
    pub fn parse(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Error::Parameter(format!("range '{s}' must have the form lo:hi")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parameter(format!("range bound '{t}' is not a number")))
        };
        Interval::new(parse(lo)?, parse(hi)?)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

impl Default for Interval {
    fn default() -> Self {
        Self::REAL_LINE
    }
}
