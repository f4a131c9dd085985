use thiserror::Error;

use crate::interval::Interval;

/// Errors raised by construction, evaluation and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point was passed outside the open interval on which a map is defined.
    #[error("x = {x} lies outside the domain {domain}")]
    Domain { x: f64, domain: Interval },

    /// A family or routine was constructed with inadmissible parameters.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The branch through the origin could not be continued to `x`: no sign
    /// change of f(x, .) was found, so the zero set does not project onto x.
    #[error("no root of f(x, y) = 0 bracketed at x = {x} (searched |y - y0| up to {max_bracket:e})")]
    BracketFailure { x: f64, max_bracket: f64 },

    /// An iterative method stopped without meeting its tolerance.
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    /// The potential never reaches the requested energy on one side of 0.
    #[error("energy {energy} is not reached on the {side} side of the origin inside {domain}")]
    UnboundedSide {
        energy: f64,
        side: &'static str,
        domain: Interval,
    },

    /// The adaptive step size collapsed below the representable resolution.
    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    /// The trajectory left the domain of the potential.
    #[error("trajectory left the domain at t = {t}, x = {x}")]
    DomainExit { t: f64, x: f64 },

    /// The velocity never changed sign as required for a periodic orbit.
    #[error("no return to the turning point detected before t = {t}")]
    CrossingDetection { t: f64 },

    /// A non-finite value appeared where a finite one is required.
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
