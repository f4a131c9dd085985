// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod families;
pub mod implicit;
pub mod interval;
pub mod involution;
pub mod lambert;
pub mod ode;
pub mod potential;
pub mod quadrature;
pub mod root;

pub use error::{Error, Result};
pub use interval::Interval;
pub use involution::Involution;
pub use potential::Potential;
