//! Performance bounds for ordered V-BLAST (zero-forcing successive
//! interference cancellation) receivers over Nakagami-m fading.
//!
//! The crate is organised bottom-up:
//!
//! - [`specfun`]: gamma-family functions, error function, modified Bessel
//!   functions and the ₂F₁/₃F₂ hypergeometric functions.
//! - [`numerics`]: adaptive Gauss–Kronrod quadrature, used as the
//!   independent oracle for every closed form.
//! - [`fading`]: SNR statistics of the two SIC stages, the correlated
//!   bivariate and product densities, and the l×n first-stage bound.
//! - [`error_rate`]: conditional error probabilities, per-stage ASER,
//!   the correlated cross term, total ASER and outage probabilities.
//! - [`sim`]: a Monte-Carlo ZF-SIC link simulator with reproducible,
//!   parallel trial batches.
//! - [`harness`]: curve scenarios and CSV emission used by the CLI.

// Coefficient tables carry their published digits, and `!(x > 0.0)` is
// used on purpose so that NaN fails validation.
#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod controls;
pub mod error;
pub mod error_rate;
pub mod exec;
pub mod fading;
pub mod harness;
pub mod numerics;
pub mod sim;
pub mod specfun;

pub use controls::{NumericControls, SeriesControl, SpecialFnControl};
pub use error::{Error, Result};
pub use exec::Execution;
pub use fading::{CorrelationModel, SystemModel};
pub use numerics::QuadratureControl;
pub use specfun::EvalResult;

/// Converts a dB value to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to dB.
pub fn linear_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}
