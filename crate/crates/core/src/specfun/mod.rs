//! Special functions used by the analytic error-rate formulas.
//!
//! All functions are pure and deterministic. Iterative evaluations use
//! compensated summation and report their accuracy through [`EvalResult`]
//! where the caller needs to act on it (hypergeometric functions).

mod bessel;
mod gamma;
mod hypergeometric;
mod sum;

pub(crate) use gamma::{
    digamma_unchecked, ln_gamma_unchecked, ln_upper_unchecked, reg_lower_unchecked,
    reg_upper_unchecked,
};

pub use bessel::{bessel_i, bessel_i_reduced_ln, bessel_k0, bessel_k0_scaled};
pub use gamma::{
    digamma, erfc, gamma, ln_gamma, ln_reg_upper_gamma, ln_upper_gamma, reg_lower_gamma,
    reg_upper_gamma, upper_gamma, EULER_GAMMA,
};
pub use hypergeometric::{hyp2f1, hyp2f1_series, hyp3f2, pfq_series};
pub use sum::CompensatedSum;

/// Value plus accuracy metadata of an iterative evaluation.
///
/// `converged == true` implies `abs_error_estimate <= tol * |value|` for the
/// relative tolerance the evaluation was asked for, and `terms_used` never
/// exceeds the configured term cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub terms_used: usize,
    pub converged: bool,
}

impl EvalResult {
    pub(crate) fn exact(value: f64) -> Self {
        Self {
            value,
            abs_error_estimate: 0.0,
            terms_used: 0,
            converged: true,
        }
    }

    pub(crate) fn not_converged() -> Self {
        Self {
            value: f64::NAN,
            abs_error_estimate: f64::INFINITY,
            terms_used: 0,
            converged: false,
        }
    }

    /// Relative error estimate; infinite for a zero or non-finite value.
    pub fn rel_error_estimate(&self) -> f64 {
        if self.value == 0.0 {
            if self.abs_error_estimate == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else if self.value.is_finite() {
            self.abs_error_estimate / self.value.abs()
        } else {
            f64::INFINITY
        }
    }

    pub(crate) fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            abs_error_estimate: self.abs_error_estimate * factor.abs(),
            ..self
        }
    }
}
