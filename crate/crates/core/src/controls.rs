//! Tolerances and truncation limits shared by the analytic modules.

use crate::error::{Error, Result};
use crate::numerics::QuadratureControl;

/// Accuracy targets for the special-function kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialFnControl {
    /// Relative tolerance for series and continued fractions.
    pub rel_tol: f64,
    /// Hard cap on the number of series terms.
    pub max_terms: usize,
    /// Largest |z| for which ₃F₂ is evaluated; beyond it the result is
    /// reported as not converged so callers can switch to quadrature.
    pub hyp3f2_series_max: f64,
}

impl Default for SpecialFnControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 10_000,
            hyp3f2_series_max: 30.0,
        }
    }
}

/// Truncation rules for the correlated cross-term double series.
///
/// A sum is truncated once the relative contribution of the current term
/// stays below `rel_term_tol` for two consecutive indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_term_tol: f64,
    pub max_outer_terms: usize,
    pub max_inner_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_term_tol: 1e-12,
            max_outer_terms: 200,
            max_inner_terms: 200,
        }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_term_tol > 0.0) || self.max_outer_terms == 0 || self.max_inner_terms == 0 {
            return Err(Error::Config(format!("invalid series control {self:?}")));
        }
        Ok(())
    }
}

/// Everything an analytic evaluation needs to know about accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericControls {
    pub specfun: SpecialFnControl,
    pub quadrature: QuadratureControl,
    pub series: SeriesControl,
    /// Maximum estimated relative error accepted from a closed form or
    /// series before the evaluation is redone by quadrature.
    pub closed_form_rel_tol: f64,
}

impl Default for NumericControls {
    fn default() -> Self {
        Self {
            specfun: SpecialFnControl::default(),
            // Error probabilities span many decades, so the absolute floor is
            // effectively disabled and only the relative target applies.
            quadrature: QuadratureControl {
                abs_tol: 1e-300,
                rel_tol: 1e-10,
                max_subdivisions: 2000,
            },
            series: SeriesControl::default(),
            closed_form_rel_tol: 1e-10,
        }
    }
}

impl NumericControls {
    pub fn validate(&self) -> Result<()> {
        self.quadrature.validate()?;
        self.series.validate()?;
        if !(self.specfun.rel_tol > 0.0) || self.specfun.max_terms == 0 {
            return Err(Error::Config(format!(
                "invalid special-function control {:?}",
                self.specfun
            )));
        }
        if !(self.closed_form_rel_tol > 0.0) {
            return Err(Error::Config("closed_form_rel_tol must be positive".into()));
        }
        Ok(())
    }
}
