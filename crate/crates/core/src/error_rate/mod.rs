//! Conditional error probabilities, per-stage and total ASER, the
//! correlated cross term and outage probabilities.

mod cross;
pub mod literal;
mod modulation;
mod stage;
mod total;

use std::fmt;

pub use cross::{aser_cross, cross_quadrature, cross_series, CrossSeries};
pub use modulation::{cep_binary, cep_mary, ModulationKind, ModulationScheme};
pub use stage::{
    aser_stage1, aser_stage1_actual, aser_stage1_quadrature, aser_stage2, aser_stage2_actual,
    aser_stage2_quadrature,
};
pub use total::{
    aser_total, outage_stage1, outage_stage2_conditional, outage_stage2_unconditional,
    AserBreakdown,
};

/// How a value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodTag {
    ClosedForm,
    Series,
    QuadratureFallback,
    /// Cross term replaced by the product of the stage ASERs.
    Independence,
    /// Adaptive quadrature used as the primary method (oracles and
    /// numerical overlays).
    Quadrature,
    /// Empirical estimate from link-level simulation.
    MonteCarlo,
}

impl MethodTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodTag::ClosedForm => "closed_form",
            MethodTag::Series => "series",
            MethodTag::QuadratureFallback => "quadrature_fallback",
            MethodTag::Independence => "independence",
            MethodTag::Quadrature => "quadrature",
            MethodTag::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for MethodTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A value together with the method that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaggedValue {
    pub value: f64,
    pub method: MethodTag,
    pub rel_error_estimate: f64,
    /// Series terms, outer terms or quadrature segments, depending on method.
    pub terms_used: usize,
}
