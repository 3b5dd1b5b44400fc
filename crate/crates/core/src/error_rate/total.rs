use crate::controls::NumericControls;
use crate::error::Result;
use crate::fading::{
    cdf_stage1_bound, cdf_stage2_approx, cdf_stage2_exact, CorrelationModel, SystemModel,
};

use super::{aser_cross, aser_stage1, aser_stage2, MethodTag, ModulationScheme, TaggedValue};

/// Per-stage ASER, the cross term and the total P₁ + P₂ − cross.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AserBreakdown {
    pub stage1: TaggedValue,
    pub stage2: TaggedValue,
    pub cross: TaggedValue,
    pub total: f64,
}

/// Total ASER. Without a correlation model the cross term is the
/// independence product P₁·P₂, giving P₁ + P₂(1 − P₁).
pub fn aser_total(
    sys: &SystemModel,
    modulation: &ModulationScheme,
    corr: Option<&CorrelationModel>,
    ctl: &NumericControls,
) -> Result<AserBreakdown> {
    let stage1 = aser_stage1(sys, modulation, ctl)?;
    let stage2 = aser_stage2(sys, modulation, ctl)?;
    let cross = match corr {
        Some(c) => aser_cross(sys, modulation, c, ctl)?,
        None => TaggedValue {
            value: stage1.value * stage2.value,
            method: MethodTag::Independence,
            rel_error_estimate: stage1.rel_error_estimate + stage2.rel_error_estimate,
            terms_used: 0,
        },
    };
    Ok(AserBreakdown {
        stage1,
        stage2,
        cross,
        total: stage1.value + stage2.value - cross.value,
    })
}

/// Stage-1 outage probability F₁(x_th); unaffected by error propagation.
pub fn outage_stage1(x_th: f64, sys: &SystemModel) -> Result<f64> {
    cdf_stage1_bound(x_th, sys)
}

/// Stage-2 outage given a correct first-stage decision.
pub fn outage_stage2_conditional(x_th: f64, sys: &SystemModel) -> Result<f64> {
    cdf_stage2_exact(x_th, sys)
}

/// Stage-2 outage including first-stage errors:
/// F₂(x_th)(1 − P₁) + P₁, with F₂ the clamped high-SNR approximation.
/// The result never falls below P₁.
pub fn outage_stage2_unconditional(
    x_th: f64,
    sys: &SystemModel,
    modulation: &ModulationScheme,
    ctl: &NumericControls,
) -> Result<TaggedValue> {
    let f2 = cdf_stage2_approx(x_th, sys)?;
    let p1 = aser_stage1(sys, modulation, ctl)?;
    Ok(TaggedValue {
        value: f2 * (1.0 - p1.value) + p1.value,
        ..p1
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independence_identity() {
        let sys = SystemModel::two_by(3, 1.0, 4.0).unwrap();
        let b = aser_total(
            &sys,
            &ModulationScheme::bpsk(),
            None,
            &NumericControls::default(),
        )
        .unwrap();
        let alt = b.stage1.value + b.stage2.value * (1.0 - b.stage1.value);
        assert!((b.total - alt).abs() < 1e-16);
        assert_eq!(b.cross.method, MethodTag::Independence);
        assert!(b.total <= b.stage1.value + b.stage2.value);
    }

    #[test]
    fn unconditional_outage_floor() {
        let sys = SystemModel::two_by(2, 2.0, 10.0).unwrap();
        let ctl = NumericControls::default();
        let p1 = aser_stage1(&sys, &ModulationScheme::bpsk(), &ctl)
            .unwrap()
            .value;
        let at0 = outage_stage2_unconditional(0.0, &sys, &ModulationScheme::bpsk(), &ctl).unwrap();
        assert_eq!(at0.value, p1);
        for x in [0.1, 1.0, 5.0, 1e4] {
            let v = outage_stage2_unconditional(x, &sys, &ModulationScheme::bpsk(), &ctl).unwrap();
            assert!(v.value >= p1);
        }
        let big = outage_stage2_unconditional(1e6, &sys, &ModulationScheme::bpsk(), &ctl).unwrap();
        assert!((big.value - 1.0).abs() < 1e-12);
        assert_eq!(outage_stage1(0.0, &sys).unwrap(), 0.0);
    }
}
