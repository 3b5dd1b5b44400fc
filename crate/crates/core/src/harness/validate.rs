//! The `validate` scenario: every closed form on the request grid against
//! its quadrature oracle.

use crate::error::Result as CoreResult;
use crate::error_rate::{
    aser_cross, aser_stage1, aser_stage1_quadrature, aser_stage2, aser_stage2_quadrature,
    cross_quadrature, MethodTag,
};
use crate::fading::{cdf_stage1_actual, cdf_stage1_bound, cdf_stage1_general, ExponentReading};

use super::scenarios::{evaluate, points, Point};
use super::{Cell, CurveRequest, HarnessError, Table};

pub(crate) const STAGE_REL_TOL: f64 = 1e-8;
pub(crate) const CDF_ABS_TOL: f64 = 1e-10;
pub(crate) const CROSS_REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Relative,
    Absolute,
    /// closed_form ≥ oracle up to rounding.
    UpperBound,
}

impl Kind {
    fn as_str(self) -> &'static str {
        match self {
            Kind::Relative => "relative",
            Kind::Absolute => "absolute",
            Kind::UpperBound => "upper_bound",
        }
    }
}

struct Check {
    name: &'static str,
    point: String,
    value: f64,
    method: MethodTag,
    oracle: f64,
    oracle_method: MethodTag,
    tol: f64,
    kind: Kind,
}

impl Check {
    fn abs_diff(&self) -> f64 {
        (self.value - self.oracle).abs()
    }

    fn rel_diff(&self) -> f64 {
        if self.oracle == 0.0 {
            if self.value == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.abs_diff() / self.oracle.abs()
        }
    }

    fn passed(&self) -> bool {
        match self.kind {
            Kind::Relative => self.rel_diff() <= self.tol,
            Kind::Absolute => self.abs_diff() <= self.tol,
            Kind::UpperBound => self.value >= self.oracle - self.tol,
        }
    }
}

fn checks_at(p: &Point, req: &CurveRequest) -> Result<Vec<Check>, HarnessError> {
    let sys = p.system()?;
    let ctl = req.controls;
    let label = p.label();
    let at = |e| HarnessError::at(label.clone(), e);
    let quad = |r: CoreResult<crate::EvalResult>| -> Result<f64, HarnessError> {
        let r = r.map_err(at)?;
        if !r.converged {
            return Err(HarnessError::Numeric {
                point: label.clone(),
                message: "oracle quadrature did not converge".into(),
            });
        }
        Ok(r.value)
    };
    let mut out = Vec::new();
    let s1 = aser_stage1(&sys, &p.modulation, &ctl).map_err(at)?;
    out.push(Check {
        name: "aser_stage1",
        point: label.clone(),
        value: s1.value,
        method: s1.method,
        oracle: quad(aser_stage1_quadrature(&sys, &p.modulation, &ctl.quadrature))?,
        oracle_method: MethodTag::Quadrature,
        tol: STAGE_REL_TOL,
        kind: Kind::Relative,
    });
    let s2 = aser_stage2(&sys, &p.modulation, &ctl).map_err(at)?;
    out.push(Check {
        name: "aser_stage2",
        point: label.clone(),
        value: s2.value,
        method: s2.method,
        oracle: quad(aser_stage2_quadrature(&sys, &p.modulation, &ctl.quadrature))?,
        oracle_method: MethodTag::Quadrature,
        tol: STAGE_REL_TOL,
        kind: Kind::Relative,
    });
    // Transmission-free quantities do not depend on the modulation; only
    // check them once per (SNR, n, m_N).
    if p.modulation == req.modulations[0] {
        for frac in [0.1, 1.0] {
            let x = frac * sys.omega();
            let bound = cdf_stage1_bound(x, &sys).map_err(at)?;
            let point = format!("{label} x={x}");
            out.push(Check {
                name: "cdf_stage1_bound",
                point: point.clone(),
                value: bound,
                method: MethodTag::ClosedForm,
                oracle: cdf_stage1_general(x, &sys, ExponentReading::Bounding, &ctl.quadrature)
                    .map_err(at)?,
                oracle_method: MethodTag::Quadrature,
                tol: CDF_ABS_TOL,
                kind: Kind::Absolute,
            });
            out.push(Check {
                name: "cdf_stage1_bound_direction",
                point,
                value: bound,
                method: MethodTag::ClosedForm,
                oracle: cdf_stage1_actual(x, &sys, &ctl.quadrature).map_err(at)?,
                oracle_method: MethodTag::Quadrature,
                tol: 1e-12,
                kind: Kind::UpperBound,
            });
        }
    }
    for &rho in &req.rhos {
        let corr = crate::CorrelationModel::new(rho).map_err(at)?;
        let c = aser_cross(&sys, &p.modulation, &corr, &ctl).map_err(at)?;
        out.push(Check {
            name: "aser_cross",
            point: format!("{label} rho={rho}"),
            value: c.value,
            method: c.method,
            oracle: quad(cross_quadrature(
                &sys,
                &p.modulation,
                &corr,
                &ctl.quadrature,
            ))?,
            oracle_method: MethodTag::Quadrature,
            tol: CROSS_REL_TOL,
            kind: Kind::Relative,
        });
    }
    Ok(out)
}

/// The validation table and, if any check failed, the error to report.
pub(crate) fn validation_table(
    req: &CurveRequest,
) -> Result<(Table, Option<HarnessError>), HarnessError> {
    let pts = points(req, false);
    let all = evaluate(req, &pts, |p| checks_at(p, req))?;
    let mut t = Table::new([
        "check",
        "point",
        "closed_form",
        "closed_form_method",
        "oracle",
        "oracle_method",
        "abs_diff",
        "rel_diff",
        "tolerance",
        "tolerance_kind",
        "pass",
    ]);
    let mut failure = None;
    for c in all.into_iter().flatten() {
        let ok = c.passed();
        if !ok && failure.is_none() {
            failure = Some(HarnessError::Numeric {
                point: c.point.clone(),
                message: format!(
                    "{} check failed: {:e} vs oracle {:e} (tolerance {:e}, {})",
                    c.name,
                    c.value,
                    c.oracle,
                    c.tol,
                    c.kind.as_str()
                ),
            });
        }
        t.push(vec![
            c.name.into(),
            c.point.clone().into(),
            c.value.into(),
            c.method.as_str().into(),
            c.oracle.into(),
            c.oracle_method.as_str().into(),
            c.abs_diff().into(),
            c.rel_diff().into(),
            c.tol.into(),
            c.kind.as_str().into(),
            Cell::text(if ok { "true" } else { "false" }),
        ])?;
    }
    Ok((t, failure))
}
