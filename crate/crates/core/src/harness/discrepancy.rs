//! Side-by-side comparison of the uncorrected expressions in
//! [`crate::error_rate::literal`], the shipped evaluations and independent
//! quadrature oracles.

use std::path::Path;

use crate::controls::NumericControls;
use crate::error::{Error, Result as CoreResult};
use crate::error_rate::{
    aser_cross, aser_stage1, aser_stage1_quadrature, aser_stage2, aser_stage2_quadrature,
    cross_quadrature, cross_series, literal, MethodTag, ModulationScheme, TaggedValue,
};
use crate::fading::{pdf_bivariate, pdf_product, pdf_snr, CorrelationModel, SystemModel};
use crate::numerics::integrate_half_line;
use crate::{db_to_linear, EvalResult};

use super::{point_label, Cell, HarnessError, Table};

struct Entry {
    item: &'static str,
    point: String,
    literal: CoreResult<f64>,
    corrected: f64,
    oracle: f64,
    shipped: TaggedValue,
    note: String,
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn converged(r: CoreResult<EvalResult>, func: &'static str) -> CoreResult<f64> {
    let r = r?;
    if !r.converged {
        return Err(Error::NonConvergence {
            func,
            terms: r.terms_used,
            partial: r.value,
        });
    }
    Ok(r.value)
}

fn exact(value: f64) -> TaggedValue {
    TaggedValue {
        value,
        method: MethodTag::ClosedForm,
        rel_error_estimate: 0.0,
        terms_used: 0,
    }
}

fn stage_entries(ctl: &NumericControls, out: &mut Vec<Entry>) -> CoreResult<()> {
    let mods = [
        ModulationScheme::bpsk(),
        ModulationScheme::qam(4)?,
        ModulationScheme::qam(16)?,
    ];
    for n in [2, 3] {
        for m_n in [0.5, 1.0] {
            for snr_db in [0.0, 10.0] {
                let sys = SystemModel::two_by(n, m_n, db_to_linear(snr_db))?;
                for m in &mods {
                    let point = point_label(snr_db, n, m_n, m, None);
                    if !m.is_binary() {
                        let s1 = aser_stage1(&sys, m, ctl)?;
                        out.push(Entry {
                            item: "aser_stage1_mary",
                            point: point.clone(),
                            literal: literal::aser_stage1_mary(&sys, m, ctl),
                            corrected: s1.value,
                            oracle: converged(
                                aser_stage1_quadrature(&sys, m, &ctl.quadrature),
                                "oracle",
                            )?,
                            shipped: s1,
                            note:
                                "literal form carries a Gamma(m+n-1) factor and reversed term order"
                                    .into(),
                        });
                    }
                    let s2 = aser_stage2(&sys, m, ctl)?;
                    out.push(Entry {
                        item: "aser_stage2",
                        point,
                        literal: literal::aser_stage2(&sys, m, ctl),
                        corrected: s2.value,
                        oracle: converged(
                            aser_stage2_quadrature(&sys, m, &ctl.quadrature),
                            "oracle",
                        )?,
                        shipped: s2,
                        note: "literal form averages over a density of total mass 2".into(),
                    });
                }
            }
        }
    }
    Ok(())
}

fn density_entries(ctl: &NumericControls, out: &mut Vec<Entry>) -> CoreResult<()> {
    let q = &ctl.quadrature;
    for snr_db in [0.0, 10.0] {
        let sys = SystemModel::two_by(2, 0.5, db_to_linear(snr_db))?;
        let om = sys.omega();
        for rho in [0.3, 0.5, 0.7] {
            let corr = CorrelationModel::new(rho)?;
            let x1 = om;
            let marginal = |f: &dyn Fn(f64) -> CoreResult<f64>| {
                converged(
                    integrate_half_line(|x2| f(x2).unwrap_or(f64::NAN), &[om], q),
                    "marginal",
                )
            };
            let lit = marginal(&|x2| literal::pdf_bivariate(x1, x2, &sys, &corr));
            let cor = marginal(&|x2| pdf_bivariate(x1, x2, &sys, &corr))?;
            let want = pdf_snr(x1, &sys)?;
            out.push(Entry {
                item: "pdf_bivariate_marginal",
                point: format!("snr_db={snr_db} m=2 rho={rho} x1={x1}"),
                literal: lit,
                corrected: cor,
                oracle: want,
                shipped: exact(cor),
                note: "integral over x2 compared with the Gamma marginal".into(),
            });
            for y in [0.5f64, 1.0, 4.0] {
                let mixture = converged(
                    integrate_half_line(
                        |x| {
                            if x == 0.0 {
                                return 0.0;
                            }
                            pdf_bivariate(x, y / x, &sys, &corr).unwrap_or(f64::NAN) / x
                        },
                        &[y.sqrt(), om],
                        q,
                    ),
                    "product oracle",
                )?;
                let cor = pdf_product(y, &sys, &corr)?;
                out.push(Entry {
                    item: "pdf_product",
                    point: format!("snr_db={snr_db} m=2 rho={rho} y={y}"),
                    literal: literal::pdf_product(y, &sys, &corr),
                    corrected: cor,
                    oracle: mixture,
                    shipped: exact(cor),
                    note: "oracle integrates the joint density along x1*x2 = y".into(),
                });
            }
        }
    }
    Ok(())
}

fn cross_entries(ctl: &NumericControls, out: &mut Vec<Entry>) -> CoreResult<()> {
    let mods = [
        ModulationScheme::bpsk(),
        ModulationScheme::qam(4)?,
        ModulationScheme::qam(16)?,
    ];
    for snr_db in [0.0, 10.0] {
        let sys = SystemModel::two_by(2, 0.5, db_to_linear(snr_db))?;
        for rho in [0.3, 0.5, 0.7] {
            let corr = CorrelationModel::new(rho)?;
            for m in &mods {
                let s = cross_series(&sys, m, &corr, &ctl.series)?;
                let shipped = aser_cross(&sys, m, &corr, ctl)?;
                out.push(Entry {
                    item: "aser_cross",
                    point: point_label(snr_db, 2, 0.5, m, Some(rho)),
                    literal: literal::cross_series(&sys, m, &corr, &ctl.series).map(|r| r.value),
                    corrected: s.value,
                    oracle: converged(cross_quadrature(&sys, m, &corr, &ctl.quadrature), "oracle")?,
                    shipped,
                    note: format!(
                        "series converged={} outer_terms={} est_rel_err={:.1e}",
                        s.converged,
                        s.outer_terms,
                        s.abs_error_estimate / s.value.abs()
                    ),
                });
            }
        }
    }
    Ok(())
}

/// The full discrepancy table.
pub fn discrepancy_table(ctl: &NumericControls) -> Result<Table, HarnessError> {
    let mut entries = Vec::new();
    stage_entries(ctl, &mut entries).map_err(|e| HarnessError::at("stage entries", e))?;
    density_entries(ctl, &mut entries).map_err(|e| HarnessError::at("density entries", e))?;
    cross_entries(ctl, &mut entries).map_err(|e| HarnessError::at("cross entries", e))?;
    let mut t = Table::new([
        "item",
        "point",
        "literal",
        "corrected",
        "oracle",
        "oracle_method",
        "literal_rel_diff",
        "corrected_rel_diff",
        "shipped",
        "shipped_method",
        "shipped_rel_diff",
        "note",
    ]);
    for e in entries {
        let (lit, lit_diff, note) = match e.literal {
            Ok(v) => (v, rel(v, e.oracle), e.note),
            Err(err) => (
                f64::NAN,
                f64::NAN,
                format!("{}; literal form failed: {err}", e.note),
            ),
        };
        t.push(vec![
            e.item.into(),
            e.point.into(),
            lit.into(),
            e.corrected.into(),
            e.oracle.into(),
            MethodTag::Quadrature.as_str().into(),
            lit_diff.into(),
            rel(e.corrected, e.oracle).into(),
            e.shipped.value.into(),
            e.shipped.method.as_str().into(),
            rel(e.shipped.value, e.oracle).into(),
            Cell::Text(note),
        ])?;
    }
    Ok(t)
}

/// Computes the discrepancy table and writes it atomically to `path`.
pub fn write_discrepancy_report(path: &Path, ctl: &NumericControls) -> Result<usize, HarnessError> {
    let t = discrepancy_table(ctl)?;
    t.write_atomic(path)
        .map_err(|e| HarnessError::Io(e.to_string()))?;
    Ok(t.len())
}
