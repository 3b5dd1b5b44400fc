//! Uncorrected variants of several expressions, kept so their disagreement
//! with quadrature can be measured and reported. Nothing on the main
//! evaluation path uses them.

use crate::controls::{NumericControls, SeriesControl};
use crate::error::{Error, Result};
use crate::fading::{CorrelationModel, SystemModel};
use crate::specfun::{
    bessel_i, bessel_k0, digamma_unchecked as psi, hyp2f1, hyp3f2, ln_gamma_unchecked as lg,
    CompensatedSum,
};

use super::cross::CrossSeries;
use super::{ModulationKind, ModulationScheme};

const LN_SQRT_PI: f64 = 0.572_364_942_924_700_087_071_713_675_677;

/// Stage-1 M-ary ASER with the Γ(m+n−1) factor and term order of the
/// uncorrected two-term form; z = m/(βΩ).
pub fn aser_stage1_mary(
    sys: &SystemModel,
    modulation: &ModulationScheme,
    ctl: &NumericControls,
) -> Result<f64> {
    if modulation.kind() != ModulationKind::RectangularMary {
        return Err(Error::domain("aser_stage1_mary", "scheme is binary"));
    }
    let (al, be) = (modulation.alpha(), modulation.beta());
    let m = sys.m();
    let n = sys.n() as f64;
    let z = m / (be * sys.omega());
    let f = hyp3f2(
        [m - n + 1.0, m, m + 0.5],
        [m - n + 2.0, m + 1.0],
        -z,
        &ctl.specfun,
    )?;
    let first = ((n - 1.0).ln() + m * z.ln() + lg(m + 0.5)
        - LN_SQRT_PI
        - lg(m)
        - m.ln()
        - (m - n + 1.0).ln())
    .exp();
    let second = ((n - 1.0) * z.ln() + lg(m + n - 1.0) + lg(n - 0.5) - LN_SQRT_PI - lg(m)).exp();
    Ok(al * (first * f.value - second))
}

/// Stage-2 ASER averaged over the mass-2 density 4·f_x(2x).
pub fn aser_stage2(
    sys: &SystemModel,
    modulation: &ModulationScheme,
    ctl: &NumericControls,
) -> Result<f64> {
    let (al, be) = (modulation.alpha(), modulation.beta());
    let m = sys.m();
    let c = 2.0 * m / sys.omega();
    match modulation.kind() {
        ModulationKind::Binary => {
            let f = hyp2f1(be, m + be, be + 1.0, -al / c, &ctl.specfun)?;
            let k = (be * al.ln() + lg(m + be) - be.ln() - lg(be) - lg(m) - be * c.ln()).exp();
            Ok(1.0 - k * f.value)
        }
        ModulationKind::RectangularMary => {
            let f = hyp2f1(0.5, m + 0.5, 1.5, -be / c, &ctl.specfun)?;
            let k =
                4.0 * al * (0.5 * be.ln() + lg(m + 0.5) - lg(m) - 0.5 * c.ln() - LN_SQRT_PI).exp();
            Ok(2.0 * al - k * f.value)
        }
    }
}

/// Joint density in envelope-style normalization, exponent m/2 on x₁x₂.
pub fn pdf_bivariate(x1: f64, x2: f64, sys: &SystemModel, corr: &CorrelationModel) -> Result<f64> {
    let rho = corr.rho();
    if rho == 0.0 {
        return Err(Error::domain("pdf_bivariate", "requires rho > 0"));
    }
    let m = sys.m();
    let om = sys.omega();
    let s = om * (1.0 - rho);
    let i = bessel_i(m - 1.0, 2.0 * (rho * x1 * x2).sqrt() / s)?;
    let ln_pre = 4f64.ln() + 0.5 * m * (x1 * x2).ln()
        - (x1 + x2) / s
        - lg(m)
        - (m + 1.0) * om.ln()
        - (1.0 - rho).ln()
        - 0.5 * (m - 1.0) * rho.ln();
    Ok(ln_pre.exp() * i)
}

/// Product density with the Bessel arguments and prefactor of the
/// uncorrected form.
pub fn pdf_product(y: f64, sys: &SystemModel, corr: &CorrelationModel) -> Result<f64> {
    let rho = corr.rho();
    if rho == 0.0 || !(y > 0.0) {
        return Err(Error::domain("pdf_product", "requires rho > 0 and y > 0"));
    }
    let m = sys.m();
    let om = sys.omega();
    let i = bessel_i(m - 1.0, (rho * y).sqrt() / (om * (1.0 - rho)))?;
    let k = bessel_k0(y.sqrt() / (om * (1.0 - rho).powi(2)))?;
    let ln_pre = 0.5 * m * y.ln()
        - m * 4f64.ln()
        - lg(m)
        - (m + 1.0) * om.ln()
        - (1.0 - rho).ln()
        - 0.5 * (m - 1.0) * rho.ln();
    Ok(ln_pre.exp() * i * k)
}

/// The cross-term double series with 2√a·Ω(1−ρ) in place of the Gamma
/// scale and no ρ^k weighting.
pub fn cross_series(
    sys: &SystemModel,
    modulation: &ModulationScheme,
    corr: &CorrelationModel,
    ctl: &SeriesControl,
) -> Result<CrossSeries> {
    ctl.validate()?;
    let rho = corr.rho();
    if rho == 0.0 {
        return Err(Error::domain("cross_series", "requires rho > 0"));
    }
    let m = sys.m();
    let om = sys.omega();
    let (al, be) = (modulation.alpha(), modulation.beta());
    // (a, b, ln prefactor, ln per-k constant)
    let (a, b, ln_pre, ln_ck) = match modulation.kind() {
        ModulationKind::Binary => (
            al,
            be,
            -(m + 0.5) * 4f64.ln()
                - lg(m)
                - (m + 1.0) * om.ln()
                - (1.0 - rho).ln()
                - 0.5 * (m - 1.0) * rho.ln()
                - lg(be),
            0.5 * rho.ln() - 4f64.ln() - (1.0 - rho).ln() - om.ln(),
        ),
        ModulationKind::RectangularMary => (
            be,
            0.5,
            al.ln()
                - m * 4f64.ln()
                - lg(m)
                - (m + 1.0) * om.ln()
                - (1.0 - rho).ln()
                - 0.5 * (m - 1.0) * rho.ln(),
            0.5 * rho.ln() - 2f64.ln() - LN_SQRT_PI - (1.0 - rho).ln() - om.ln(),
        ),
    };
    let ln_x = -(2.0 * a.sqrt() * om * (1.0 - rho)).ln();
    let mut total = CompensatedSum::new();
    let mut quiet_k = 0;
    let mut max_inner = 0;
    for k in 0..ctl.max_outer_terms {
        let kf = k as f64;
        let ln_c = ln_ck - (kf + m) * a.ln() - lg(kf + m) - lg(kf + 1.0);
        let mut inner = CompensatedSum::new();
        let mut quiet = 0;
        let mut done = false;
        let mut prev = f64::INFINITY;
        for j in 0..ctl.max_inner_terms {
            let jf = j as f64;
            let s = m + kf + jf;
            let ln_g = lg(b + s) - 2.0 * lg(jf + 1.0) - (2.0 * s).ln() + 2.0 * jf * ln_x;
            let bracket = 2.0 * psi(jf + 1.0) + 1.0 / s - psi(b + s) - 2.0 * ln_x;
            let mag = (ln_pre + ln_c + ln_g).exp();
            let term = mag * bracket;
            inner.add(term);
            max_inner = max_inner.max(j + 1);
            if term.abs() <= ctl.rel_term_tol * inner.value().abs() && mag < prev {
                quiet += 1;
                if quiet >= 2 {
                    done = true;
                    break;
                }
            } else {
                quiet = 0;
            }
            prev = mag;
        }
        if !done {
            return Ok(CrossSeries {
                value: total.value() + inner.value(),
                abs_error_estimate: f64::INFINITY,
                outer_terms: k + 1,
                max_inner_terms: max_inner,
                converged: false,
            });
        }
        total.add(inner.value());
        if inner.value().abs() <= ctl.rel_term_tol * total.value().abs() {
            quiet_k += 1;
            if quiet_k >= 2 {
                return Ok(CrossSeries {
                    value: total.value(),
                    abs_error_estimate: total.rounding_error() + inner.value().abs(),
                    outer_terms: k + 1,
                    max_inner_terms: max_inner,
                    converged: true,
                });
            }
        } else {
            quiet_k = 0;
        }
    }
    Ok(CrossSeries {
        value: total.value(),
        abs_error_estimate: f64::INFINITY,
        outer_terms: ctl.max_outer_terms,
        max_inner_terms: max_inner,
        converged: false,
    })
}
