//! Correlated cross term E[CEP(x₁x₂)] with (x₁, x₂) jointly Gamma.
//!
//! Conditioned on a negative-binomial index k with weights
//! w_k = Γ(m+k) ρ^k (1−ρ)^m / (Γ(m) k!), the two SNRs are independent
//! Gamma(m+k) with scale d = Ω(1−ρ)/m. For iid Gamma(A) variables the
//! expectation E[Q(b, λG₁G₂)], λ = a·d², is the residue series
//!
//! Σ_j Γ(A+j+b) / ((A+j) Γ(b) Γ(A)² j!²) · λ^{−(A+j)}
//!     · [2ψ(j+1) + 1/(A+j) − ψ(A+j+b) + ln λ].
//!
//! The series is exact but alternates strongly when λ is small (low SNR),
//! so its conditioning is tracked and the quadrature path takes over when
//! the estimated error is too large.

use crate::controls::{NumericControls, SeriesControl};
use crate::error::{Error, Result};
use crate::fading::{pdf_product, CorrelationModel, SystemModel};
use crate::numerics::{integrate_half_line, QuadratureControl};
use crate::specfun::{
    digamma_unchecked as psi, ln_gamma_unchecked as lg, CompensatedSum, EvalResult,
};

use super::{MethodTag, ModulationScheme, TaggedValue};

const EPS: f64 = f64::EPSILON;

/// Outcome of summing the cross-term double series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossSeries {
    pub value: f64,
    pub abs_error_estimate: f64,
    /// Outer (k) terms summed.
    pub outer_terms: usize,
    /// Largest inner (j) count over all outer terms.
    pub max_inner_terms: usize,
    pub converged: bool,
}

struct Inner {
    sum: f64,
    err: f64,
    terms: usize,
    converged: bool,
}

/// w_k · E[Q(b, λG₁G₂)] for G ~ Gamma(A = m+k), in the log domain.
fn inner_sum(big_a: f64, b: f64, ln_lambda: f64, ln_w: f64, ctl: &SeriesControl) -> Inner {
    let mut sum = CompensatedSum::new();
    let mut err = 0.0;
    let mut quiet = 0;
    let mut prev_mag = f64::INFINITY;
    let lg_b = lg(b);
    let lg_a2 = 2.0 * lg(big_a);
    for j in 0..ctl.max_inner_terms {
        let jf = j as f64;
        let aj = big_a + jf;
        let parts = [
            lg(aj + b),
            -aj.ln(),
            -lg_b,
            -lg_a2,
            -2.0 * lg(jf + 1.0),
            -aj * ln_lambda,
            ln_w,
        ];
        let ln_mag: f64 = parts.iter().sum();
        let br = [2.0 * psi(jf + 1.0), 1.0 / aj, -psi(aj + b), ln_lambda];
        let bracket: f64 = br.iter().sum();
        let mag = ln_mag.exp();
        let term = mag * bracket;
        sum.add(term);
        let ln_scale: f64 = parts.iter().map(|p| p.abs()).sum();
        let br_scale: f64 = br.iter().map(|p| p.abs()).sum();
        err += mag * (8.0 * EPS * br_scale + 4.0 * EPS * bracket.abs() * (1.0 + ln_scale));
        let small = term.abs() <= ctl.rel_term_tol * sum.value().abs();
        if small && mag < prev_mag {
            quiet += 1;
            if quiet >= 2 {
                return Inner {
                    sum: sum.value(),
                    err: err + term.abs(),
                    terms: j + 1,
                    converged: true,
                };
            }
        } else {
            quiet = 0;
        }
        prev_mag = mag;
    }
    Inner {
        sum: sum.value(),
        err: f64::INFINITY,
        terms: ctl.max_inner_terms,
        converged: false,
    }
}

/// Sums the cross-term series; non-convergence is reported in the result.
pub fn cross_series(
    sys: &SystemModel,
    modulation: &ModulationScheme,
    corr: &CorrelationModel,
    ctl: &SeriesControl,
) -> Result<CrossSeries> {
    ctl.validate()?;
    let (a, b, scale) = modulation.q_form();
    let m = sys.m();
    let rho = corr.rho();
    let d = sys.omega() * (1.0 - rho) / m;
    let ln_lambda = a.ln() + 2.0 * d.ln();
    let mut total = CompensatedSum::new();
    let mut err = 0.0;
    let mut quiet = 0;
    let mut max_inner = 0;
    for k in 0..ctl.max_outer_terms {
        let kf = k as f64;
        let ln_w = if k == 0 {
            m * (1.0 - rho).ln()
        } else {
            lg(m + kf) - lg(m) - lg(kf + 1.0) + kf * rho.ln() + m * (1.0 - rho).ln()
        };
        let inner = inner_sum(m + kf, b, ln_lambda, ln_w, ctl);
        max_inner = max_inner.max(inner.terms);
        if !inner.converged {
            return Ok(CrossSeries {
                value: scale * (total.value() + inner.sum),
                abs_error_estimate: f64::INFINITY,
                outer_terms: k + 1,
                max_inner_terms: max_inner,
                converged: false,
            });
        }
        total.add(inner.sum);
        err += inner.err;
        if inner.sum.abs() <= ctl.rel_term_tol * total.value().abs() {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if rho == 0.0 || quiet >= 2 {
            // Remaining weights decay at least geometrically in ρ.
            let tail = inner.sum.abs() * rho / (1.0 - rho);
            let value = scale * total.value();
            let abs_error_estimate = scale * (err + tail + total.rounding_error());
            return Ok(CrossSeries {
                value,
                abs_error_estimate,
                outer_terms: k + 1,
                max_inner_terms: max_inner,
                converged: true,
            });
        }
    }
    Ok(CrossSeries {
        value: scale * total.value(),
        abs_error_estimate: f64::INFINITY,
        outer_terms: ctl.max_outer_terms,
        max_inner_terms: max_inner,
        converged: false,
    })
}

/// ∫ CEP(y) f_y(y) dy by adaptive quadrature over the product density.
pub fn cross_quadrature(
    sys: &SystemModel,
    modulation: &ModulationScheme,
    corr: &CorrelationModel,
    ctl: &QuadratureControl,
) -> Result<EvalResult> {
    let (a, _, _) = modulation.q_form();
    let om = sys.omega();
    let f = |y: f64| {
        modulation.cep(y).unwrap_or(f64::NAN) * pdf_product(y, sys, corr).unwrap_or(f64::NAN)
    };
    integrate_half_line(f, &[1.0 / a, om * om], ctl)
}

/// Cross term by series, falling back to quadrature when the series does
/// not converge or its estimated relative error exceeds the tolerance.
pub fn aser_cross(
    sys: &SystemModel,
    modulation: &ModulationScheme,
    corr: &CorrelationModel,
    ctl: &NumericControls,
) -> Result<TaggedValue> {
    ctl.validate()?;
    sys.require_two_streams("aser_cross")?;
    let s = cross_series(sys, modulation, corr, &ctl.series)?;
    let rel = if s.value > 0.0 {
        s.abs_error_estimate / s.value
    } else {
        f64::INFINITY
    };
    if s.converged && rel <= ctl.closed_form_rel_tol {
        return Ok(TaggedValue {
            value: s.value,
            method: MethodTag::Series,
            rel_error_estimate: rel,
            terms_used: s.outer_terms,
        });
    }
    let r = cross_quadrature(sys, modulation, corr, &ctl.quadrature)?;
    if !r.converged {
        return Err(Error::NonConvergence {
            func: "aser_cross",
            terms: r.terms_used,
            partial: r.value,
        });
    }
    Ok(TaggedValue {
        value: r.value,
        method: MethodTag::QuadratureFallback,
        rel_error_estimate: r.rel_error_estimate(),
        terms_used: r.terms_used,
    })
}
