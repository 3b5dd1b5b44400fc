//! Per-stage ASER: the CEP averaged over the stage-1 bound density and the
//! stage-2 density.
//!
//! Both CEP families are written as scale·Q(b, a·x), so every closed form
//! reduces to E[Q(b, aX)]. Each stage has two exact hypergeometric routes:
//! one expanded in Ωa/m (accurate at low SNR) and one in m/(aΩ) or its
//! incomplete-beta equivalent (accurate at high SNR). The route with the
//! smaller estimated error is used; if neither meets the tolerance the value
//! is recomputed by quadrature.

use crate::controls::NumericControls;
use crate::error::{Error, Result};
use crate::fading::{cdf_stage1_actual, pdf_stage1, pdf_stage2, pdf_stage2_exact, SystemModel};
use crate::numerics::{integrate_half_line, QuadratureControl};
use crate::specfun::{hyp2f1, hyp3f2, ln_gamma_unchecked as lg, pfq_series, EvalResult};

use super::{MethodTag, ModulationScheme, TaggedValue};

const EPS: f64 = f64::EPSILON;

/// A closed-form evaluation of E[Q(b, aX)] with its error estimate.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Candidate {
    pub value: f64,
    pub abs_err: f64,
    pub terms: usize,
}

impl Candidate {
    fn rel_err(&self) -> f64 {
        if self.value.is_finite() && self.value != 0.0 {
            self.abs_err / self.value.abs()
        } else {
            f64::INFINITY
        }
    }
}

fn usable(f: &EvalResult) -> bool {
    f.value.is_finite() && f.abs_error_estimate.is_finite()
}

/// 1 − e^{ln_k}·F with error propagation.
fn one_minus(ln_k: f64, f: &EvalResult, ln_terms: f64) -> Option<Candidate> {
    if !usable(f) {
        return None;
    }
    let k = ln_k.exp();
    let kf = k * f.value;
    let value = 1.0 - kf;
    let abs_err = k * f.abs_error_estimate + 4.0 * EPS * (1.0 + kf.abs() * (1.0 + ln_terms));
    Some(Candidate {
        value,
        abs_err,
        terms: f.terms_used,
    })
}

/// Stage 1, expansion in −Ωa/m:
/// 1 − (n−1)a^b Γ(b+m) / [b(b+n−1)Γ(b)Γ(m)(m/Ω)^b] ·
///     ₃F₂(m+b, b, n+b−1; b+1, n+b; −Ωa/m).
pub(crate) fn stage1_low_snr(
    a: f64,
    b: f64,
    sys: &SystemModel,
    ctl: &NumericControls,
) -> Result<Option<Candidate>> {
    let m = sys.m();
    let n = sys.n() as f64;
    let om = sys.omega();
    let f = hyp3f2(
        [m + b, b, n + b - 1.0],
        [b + 1.0, n + b],
        -om * a / m,
        &ctl.specfun,
    )?;
    let parts = [
        (n - 1.0).ln(),
        b * a.ln(),
        lg(b + m),
        -b.ln(),
        -(b + n - 1.0).ln(),
        -lg(b),
        -lg(m),
        -b * (m / om).ln(),
    ];
    let ln_k: f64 = parts.iter().sum();
    let ln_terms: f64 = parts.iter().map(|p| p.abs()).sum();
    Ok(one_minus(ln_k, &f, ln_terms))
}

/// Stage 1, expansion in z = m/(aΩ):
/// Γ(n−1+b)Γ(m−n+1) z^{n−1} / (Γ(b)Γ(m))
///   − (n−1) z^m Γ(m+b) / (Γ(b)Γ(m) m (m−n+1)) · ₃F₂(m−n+1, m, m+b; m−n+2, m+1; −z).
pub(crate) fn stage1_high_snr(
    a: f64,
    b: f64,
    sys: &SystemModel,
    ctl: &NumericControls,
) -> Result<Option<Candidate>> {
    let m = sys.m();
    let n = sys.n() as f64;
    let z = m / (a * sys.omega());
    let f = hyp3f2(
        [m - n + 1.0, m, m + b],
        [m - n + 2.0, m + 1.0],
        -z,
        &ctl.specfun,
    )?;
    if !usable(&f) {
        return Ok(None);
    }
    let p1 = [
        lg(n - 1.0 + b),
        lg(m - n + 1.0),
        (n - 1.0) * z.ln(),
        -lg(b),
        -lg(m),
    ];
    let p2 = [
        (n - 1.0).ln(),
        m * z.ln(),
        lg(m + b),
        -lg(b),
        -lg(m),
        -m.ln(),
        -(m - n + 1.0).ln(),
    ];
    let t1 = p1.iter().sum::<f64>().exp();
    let c2 = p2.iter().sum::<f64>().exp();
    let t2 = c2 * f.value;
    let value = t1 - t2;
    let ln_terms: f64 = p1.iter().chain(p2.iter()).map(|p| p.abs()).sum();
    let abs_err = c2 * f.abs_error_estimate + 4.0 * EPS * (t1.abs() + t2.abs()) * (1.0 + ln_terms);
    Ok(Some(Candidate {
        value,
        abs_err,
        terms: f.terms_used,
    }))
}

/// Stage 2, expansion in −a/c with c = 2m/Ω:
/// 1 − a^b Γ(m+b) / (bΓ(b)Γ(m)c^b) · ₂F₁(b, m+b; b+1; −a/c).
pub(crate) fn stage2_low_snr(
    a: f64,
    b: f64,
    sys: &SystemModel,
    ctl: &NumericControls,
) -> Result<Option<Candidate>> {
    let m = sys.m();
    let c = 2.0 * m / sys.omega();
    let f = match hyp2f1(b, m + b, b + 1.0, -a / c, &ctl.specfun) {
        Ok(f) => f,
        Err(Error::NonConvergence { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let parts = [b * a.ln(), lg(m + b), -b.ln(), -lg(b), -lg(m), -b * c.ln()];
    let ln_k: f64 = parts.iter().sum();
    let ln_terms: f64 = parts.iter().map(|p| p.abs()).sum();
    Ok(one_minus(ln_k, &f, ln_terms))
}

/// Stage 2 as a regularized incomplete beta, I_w(m, b) with w = c/(a+c):
/// w^m (1−w)^b / (m B(m, b)) · ₂F₁(m+b, 1; m+1; w). All terms are positive.
pub(crate) fn stage2_high_snr(
    a: f64,
    b: f64,
    sys: &SystemModel,
    ctl: &NumericControls,
) -> Result<Option<Candidate>> {
    let m = sys.m();
    let c = 2.0 * m / sys.omega();
    let w = c / (a + c);
    let f = pfq_series(&[m + b, 1.0], &[m + 1.0], w, &ctl.specfun);
    if f.terms_used >= ctl.specfun.max_terms || !usable(&f) {
        return Ok(None);
    }
    let parts = [
        m * w.ln(),
        b * (a / (a + c)).ln(),
        -m.ln(),
        lg(m + b),
        -lg(m),
        -lg(b),
    ];
    let pre = parts.iter().sum::<f64>().exp();
    let value = pre * f.value;
    let ln_terms: f64 = parts.iter().map(|p| p.abs()).sum();
    let abs_err = pre * f.abs_error_estimate + 4.0 * EPS * value.abs() * (1.0 + ln_terms);
    Ok(Some(Candidate {
        value,
        abs_err,
        terms: f.terms_used,
    }))
}

/// A route whose special functions cannot be evaluated at these arguments
/// (for instance a transformed argument that rounds onto a branch point)
/// simply offers no candidate; quadrature remains as the fallback.
fn route(r: Result<Option<Candidate>>) -> Option<Candidate> {
    r.ok().flatten()
}

fn best(cands: [Option<Candidate>; 2]) -> Option<Candidate> {
    cands
        .into_iter()
        .flatten()
        .filter(|c| c.value.is_finite())
        .min_by(|x, y| x.rel_err().total_cmp(&y.rel_err()))
}

fn quadrature_knots(a: f64, sys: &SystemModel) -> [f64; 2] {
    [1.0 / a, sys.omega()]
}

/// ∫ CEP(x) f₁(x) dx by adaptive quadrature.
pub fn aser_stage1_quadrature(
    sys: &SystemModel,
    modulation: &ModulationScheme,
    ctl: &QuadratureControl,
) -> Result<EvalResult> {
    sys.require_two_streams("aser_stage1")?;
    let (a, _, _) = modulation.q_form();
    integrate_half_line(
        |x| modulation.cep(x).unwrap_or(f64::NAN) * pdf_stage1(x, sys).unwrap_or(f64::NAN),
        &quadrature_knots(a, sys),
        ctl,
    )
}

/// ∫ CEP(x) f₂(x) dx by adaptive quadrature.
pub fn aser_stage2_quadrature(
    sys: &SystemModel,
    modulation: &ModulationScheme,
    ctl: &QuadratureControl,
) -> Result<EvalResult> {
    let (a, _, _) = modulation.q_form();
    integrate_half_line(
        |x| modulation.cep(x).unwrap_or(f64::NAN) * pdf_stage2(x, sys).unwrap_or(f64::NAN),
        &quadrature_knots(a, sys),
        ctl,
    )
}

fn finish(
    func: &'static str,
    cand: Option<Candidate>,
    scale: f64,
    ctl: &NumericControls,
    quadrature: impl FnOnce() -> Result<EvalResult>,
) -> Result<TaggedValue> {
    if let Some(c) = cand {
        if c.rel_err() <= ctl.closed_form_rel_tol {
            return Ok(TaggedValue {
                value: scale * c.value,
                method: MethodTag::ClosedForm,
                rel_error_estimate: c.rel_err(),
                terms_used: c.terms,
            });
        }
    }
    let r = quadrature()?;
    if !r.converged {
        return Err(Error::NonConvergence {
            func,
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

/// Stage-1 ASER averaged over the incomplete-gamma bound density.
///
/// For binary schemes the value lies in [0, ½]. The M-ary CEP is a high-SNR
/// approximation and the result may exceed 1 at low SNR; it is not clamped.
pub fn aser_stage1(
    sys: &SystemModel,
    modulation: &ModulationScheme,
    ctl: &NumericControls,
) -> Result<TaggedValue> {
    ctl.validate()?;
    sys.require_two_streams("aser_stage1")?;
    let (a, b, scale) = modulation.q_form();
    let cand = best([
        route(stage1_low_snr(a, b, sys, ctl)),
        route(stage1_high_snr(a, b, sys, ctl)),
    ]);
    finish("aser_stage1", cand, scale, ctl, || {
        aser_stage1_quadrature(sys, modulation, &ctl.quadrature)
    })
}

/// Stage-2 ASER averaged over the stage-2 SNR density.
pub fn aser_stage2(
    sys: &SystemModel,
    modulation: &ModulationScheme,
    ctl: &NumericControls,
) -> Result<TaggedValue> {
    ctl.validate()?;
    sys.require_two_streams("aser_stage2")?;
    let (a, b, scale) = modulation.q_form();
    let cand = best([
        route(stage2_low_snr(a, b, sys, ctl)),
        route(stage2_high_snr(a, b, sys, ctl)),
    ]);
    finish("aser_stage2", cand, scale, ctl, || {
        aser_stage2_quadrature(sys, modulation, &ctl.quadrature)
    })
}

/// Stage-1 ASER over the actual (unbounded) stage-1 SNR law,
/// ∫ F₁,actual(x)·(−CEP′(x)) dx. Nested quadrature; slow but free of the
/// bounding step.
pub fn aser_stage1_actual(
    sys: &SystemModel,
    modulation: &ModulationScheme,
    ctl: &QuadratureControl,
) -> Result<f64> {
    sys.require_two_streams("aser_stage1_actual")?;
    let (a, _, _) = modulation.q_form();
    let inner = QuadratureControl {
        rel_tol: (ctl.rel_tol * 0.1).max(1e-13),
        ..*ctl
    };
    let r = integrate_half_line(
        |x| {
            if x == 0.0 {
                return 0.0;
            }
            cdf_stage1_actual(x, sys, &inner).unwrap_or(f64::NAN) * modulation.neg_cep_derivative(x)
        },
        &quadrature_knots(a, sys),
        ctl,
    )?;
    converged("aser_stage1_actual", r)
}

/// Stage-2 ASER over the exact min-of-two stage-2 density.
pub fn aser_stage2_actual(
    sys: &SystemModel,
    modulation: &ModulationScheme,
    ctl: &QuadratureControl,
) -> Result<f64> {
    sys.require_two_streams("aser_stage2_actual")?;
    let (a, _, _) = modulation.q_form();
    let r = integrate_half_line(
        |x| modulation.cep(x).unwrap_or(f64::NAN) * pdf_stage2_exact(x, sys).unwrap_or(f64::NAN),
        &quadrature_knots(a, sys),
        ctl,
    )?;
    converged("aser_stage2_actual", r)
}

fn converged(func: &'static str, r: EvalResult) -> Result<f64> {
    if !r.converged {
        return Err(Error::NonConvergence {
            func,
            terms: r.terms_used,
            partial: r.value,
        });
    }
    Ok(r.value)
}
