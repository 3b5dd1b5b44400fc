//! Gauss ₂F₁ and ₃F₂ hypergeometric functions for real parameters and real
//! argument z < 1.

use crate::controls::SpecialFnControl;
use crate::error::{Error, Result};

use super::sum::CompensatedSum;
use super::EvalResult;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

fn same_param(x: f64, y: f64) -> bool {
    (x - y).abs() <= 1e-14 * x.abs().max(y.abs()).max(1.0)
}

/// Sums the defining series Σ_k Π(a_i)_k / Π(b_j)_k · z^k / k!.
///
/// Truncates once |term| ≤ rel_tol·|sum| for two consecutive indices, or
/// when a numerator parameter terminates the series. If the term cap is
/// hit the result carries `converged = false` and `terms_used = max_terms`.
pub fn pfq_series(num: &[f64], den: &[f64], z: f64, ctl: &SpecialFnControl) -> EvalResult {
    let mut sum = CompensatedSum::new();
    sum.add(1.0);
    let mut term = 1.0;
    let mut quiet = 0;
    let mut last_ratio = 0.0;
    let mut finished = false;
    let mut terms = 1;
    while terms < ctl.max_terms {
        let k = (terms - 1) as f64;
        let mut ratio = z / (k + 1.0);
        for &a in num {
            ratio *= a + k;
        }
        for &b in den {
            ratio /= b + k;
        }
        term *= ratio;
        last_ratio = ratio.abs();
        terms += 1;
        if term == 0.0 {
            finished = true;
            last_ratio = 0.0;
            break;
        }
        sum.add(term);
        let tail = if last_ratio < 1.0 {
            term.abs() * last_ratio.max(0.5) / (1.0 - last_ratio)
        } else {
            f64::INFINITY
        };
        if term.abs().max(tail) <= ctl.rel_tol * sum.value().abs() {
            quiet += 1;
            if quiet >= 2 {
                finished = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let value = sum.value();
    let tail = if last_ratio < 1.0 {
        term.abs() * last_ratio / (1.0 - last_ratio)
    } else {
        term.abs()
    };
    let abs_error_estimate = sum.rounding_error() + tail;
    EvalResult {
        value,
        abs_error_estimate,
        terms_used: terms,
        converged: finished && abs_error_estimate <= ctl.rel_tol * value.abs(),
    }
}

fn check_den(func: &'static str, den: &[f64]) -> Result<()> {
    for &b in den {
        if !b.is_finite() || is_nonpositive_integer(b) {
            return Err(Error::domain(
                func,
                format!("denominator parameter {b} is a nonpositive integer"),
            ));
        }
    }
    Ok(())
}

/// Direct summation of the ₂F₁ defining series (|z| < 1 or terminating).
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64, ctl: &SpecialFnControl) -> Result<EvalResult> {
    check_den("hyp2f1", &[c])?;
    let terminating = is_nonpositive_integer(a) || is_nonpositive_integer(b);
    if !(z.abs() < 1.0) && !terminating {
        return Err(Error::domain(
            "hyp2f1",
            format!("series requires |z| < 1, got {z}"),
        ));
    }
    let r = pfq_series(&[a, b], &[c], z, ctl);
    if r.terms_used >= ctl.max_terms {
        return Err(Error::NonConvergence {
            func: "hyp2f1",
            terms: r.terms_used,
            partial: r.value,
        });
    }
    Ok(r)
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for real z < 1.
///
/// Non-negative z is summed directly. Negative z is first mapped into
/// (0, 1) with a Pfaff transformation, preferring the variant whose series
/// terminates.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64, ctl: &SpecialFnControl) -> Result<EvalResult> {
    check_den("hyp2f1", &[c])?;
    if !(z < 1.0) {
        return Err(Error::domain("hyp2f1", format!("requires z < 1, got {z}")));
    }
    if z == 0.0 {
        return Ok(EvalResult::exact(1.0));
    }
    if z > 0.0 {
        return hyp2f1_series(a, b, c, z, ctl);
    }
    let w = z / (z - 1.0);
    let ln_1mz = (-z).ln_1p();
    // (1-z)^{-a} F(a, c-b; c; w)  or  (1-z)^{-b} F(c-a, b; c; w)
    let use_b_form = (is_nonpositive_integer(c - a) || is_nonpositive_integer(b))
        && !(is_nonpositive_integer(a) || is_nonpositive_integer(c - b));
    let (p, q, exponent) = if use_b_form {
        (c - a, b, b)
    } else {
        (a, c - b, a)
    };
    let inner = hyp2f1_series(p, q, c, w, ctl)?;
    let pre = (-exponent * ln_1mz).exp();
    let mut r = inner.scaled(pre);
    r.abs_error_estimate += 4.0 * f64::EPSILON * (1.0 + (exponent * ln_1mz).abs()) * r.value.abs();
    r.converged = inner.converged && r.abs_error_estimate <= ctl.rel_tol * r.value.abs();
    Ok(r)
}

fn from_2f1(res: Result<EvalResult>) -> Result<EvalResult> {
    match res {
        Ok(r) => Ok(r),
        Err(Error::NonConvergence { terms, .. }) => Ok(EvalResult {
            terms_used: terms,
            ..EvalResult::not_converged()
        }),
        Err(e) => Err(e),
    }
}

/// Finds two numerator/denominator pairs with b_j = a_i + 1 and distinct
/// a_i; returns (remaining numerator, first paired a, second paired a).
fn contiguous_pairs(a: &[f64; 3], b: &[f64; 2]) -> Option<(f64, f64, f64)> {
    let pairs_with =
        |j: usize| -> Vec<usize> { (0..3).filter(|&i| same_param(a[i] + 1.0, b[j])).collect() };
    for &i0 in &pairs_with(0) {
        for &i1 in &pairs_with(1) {
            if i0 != i1 && !same_param(a[i0], a[i1]) {
                let rest = 3 - i0 - i1;
                return Some((a[rest], a[i0], a[i1]));
            }
        }
    }
    None
}

/// Generalized hypergeometric function ₃F₂(a₁, a₂, a₃; b₁, b₂; z), z < 1.
///
/// Evaluation strategy:
/// - a numerator equal to a denominator reduces to ₂F₁;
/// - |z| ≤ 0.5 sums the defining series;
/// - when two numerators sit one below the two denominators,
///   ₃F₂(r, p, q; p+1, q+1; z) = [q·₂F₁(r, p; p+1; z) − p·₂F₁(r, q; q+1; z)]/(q − p),
///   which continues the function to all z < 0;
/// - otherwise the series is used inside the unit disc.
///
/// For |z| beyond `ctl.hyp3f2_series_max`, or when no route applies, the
/// result is NaN with `converged = false`; callers are expected to switch
/// to an integral representation.
pub fn hyp3f2(a: [f64; 3], b: [f64; 2], z: f64, ctl: &SpecialFnControl) -> Result<EvalResult> {
    check_den("hyp3f2", &b)?;
    if !(z < 1.0) {
        return Err(Error::domain("hyp3f2", format!("requires z < 1, got {z}")));
    }
    if z == 0.0 {
        return Ok(EvalResult::exact(1.0));
    }
    for i in 0..3 {
        for j in 0..2 {
            if same_param(a[i], b[j]) {
                let rest: Vec<f64> = (0..3).filter(|&k| k != i).map(|k| a[k]).collect();
                return from_2f1(hyp2f1(rest[0], rest[1], b[1 - j], z, ctl));
            }
        }
    }
    if z.abs() > ctl.hyp3f2_series_max {
        return Ok(EvalResult::not_converged());
    }
    if z.abs() <= 0.5 {
        return Ok(pfq_series(&a, &b, z, ctl));
    }
    if let Some((r, p, q)) = contiguous_pairs(&a, &b) {
        let fp = match from_2f1(hyp2f1(r, p, p + 1.0, z, ctl))? {
            f if f.value.is_finite() => f,
            f => return Ok(f),
        };
        let fq = match from_2f1(hyp2f1(r, q, q + 1.0, z, ctl))? {
            f if f.value.is_finite() => f,
            f => return Ok(f),
        };
        let denom = q - p;
        let value = (q * fp.value - p * fq.value) / denom;
        let magnitude = (q * fp.value).abs() + (p * fq.value).abs();
        let abs_error_estimate = ((q * fp.abs_error_estimate).abs()
            + (p * fq.abs_error_estimate).abs()
            + 4.0 * f64::EPSILON * magnitude)
            / denom.abs();
        return Ok(EvalResult {
            value,
            abs_error_estimate,
            terms_used: fp.terms_used + fq.terms_used,
            converged: fp.converged
                && fq.converged
                && abs_error_estimate <= ctl.rel_tol * value.abs(),
        });
    }
    if z.abs() < 1.0 {
        return Ok(pfq_series(&a, &b, z, ctl));
    }
    Ok(EvalResult::not_converged())
}
