//! First-stage SNR CDF for l×n ordered ZF-SIC, by quadrature.

use crate::error::{Error, Result};
use crate::numerics::{integrate_segments, QuadratureControl};

use super::{check_x, ln_binomial, stage1_breakpoints, SystemModel};

/// Power applied to F_x inside the l×n stage-1 integral.
///
/// `Full` raises F_x to the power l; at l = 2 it reproduces the actual
/// stage-1 CDF. `Bounding` uses the power l − 1; at l = 2 it reproduces the
/// incomplete-gamma upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentReading {
    Full,
    Bounding,
}

/// C(n−1, l−1)(l−1) ∫₀¹ F_x(x/t)^p t^{n−l} (1−t)^{l−2} dt with p chosen by
/// `reading`.
pub fn cdf_stage1_general(
    x: f64,
    sys: &SystemModel,
    reading: ExponentReading,
    ctl: &QuadratureControl,
) -> Result<f64> {
    check_x("cdf_stage1_general", x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let n = sys.n() as i32;
    let l = sys.l() as i32;
    let p = match reading {
        ExponentReading::Full => l,
        ExponentReading::Bounding => l - 1,
    };
    let d = sys.snr();
    let f = |t: f64| {
        let q = d.cdf(x / t).unwrap_or(1.0);
        q.powi(p) * t.powi(n - l) * (1.0 - t).powi(l - 2)
    };
    let r = integrate_segments(f, &stage1_breakpoints(x, sys), ctl)?;
    if !r.converged {
        return Err(Error::NonConvergence {
            func: "cdf_stage1_general",
            terms: r.terms_used,
            partial: r.value,
        });
    }
    let ln_c = ln_binomial((n - 1) as f64, (l - 1) as f64) + ((l - 1) as f64).ln();
    Ok((ln_c.exp() * r.value).min(1.0))
}
