//! SNR statistics of the two detection stages of a 2×n ordered ZF-SIC
//! receiver under the normalized Nakagami-m model.
//!
//! Every per-link quantity is driven by a Gamma law with shape
//! m = 2·n·m_N and mean Ω. All inputs are linear SNR values.

mod correlated;
mod general;

pub use correlated::{pdf_bivariate, pdf_product};
pub use general::{cdf_stage1_general, ExponentReading};

use crate::error::{Error, Result};
use crate::numerics::{integrate_segments, QuadratureControl};
use crate::specfun::{
    ln_gamma, ln_gamma_unchecked, ln_upper_unchecked, reg_lower_unchecked, reg_upper_unchecked,
};

/// Gamma-distributed SNR with shape `m` and mean `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrDistribution {
    m: f64,
    omega: f64,
}

impl SnrDistribution {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() || !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::domain(
                "SnrDistribution",
                format!("requires finite m > 0 and omega > 0, got m = {m}, omega = {omega}"),
            ));
        }
        Ok(Self { m, omega })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Rate parameter m/Ω.
    pub fn rate(&self) -> f64 {
        self.m / self.omega
    }

    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        check_x("pdf_snr", x)?;
        let c = self.rate();
        if x == 0.0 {
            return Ok(if self.m == 1.0 {
                c.ln()
            } else if self.m > 1.0 {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            });
        }
        Ok(self.m * c.ln() - ln_gamma_unchecked(self.m) + (self.m - 1.0) * x.ln() - c * x)
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.ln_pdf(x).map(f64::exp)
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        check_x("cdf_snr", x)?;
        Ok(reg_lower_unchecked(self.m, self.rate() * x))
    }

    /// 1 − cdf, computed without cancellation.
    pub fn ccdf(&self, x: f64) -> Result<f64> {
        check_x("cdf_snr", x)?;
        Ok(reg_upper_unchecked(self.m, self.rate() * x))
    }
}

/// Antenna configuration and fading severity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemModel {
    n: u32,
    l: u32,
    m_n: f64,
    omega: f64,
}

impl SystemModel {
    /// `n` receive and `l` transmit antennas, per-link shape `m_n`,
    /// average SNR `omega` (linear).
    pub fn new(n: u32, l: u32, m_n: f64, omega: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(
                "SystemModel",
                format!("n must be at least 2, got {n}"),
            ));
        }
        if l < 2 || l > n {
            return Err(Error::domain(
                "SystemModel",
                format!("l must satisfy 2 <= l <= n, got l = {l}, n = {n}"),
            ));
        }
        if !(m_n >= 0.5) || !m_n.is_finite() {
            return Err(Error::domain(
                "SystemModel",
                format!("m_N must be >= 0.5, got {m_n}"),
            ));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::domain(
                "SystemModel",
                format!("omega must be positive, got {omega}"),
            ));
        }
        Ok(Self { n, l, m_n, omega })
    }

    /// The 2×n configuration used by all closed forms.
    pub fn two_by(n: u32, m_n: f64, omega: f64) -> Result<Self> {
        Self::new(n, 2, m_n, omega)
    }

    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        Self::new(self.n, self.l, self.m_n, omega)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m_n(&self) -> f64 {
        self.m_n
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Normalized shape m = 2·n·m_N.
    pub fn m(&self) -> f64 {
        2.0 * self.n as f64 * self.m_n
    }

    pub fn snr(&self) -> SnrDistribution {
        SnrDistribution {
            m: self.m(),
            omega: self.omega,
        }
    }

    pub(crate) fn require_two_streams(&self, func: &'static str) -> Result<()> {
        if self.l != 2 {
            return Err(Error::domain(
                func,
                format!("closed form needs l = 2, got l = {}", self.l),
            ));
        }
        Ok(())
    }
}

/// Correlation coefficient between the stage-1 and stage-2 SNRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationModel {
    rho: f64,
}

impl CorrelationModel {
    pub fn new(rho: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(Error::domain(
                "CorrelationModel",
                format!("rho must lie in [0, 1), got {rho}"),
            ));
        }
        Ok(Self { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

fn check_x(func: &'static str, x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return Err(Error::domain(func, format!("requires x >= 0, got {x}")));
    }
    Ok(())
}

/// Per-link SNR density f_x.
pub fn pdf_snr(x: f64, sys: &SystemModel) -> Result<f64> {
    sys.snr().pdf(x)
}

/// Per-link SNR CDF F_x.
pub fn cdf_snr(x: f64, sys: &SystemModel) -> Result<f64> {
    sys.snr().cdf(x)
}

/// Upper bound F₁ on the stage-1 SNR CDF:
/// [ (cx)^{n−1} Γ(m−n+1, cx) + γ(m, cx) ] / Γ(m), c = m/Ω.
pub fn cdf_stage1_bound(x: f64, sys: &SystemModel) -> Result<f64> {
    check_x("cdf_stage1_bound", x)?;
    sys.require_two_streams("cdf_stage1_bound")?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let m = sys.m();
    let n = sys.n() as f64;
    let cx = sys.snr().rate() * x;
    let head =
        ((n - 1.0) * cx.ln() + ln_upper_unchecked(m - n + 1.0, cx) - ln_gamma_unchecked(m)).exp();
    Ok((head + reg_lower_unchecked(m, cx)).min(1.0))
}

/// Density of the stage-1 bound:
/// (n−1) c^{n−1} x^{n−2} Γ(m−n+1, cx) / Γ(m).
pub fn pdf_stage1(x: f64, sys: &SystemModel) -> Result<f64> {
    check_x("pdf_stage1", x)?;
    sys.require_two_streams("pdf_stage1")?;
    let m = sys.m();
    let n = sys.n() as f64;
    let c = sys.snr().rate();
    if x == 0.0 && sys.n() > 2 {
        return Ok(0.0);
    }
    let ln_pow = if sys.n() == 2 {
        0.0
    } else {
        (n - 2.0) * x.ln()
    };
    Ok(
        ((n - 1.0).ln() + (n - 1.0) * c.ln() + ln_pow + ln_upper_unchecked(m - n + 1.0, c * x)
            - ln_gamma_unchecked(m))
        .exp(),
    )
}

/// Point in (0, 1) near which F_x(x/t) turns over; a useful breakpoint for
/// the stage-1 integrals.
pub(crate) fn stage1_breakpoints(x: f64, sys: &SystemModel) -> Vec<f64> {
    let t0 = sys.snr().rate() * x / sys.m();
    let mut pts = vec![0.0];
    for t in [0.25 * t0, t0, 4.0 * t0] {
        if t > 1e-12 && t < 1.0 - 1e-12 {
            pts.push(t);
        }
    }
    pts.push(1.0);
    pts
}

/// Actual stage-1 SNR CDF (n−1)∫₀¹ F_x(x/t)² t^{n−2} dt, by quadrature.
pub fn cdf_stage1_actual(x: f64, sys: &SystemModel, ctl: &QuadratureControl) -> Result<f64> {
    check_x("cdf_stage1_actual", x)?;
    sys.require_two_streams("cdf_stage1_actual")?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let d = sys.snr();
    let n = sys.n() as i32;
    let f = |t: f64| {
        let q = d.cdf(x / t).unwrap_or(1.0);
        q * q * t.powi(n - 2)
    };
    let r = integrate_segments(f, &stage1_breakpoints(x, sys), ctl)?;
    if !r.converged {
        return Err(Error::NonConvergence {
            func: "cdf_stage1_actual",
            terms: r.terms_used,
            partial: r.value,
        });
    }
    Ok(((n - 1) as f64 * r.value).min(1.0))
}

/// 1 − (1 − F)², computed from whichever of F and 1 − F is smaller so
/// that neither tail loses precision.
fn min_of_two_cdf(d: &SnrDistribution, x: f64) -> Result<f64> {
    let f = d.cdf(x)?;
    if f <= 0.5 {
        Ok(f * (2.0 - f))
    } else {
        let c = d.ccdf(x)?;
        Ok(1.0 - c * c)
    }
}

/// Exact stage-2 SNR CDF with the noise-doubled argument:
/// 2F_x(2x) − F_x(2x)² = 1 − (1 − F_x(2x))².
pub fn cdf_stage2_exact(x: f64, sys: &SystemModel) -> Result<f64> {
    check_x("cdf_stage2_exact", x)?;
    min_of_two_cdf(&sys.snr(), 2.0 * x)
}

/// The same min-of-two form evaluated at x instead of 2x.
pub fn cdf_stage2_exact_unscaled(x: f64, sys: &SystemModel) -> Result<f64> {
    check_x("cdf_stage2_exact_unscaled", x)?;
    min_of_two_cdf(&sys.snr(), x)
}

/// Medium/high-SNR approximation 2F_x(2x), without clamping.
pub fn cdf_stage2_approx_unclamped(x: f64, sys: &SystemModel) -> Result<f64> {
    check_x("cdf_stage2_approx", x)?;
    Ok(2.0 * sys.snr().cdf(2.0 * x)?)
}

/// Medium/high-SNR approximation 2F_x(2x), clamped to 1.
pub fn cdf_stage2_approx(x: f64, sys: &SystemModel) -> Result<f64> {
    cdf_stage2_approx_unclamped(x, sys).map(|v| v.min(1.0))
}

/// Stage-2 SNR density: Gamma with shape m and mean Ω/2.
pub fn pdf_stage2(x: f64, sys: &SystemModel) -> Result<f64> {
    check_x("pdf_stage2", x)?;
    SnrDistribution::new(sys.m(), 0.5 * sys.omega())?.pdf(x)
}

/// Derivative of the unclamped [`cdf_stage2_approx_unclamped`], 4·f_x(2x).
/// It carries total mass 2.
pub fn pdf_stage2_approx(x: f64, sys: &SystemModel) -> Result<f64> {
    check_x("pdf_stage2_approx", x)?;
    Ok(2.0 * pdf_stage2(x, sys)?)
}

/// Derivative of [`cdf_stage2_exact`], 4·f_x(2x)·(1 − F_x(2x)).
pub fn pdf_stage2_exact(x: f64, sys: &SystemModel) -> Result<f64> {
    check_x("pdf_stage2_exact", x)?;
    Ok(pdf_stage2_approx(x, sys)? * sys.snr().ccdf(2.0 * x)?)
}

/// ln C(n, k) for real-valued arguments.
pub(crate) fn ln_binomial(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0).unwrap_or(f64::NAN)
        - ln_gamma(k + 1.0).unwrap_or(f64::NAN)
        - ln_gamma(n - k + 1.0).unwrap_or(f64::NAN)
}
