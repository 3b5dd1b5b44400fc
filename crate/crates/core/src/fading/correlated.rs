//! Joint statistics of two correlated Gamma SNRs with common shape m and
//! mean Ω (the Kibble bivariate gamma law) and the density of their product.

use crate::error::{Error, Result};
use crate::specfun::{bessel_i_reduced_ln, bessel_k0_scaled, ln_gamma_unchecked};

use super::{CorrelationModel, SystemModel};

/// Joint density of (x₁, x₂). With θ = Ω/m and d = θ(1−ρ):
///
/// f(x₁,x₂) = (x₁x₂/d)^{m−1} · Ĩ_{m−1}(2√(ρx₁x₂)/d) · e^{−(x₁+x₂)/d}
///            / (Γ(m) θ^{m+1} (1−ρ)),
///
/// where Ĩ_ν(z) = I_ν(z)/(z/2)^ν. Evaluated in the log domain.
pub fn pdf_bivariate(x1: f64, x2: f64, sys: &SystemModel, corr: &CorrelationModel) -> Result<f64> {
    if !(x1 >= 0.0) || !(x2 >= 0.0) {
        return Err(Error::domain(
            "pdf_bivariate",
            format!("requires x1, x2 >= 0, got ({x1}, {x2})"),
        ));
    }
    let rho = corr.rho();
    if rho == 0.0 {
        let d = sys.snr();
        return Ok(d.pdf(x1)? * d.pdf(x2)?);
    }
    if x1 == 0.0 || x2 == 0.0 {
        return Ok(0.0);
    }
    let m = sys.m();
    let theta = sys.omega() / m;
    let d = theta * (1.0 - rho);
    let z = 2.0 * (rho * x1 * x2).sqrt() / d;
    let ln_f = (m - 1.0) * ((x1 * x2).ln() - d.ln()) + bessel_i_reduced_ln(m - 1.0, z)?
        - (x1 + x2) / d
        - ln_gamma_unchecked(m)
        - (m + 1.0) * theta.ln()
        - (1.0 - rho).ln();
    Ok(ln_f.exp())
}

/// Density of y = x₁·x₂:
///
/// f_y(y) = 2 y^{m−1} Ĩ_{m−1}(2√(ρy)/d) K₀(2√y/d) / (Γ(m) θ^{2m} (1−ρ)^m).
pub fn pdf_product(y: f64, sys: &SystemModel, corr: &CorrelationModel) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::domain(
            "pdf_product",
            format!("requires finite y > 0, got {y}"),
        ));
    }
    let rho = corr.rho();
    let m = sys.m();
    let theta = sys.omega() / m;
    let d = theta * (1.0 - rho);
    let s = y.sqrt();
    let zk = 2.0 * s / d;
    let zi = 2.0 * (rho * y).sqrt() / d;
    let ln_f = std::f64::consts::LN_2
        + (m - 1.0) * y.ln()
        + bessel_i_reduced_ln(m - 1.0, zi)?
        + bessel_k0_scaled(zk)?.ln()
        - zk
        - ln_gamma_unchecked(m)
        - 2.0 * m * theta.ln()
        - m * (1.0 - rho).ln();
    Ok(ln_f.exp())
}
