//! Modified Bessel functions I_ν (real order) and K_0.

use crate::error::{Error, Result};

use super::gamma::{ln_gamma_unchecked, EULER_GAMMA};
use super::sum::CompensatedSum;

const MAX_TERMS: usize = 100_000;
const LN_MAX: f64 = 709.782_712_893_384;

/// ln[ I_ν(z) / (z/2)^ν ] = ln Σ_k (z²/4)^k / (k! Γ(ν+k+1)).
///
/// The reduced function is finite at z = 0 (value −ln Γ(ν+1)), which lets
/// callers cancel (z/2)^ν analytically. The series has positive terms, so it
/// is summed outward from its largest term entirely in scaled form.
pub fn bessel_i_reduced_ln(nu: f64, z: f64) -> Result<f64> {
    if !(nu >= 0.0) || !(z >= 0.0) || !z.is_finite() {
        return Err(Error::domain(
            "bessel_i",
            format!("requires nu >= 0 and finite z >= 0, got nu = {nu}, z = {z}"),
        ));
    }
    let q = 0.25 * z * z;
    if q == 0.0 {
        return Ok(-ln_gamma_unchecked(nu + 1.0));
    }
    if z > 50.0 && z > nu * nu {
        if let Some(ln_i) = ln_i_asymptotic(nu, z) {
            return Ok(ln_i - nu * (0.5 * z).ln());
        }
    }
    reduced_ln_series(nu, q)
}

fn reduced_ln_series(nu: f64, q: f64) -> Result<f64> {
    // Index of the largest term: (k+1)(k+ν+1) ≈ q.
    let peak = ((-(nu + 2.0) + (nu * nu + 4.0 * q).sqrt()) / 2.0)
        .max(0.0)
        .floor();
    let ln_peak =
        peak * q.ln() - ln_gamma_unchecked(peak + 1.0) - ln_gamma_unchecked(nu + peak + 1.0);

    let mut sum = CompensatedSum::new();
    sum.add(1.0);
    let mut terms = 1usize;

    let mut t = 1.0;
    let mut k = peak;
    loop {
        t *= q / ((k + 1.0) * (nu + k + 1.0));
        sum.add(t);
        terms += 1;
        k += 1.0;
        if t < 1e-17 * sum.value() {
            break;
        }
        if terms > MAX_TERMS {
            return Err(Error::NonConvergence {
                func: "bessel_i",
                terms,
                partial: sum.value(),
            });
        }
    }
    let mut t = 1.0;
    let mut k = peak;
    while k > 0.0 {
        t *= k * (nu + k) / q;
        sum.add(t);
        k -= 1.0;
        if t < 1e-17 * sum.value() {
            break;
        }
    }
    Ok(ln_peak + sum.value().ln())
}

/// ln I_ν(z) from e^z/√(2πz) · Σ_k (−1)^k a_k(ν) z^{−k}; `None` if the
/// terms stop shrinking before reaching machine precision.
fn ln_i_asymptotic(nu: f64, z: f64) -> Option<f64> {
    let mu = 4.0 * nu * nu;
    let mut sum = CompensatedSum::new();
    let mut t = 1.0;
    sum.add(t);
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        let next = -t * (mu - odd * odd) / (8.0 * k as f64 * z);
        if next.abs() > t.abs() {
            return None;
        }
        t = next;
        sum.add(t);
        if t.abs() < 1e-17 * sum.value().abs() {
            return Some(z - 0.5 * (2.0 * std::f64::consts::PI * z).ln() + sum.value().ln());
        }
    }
    None
}

/// Modified Bessel function of the first kind I_ν(z), ν ≥ 0, z ≥ 0.
pub fn bessel_i(nu: f64, z: f64) -> Result<f64> {
    let reduced = bessel_i_reduced_ln(nu, z)?;
    if z == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    let ln_value = nu * (0.5 * z).ln() + reduced;
    if ln_value > LN_MAX {
        return Err(Error::Overflow {
            func: "bessel_i",
            log_value: ln_value,
        });
    }
    Ok(ln_value.exp())
}

/// Exponentially scaled e^z K_0(z), z > 0.
pub fn bessel_k0_scaled(z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::domain(
            "bessel_k0",
            format!("requires z > 0, got {z}"),
        ));
    }
    if z.is_infinite() {
        return Ok(0.0);
    }
    if z <= 2.0 {
        Ok(k0_series(z) * z.exp())
    } else {
        Ok(k0_scaled_cf(z))
    }
}

/// Modified Bessel function of the second kind K_0(z), z > 0.
pub fn bessel_k0(z: f64) -> Result<f64> {
    if z > 0.0 && z <= 2.0 {
        return Ok(k0_series(z));
    }
    bessel_k0_scaled(z).map(|s| s * (-z).exp())
}

/// K_0(z) = −(ln(z/2) + γ) I_0(z) + Σ_{k≥1} (z²/4)^k H_k / (k!)².
fn k0_series(z: f64) -> f64 {
    let q = 0.25 * z * z;
    let mut i0 = CompensatedSum::new();
    let mut rest = CompensatedSum::new();
    i0.add(1.0);
    let mut t = 1.0;
    let mut harmonic = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        t *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0.add(t);
        rest.add(t * harmonic);
        if t < 1e-18 {
            break;
        }
    }
    -((0.5 * z).ln() + EULER_GAMMA) * i0.value() + rest.value()
}

/// Steed's continued fraction (Temme's CF2) for e^z K_0(z), z ≥ 2.
fn k0_scaled_cf(z: f64) -> f64 {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..MAX_TERMS {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    (std::f64::consts::PI / (2.0 * z)).sqrt() / s
}
