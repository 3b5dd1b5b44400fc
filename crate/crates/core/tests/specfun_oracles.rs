mod common;

use common::{exp_sinh, rel_err, tanh_sinh};
use vblast_core::specfun::*;
use vblast_core::SpecialFnControl;

const SQRT_PI: f64 = 1.772_453_850_905_516;

#[test]
fn lower_gamma_matches_direct_series() {
    let (a, z) = (2.5, 3.0);
    // γ(a, z) = z^a e^{-z} Σ z^k / (a (a+1) ... (a+k))
    let mut term = 1.0 / a;
    let mut sum = term;
    for k in 1..200 {
        term *= z / (a + k as f64);
        sum += term;
    }
    let lower = z.powf(a) * (-z).exp() * sum;
    let want = lower / (0.75 * SQRT_PI);
    let got = reg_lower_gamma(a, z).unwrap();
    assert!(rel_err(got, want) < 1e-12, "{got} vs {want}");
}

#[test]
fn upper_gamma_matches_quadrature() {
    let (a, z) = (4.5, 10.0);
    let want = exp_sinh(|t: f64| t.powf(a - 1.0) * (-t).exp(), z, 1.0, 1e-13);
    let got = upper_gamma(a, z).unwrap();
    assert!(rel_err(got, want) < 1e-10, "{got} vs {want}");
}

#[test]
fn digamma_matches_recurrence_and_asymptotics() {
    let x = 7.5;
    let shift = 30.0;
    let y: f64 = x + shift;
    let asym = y.ln() - 0.5 / y - 1.0 / (12.0 * y.powi(2)) + 1.0 / (120.0 * y.powi(4))
        - 1.0 / (252.0 * y.powi(6))
        + 1.0 / (240.0 * y.powi(8));
    let want = asym - (0..30).map(|k| 1.0 / (x + k as f64)).sum::<f64>();
    let got = digamma(x).unwrap();
    assert!((got - want).abs() < 1e-13, "{got} vs {want}");
    // Half-integer closed form.
    let exact =
        -EULER_GAMMA - 2.0 * 2f64.ln() + (1..=7).map(|k| 2.0 / (2 * k - 1) as f64).sum::<f64>();
    assert!((got - exact).abs() < 1e-13);
}

#[test]
fn erfc_matches_defining_integral() {
    let want = 2.0 / SQRT_PI * exp_sinh(|t: f64| (-t * t).exp(), 1.0, 1.0, 1e-14);
    assert!((erfc(1.0) - want).abs() < 1e-14);
    assert!((erfc(1.0) - 0.157_299_207_0).abs() < 1e-10);
}

#[test]
fn bessel_i_matches_power_series() {
    let (nu, z) = (1.5f64, 2.0f64);
    let mut sum = 0.0;
    for k in 0..60 {
        let kf = k as f64;
        sum += ((nu + 2.0 * kf) * (0.5 * z).ln()
            - ln_gamma(kf + 1.0).unwrap()
            - ln_gamma(nu + kf + 1.0).unwrap())
        .exp();
    }
    let got = bessel_i(nu, z).unwrap();
    assert!(rel_err(got, sum) < 1e-13, "{got} vs {sum}");
}

#[test]
fn bessel_k0_matches_integral() {
    let want = exp_sinh(|t: f64| (-t.cosh()).exp(), 0.0, 1.0, 1e-14);
    let got = bessel_k0(1.0).unwrap();
    assert!(rel_err(got, want) < 1e-12, "{got} vs {want}");
    assert!((got - 0.421_024_438_2).abs() < 1e-10);
}

#[test]
fn hyp2f1_matches_euler_integral_far_outside_unit_disc() {
    // With b = 1/2, c = 3/2 the Euler kernel is t^{-1/2} (1 - zt)^{-a}, prefactor 1/2.
    let z = -40.0;
    let want = 0.5
        * tanh_sinh(
            |t: f64| t.powf(-0.5) * (1.0 - z * t).powf(-2.5),
            0.0,
            1.0,
            1e-14,
        );
    let got = hyp2f1(0.5, 2.5, 1.5, z, &SpecialFnControl::default()).unwrap();
    assert!(got.converged);
    assert!(rel_err(got.value, want) < 1e-9, "{} vs {want}", got.value);
}

#[test]
fn hyp3f2_matches_euler_integral() {
    // 3F2(2, 1/2, 3; 3/2, 4; z) = 3 ∫ t² 2F1(2, 1/2; 3/2; zt) dt, and
    // 2F1(2, 1/2; 3/2; -y) = [1/(1+y) + atan(√y)/√y] / 2.
    let z = -5.0;
    let inner = |t: f64| {
        let y = -z * t;
        let s = y.sqrt();
        0.5 * (1.0 / (1.0 + y) + if s > 0.0 { s.atan() / s } else { 1.0 })
    };
    let want = 3.0 * tanh_sinh(|t| t * t * inner(t), 0.0, 1.0, 1e-14);
    let got = hyp3f2([2.0, 0.5, 3.0], [1.5, 4.0], z, &SpecialFnControl::default()).unwrap();
    assert!(got.converged);
    assert!(rel_err(got.value, want) < 1e-9, "{} vs {want}", got.value);
}

#[test]
fn evaluations_are_pure() {
    let ctl = SpecialFnControl::default();
    for _ in 0..3 {
        assert_eq!(
            hyp2f1(0.5, 2.5, 1.5, -40.0, &ctl).unwrap().value.to_bits(),
            hyp2f1(0.5, 2.5, 1.5, -40.0, &ctl).unwrap().value.to_bits()
        );
        assert_eq!(
            bessel_k0(0.3).unwrap().to_bits(),
            bessel_k0(0.3).unwrap().to_bits()
        );
    }
}
