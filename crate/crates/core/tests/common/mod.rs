//! Double-exponential quadrature used as an oracle independent of the
//! library's Gauss–Kronrod code.

#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::FRAC_PI_2;

const MAX_LEVEL: u32 = 14;

fn refine<N: Fn(f64) -> Option<(f64, f64)>, F: Fn(f64) -> f64>(
    f: &F,
    node: N,
    t_lo: f64,
    t_hi: f64,
    tol: f64,
) -> f64 {
    let add = |t: f64, sum: &mut f64| {
        if let Some((x, w)) = node(t) {
            if w > 0.0 && w.is_finite() {
                let y = f(x);
                assert!(y.is_finite(), "integrand is {y} at {x}");
                *sum += w * y;
            }
        }
    };
    let mut h = 1.0;
    let mut sum = 0.0;
    let mut t = t_lo.ceil();
    while t <= t_hi {
        add(t, &mut sum);
        t += 1.0;
    }
    let mut prev = sum * h;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut t = (t_lo / h).ceil() * h;
        if ((t / h) as i64) % 2 == 0 {
            t += h;
        }
        while t <= t_hi {
            add(t, &mut sum);
            t += 2.0 * h;
        }
        let cur = sum * h;
        if level >= 4 && (cur - prev).abs() <= tol * cur.abs() {
            return cur;
        }
        prev = cur;
    }
    panic!("double-exponential quadrature did not reach {tol}: last {prev}");
}

/// ∫_a^b f by tanh–sinh; tolerates integrable endpoint singularities.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let w = b - a;
    let node = |t: f64| {
        let u = FRAC_PI_2 * t.sinh();
        let x = if t < 0.0 {
            a + w / (1.0 + (-2.0 * u).exp())
        } else {
            b - w / (1.0 + (2.0 * u).exp())
        };
        if !(x > a && x < b) {
            return None;
        }
        let c = u.cosh();
        Some((x, w * FRAC_PI_2 * t.cosh() / (2.0 * c * c)))
    };
    refine(&f, node, -4.0, 4.0, tol)
}

/// ∫_a^∞ f by exp–sinh with x = a + s·exp(π/2·sinh t).
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, scale: f64, tol: f64) -> f64 {
    let node = |t: f64| {
        let e = (FRAC_PI_2 * t.sinh()).exp();
        let x = a + scale * e;
        if !(x > a) || !x.is_finite() {
            return None;
        }
        Some((x, scale * e * FRAC_PI_2 * t.cosh()))
    };
    refine(&f, node, -5.0, 4.0, tol)
}

/// ∫_0^∞ f split at `knot`: tanh–sinh below, exp–sinh above.
pub fn half_line<F: Fn(f64) -> f64>(f: F, knot: f64, tol: f64) -> f64 {
    tanh_sinh(&f, 0.0, knot, tol) + exp_sinh(&f, knot, knot, tol)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    ((got - want) / want).abs()
}

/// Central finite difference.
pub fn derivative<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = 1e-5 * x.max(1e-3);
    (f(x + h) - f(x - h)) / (2.0 * h)
}

pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}
