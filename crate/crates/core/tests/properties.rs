use proptest::prelude::*;
use vblast_core::error_rate::*;
use vblast_core::fading::*;
use vblast_core::harness::{format_float, parse_snr_grid};
use vblast_core::numerics::integrate_finite;
use vblast_core::sim::{pearson, Constellation};
use vblast_core::specfun::*;
use vblast_core::{
    db_to_linear, Execution, NumericControls, QuadratureControl, SpecialFnControl, SystemModel,
};

fn system() -> impl Strategy<Value = SystemModel> {
    (
        2u32..=4,
        prop::sample::select(vec![0.5, 1.0, 1.5, 2.0]),
        -5.0f64..25.0,
    )
        .prop_map(|(n, m_n, db)| SystemModel::two_by(n, m_n, db_to_linear(db)).unwrap())
}

fn modulation() -> impl Strategy<Value = ModulationScheme> {
    prop::sample::select(vec![
        ModulationScheme::bpsk(),
        ModulationScheme::bfsk(),
        ModulationScheme::dpsk(),
        ModulationScheme::qam(4).unwrap(),
        ModulationScheme::qam(16).unwrap(),
        ModulationScheme::qam(64).unwrap(),
    ])
}

fn binary() -> impl Strategy<Value = ModulationScheme> {
    prop::sample::select(vec![
        ModulationScheme::bpsk(),
        ModulationScheme::bfsk(),
        ModulationScheme::dpsk(),
    ])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn incomplete_gamma_halves_sum_to_one(a in 0.05f64..60.0, z in 0.0f64..150.0) {
        let sum = reg_lower_gamma(a, z).unwrap() + upper_gamma(a, z).unwrap() / gamma(a).unwrap();
        if gamma(a).unwrap().is_finite() {
            prop_assert!((sum - 1.0).abs() < 1e-11, "{}", sum);
        }
    }

    #[test]
    fn digamma_recurrence(a in 0.1f64..50.0) {
        let r = digamma(a + 1.0).unwrap() - digamma(a).unwrap() - 1.0 / a;
        prop_assert!(r.abs() < 1e-11);
    }

    #[test]
    fn hyp2f1_pfaff_consistency(a in 0.1f64..4.0, b in 0.1f64..4.0, c in 0.6f64..5.0) {
        let ctl = SpecialFnControl::default();
        let z = -0.4;
        let direct = hyp2f1_series(a, b, c, z, &ctl).unwrap();
        let pfaff = (1.0 - z).powf(-a) * hyp2f1_series(a, c - b, c, z / (z - 1.0), &ctl).unwrap().value;
        prop_assert!(((direct.value - pfaff) / pfaff).abs() < 1e-10);
    }

    #[test]
    fn bessel_functions_are_positive(nu in 0.0f64..20.0, z in 1e-3f64..200.0) {
        prop_assert!(bessel_i(nu, z).unwrap() > 0.0);
        prop_assert!(bessel_k0(z).unwrap() > 0.0);
    }

    #[test]
    fn quadrature_is_additive(split in 0.05f64..0.95, k in 0.5f64..8.0) {
        let ctl = QuadratureControl::default();
        let f = |t: f64| (k * t).sin() * (-t).exp() + t.sqrt();
        let whole = integrate_finite(f, 0.0, 1.0, &ctl).unwrap();
        let left = integrate_finite(f, 0.0, split, &ctl).unwrap();
        let right = integrate_finite(f, split, 1.0, &ctl).unwrap();
        let tol = whole.abs_error_estimate + left.abs_error_estimate + right.abs_error_estimate + 1e-14;
        prop_assert!((left.value + right.value - whole.value).abs() <= tol);
    }

    #[test]
    fn binary_cep_is_a_decreasing_probability(m in binary(), x in 0.0f64..40.0, dx in 1e-3f64..5.0) {
        let a = m.cep(x).unwrap();
        let b = m.cep(x + dx).unwrap();
        prop_assert!((0.0..=0.5).contains(&a));
        prop_assert!(b < a || a == 0.0);
    }

    #[test]
    fn cdfs_are_monotone_probabilities(s in system(), x in 0.0f64..50.0, dx in 1e-3f64..10.0) {
        type Cdf = fn(f64, &SystemModel) -> vblast_core::Result<f64>;
        let cdfs: [Cdf; 4] = [cdf_snr, cdf_stage1_bound, cdf_stage2_exact, cdf_stage2_approx];
        for f in cdfs {
            let lo = f(x, &s).unwrap();
            let hi = f(x + dx, &s).unwrap();
            prop_assert!((0.0..=1.0).contains(&lo) && lo <= hi);
        }
        prop_assert!(pdf_snr(x, &s).unwrap() >= 0.0);
        prop_assert!(pdf_stage1(x, &s).unwrap() >= 0.0);
        prop_assert!(pdf_stage2(x, &s).unwrap() >= 0.0);
    }

    #[test]
    fn bound_dominates_actual_cdf(s in system(), x in 1e-3f64..100.0) {
        let bound = cdf_stage1_bound(x, &s).unwrap();
        let actual = cdf_stage1_actual(x, &s, &QuadratureControl::default()).unwrap();
        prop_assert!(bound >= actual - 1e-12);
    }

    #[test]
    fn stage_asers_match_quadrature(s in system(), m in modulation()) {
        let ctl = NumericControls::default();
        for (tagged, oracle) in [
            (aser_stage1(&s, &m, &ctl).unwrap(), aser_stage1_quadrature(&s, &m, &ctl.quadrature).unwrap()),
            (aser_stage2(&s, &m, &ctl).unwrap(), aser_stage2_quadrature(&s, &m, &ctl.quadrature).unwrap()),
        ] {
            prop_assert!(((tagged.value - oracle.value) / oracle.value).abs() < 1e-8, "{:?} vs {}", tagged, oracle.value);
        }
    }

    #[test]
    fn binary_asers_are_bounded_and_decrease_with_snr(s in system(), m in binary(), step_db in 0.5f64..6.0) {
        let ctl = NumericControls::default();
        let better = s.with_omega(s.omega() * db_to_linear(step_db)).unwrap();
        let b = aser_total(&s, &m, None, &ctl).unwrap();
        let b2 = aser_total(&better, &m, None, &ctl).unwrap();
        // The total is a union of two stage events and may exceed one half.
        for v in [b.stage1.value, b.stage2.value] {
            prop_assert!((0.0..=0.5 + 1e-12).contains(&v));
        }
        prop_assert!((0.0..=1.0).contains(&b.total));
        prop_assert!(b.total <= b.stage1.value + b.stage2.value);
        prop_assert!(b2.stage1.value < b.stage1.value);
        prop_assert!(b2.stage2.value < b.stage2.value);
        prop_assert!(b2.total < b.total);
    }

    #[test]
    fn unconditional_outage_has_stage1_floor(s in system(), m in modulation(), x_th in 0.0f64..30.0) {
        let ctl = NumericControls::default();
        let p1 = aser_stage1(&s, &m, &ctl).unwrap().value;
        // The M-ary approximation is not a probability at very low SNR.
        prop_assume!(p1 <= 1.0);
        let v = outage_stage2_unconditional(x_th, &s, &m, &ctl).unwrap().value;
        prop_assert!(v >= p1);
        prop_assert!(outage_stage1(x_th, &s).unwrap() <= outage_stage1(x_th * 1.5 + 0.1, &s).unwrap());
    }

    #[test]
    fn cross_term_is_nonnegative(db in 6.0f64..20.0, rho in 0.05f64..0.9, m in modulation()) {
        let s = SystemModel::two_by(2, 0.5, db_to_linear(db)).unwrap();
        let c = vblast_core::CorrelationModel::new(rho).unwrap();
        prop_assert!(aser_cross(&s, &m, &c, &NumericControls::default()).unwrap().value >= 0.0);
    }

    #[test]
    fn snr_grid_parsing(lo in -20i32..20, span in 0i32..30, step in 1i32..6) {
        let hi = lo + span;
        let g = parse_snr_grid(&format!("{lo}:{hi}:{step}")).unwrap();
        prop_assert_eq!(g[0], lo as f64);
        prop_assert!(*g.last().unwrap() <= hi as f64 + 1e-9);
        prop_assert!(g.windows(2).all(|w| w[1] > w[0]));
        prop_assert_eq!(g.len() as i32, span / step + 1);
    }

    #[test]
    fn float_format_keeps_twelve_digits(x in prop::num::f64::NORMAL) {
        let s = format_float(x);
        let back: f64 = s.parse().unwrap();
        prop_assert!(((back - x) / x).abs() <= 5e-12, "{} -> {}", x, s);
        let mantissa = s.trim_start_matches('-').split('e').next().unwrap().replace('.', "");
        prop_assert_eq!(mantissa.len(), 12);
    }

    #[test]
    fn execution_preserves_order(count in 0u64..500, threads in 1usize..6) {
        let par = Execution::Parallel { threads }.map(count, |i| i * i);
        let seq = Execution::Sequential.map(count, |i| i * i);
        prop_assert_eq!(par, seq);
    }

    #[test]
    fn constellation_points_slice_to_themselves(order in prop::sample::select(vec![4u32, 16, 64])) {
        let c = Constellation::from_modulation(&ModulationScheme::qam(order).unwrap()).unwrap();
        let energy: f64 = (0..c.size()).map(|i| c.point(i).norm_sqr()).sum::<f64>() / c.size() as f64;
        prop_assert!((energy - 1.0).abs() < 1e-12);
        for i in 0..c.size() {
            prop_assert_eq!(c.slice(c.point(i)), i);
        }
    }

    #[test]
    fn pearson_is_affine_invariant(xs in prop::collection::vec(-10.0f64..10.0, 3..50), a in 0.5f64..4.0, b in -3.0f64..3.0) {
        let ys: Vec<f64> = xs.iter().map(|x| (x * 1.7).sin() + 0.3 * x).collect();
        if let Ok(r) = pearson(&xs, &ys) {
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&r));
            let zs: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let r2 = pearson(&zs, &ys).unwrap();
            prop_assert!((r - r2).abs() < 1e-9);
        }
    }
}
