mod common;

use common::{half_line, rel_err};
use vblast_core::error_rate::*;
use vblast_core::fading::{pdf_product, pdf_stage1, pdf_stage2};
use vblast_core::specfun::erfc;
use vblast_core::{db_to_linear, CorrelationModel, NumericControls, SeriesControl, SystemModel};

fn sys(n: u32, m_n: f64, omega: f64) -> SystemModel {
    SystemModel::two_by(n, m_n, omega).unwrap()
}

fn ctl() -> NumericControls {
    NumericControls::default()
}

fn omega_grid() -> Vec<f64> {
    (0..=5).map(|i| db_to_linear(4.0 * i as f64)).collect()
}

#[test]
fn cep_reference_values() {
    let bpsk = ModulationScheme::bpsk();
    assert_eq!(cep_binary(0.0, &bpsk).unwrap(), 0.5);
    assert!((cep_binary(1.0, &bpsk).unwrap() - 0.078_649_603_5).abs() < 1e-10);
    for i in 0..=300 {
        let x = 0.1 * i as f64;
        assert!(
            (cep_binary(x, &bpsk).unwrap() - 0.5 * erfc(x.sqrt())).abs() < 1e-12,
            "x {x}"
        );
    }
    let qam4 = ModulationScheme::qam(4).unwrap();
    assert_eq!(cep_mary(0.0, &qam4).unwrap(), qam4.alpha());
    assert!((cep_mary(4.0, &qam4).unwrap() - 0.045_500_263_9).abs() < 1e-10);
    assert!((cep_mary(4.0, &qam4).unwrap() - erfc(2f64.sqrt())).abs() < 1e-14);
}

#[test]
fn stage1_matches_quadrature() {
    let s = sys(2, 0.5, 1.0);
    let bpsk = ModulationScheme::bpsk();
    let want = half_line(
        |x| bpsk.cep(x).unwrap() * pdf_stage1(x, &s).unwrap(),
        1.0,
        1e-13,
    );
    let got = aser_stage1(&s, &bpsk, &ctl()).unwrap();
    assert!(rel_err(got.value, want) < 1e-8, "{} vs {want}", got.value);
}

#[test]
fn stage1_improves_with_receive_antennas() {
    for om in omega_grid() {
        for m_n in [0.5, 1.0, 2.0] {
            let v: Vec<f64> = [2, 3, 4]
                .iter()
                .map(|&n| {
                    aser_stage1(&sys(n, m_n, om), &ModulationScheme::bpsk(), &ctl())
                        .unwrap()
                        .value
                })
                .collect();
            assert!(v[1] < v[0] && v[2] < v[1], "Ω {om} m_N {m_n}: {v:?}");
        }
    }
}

#[test]
fn stage2_matches_quadrature() {
    // n = 2, m_N = 1 gives m = 4.
    let s = sys(2, 1.0, 10.0);
    let bpsk = ModulationScheme::bpsk();
    let want = half_line(
        |x| bpsk.cep(x).unwrap() * pdf_stage2(x, &s).unwrap(),
        5.0,
        1e-13,
    );
    let got = aser_stage2(&s, &bpsk, &ctl()).unwrap();
    assert!(rel_err(got.value, want) < 1e-8, "{} vs {want}", got.value);
}

#[test]
fn stage2_beats_stage1_at_high_snr() {
    for n in [2, 3, 4] {
        for m_n in [0.5, 1.0, 2.0] {
            let s = sys(n, m_n, db_to_linear(20.0));
            let p1 = aser_stage1(&s, &ModulationScheme::bpsk(), &ctl())
                .unwrap()
                .value;
            let p2 = aser_stage2(&s, &ModulationScheme::bpsk(), &ctl())
                .unwrap()
                .value;
            assert!(p2 < p1, "n {n} m_N {m_n}: {p2} >= {p1}");
        }
    }
}

#[test]
fn cross_term_matches_quadrature_at_low_snr() {
    let s = sys(2, 0.5, 1.0);
    let c = CorrelationModel::new(0.5).unwrap();
    let bpsk = ModulationScheme::bpsk();
    let want = half_line(
        |y| bpsk.cep(y).unwrap() * pdf_product(y, &s, &c).unwrap(),
        1.0,
        1e-12,
    );
    let got = aser_cross(&s, &bpsk, &c, &ctl()).unwrap();
    assert!(rel_err(got.value, want) < 1e-6, "{} vs {want}", got.value);
}

/// Smallest number of outer terms whose partial sum matches the fully
/// converged series to nine significant digits.
fn outer_terms_for_nine_digits(
    s: &SystemModel,
    m: &ModulationScheme,
    c: &CorrelationModel,
) -> Option<usize> {
    let tight = SeriesControl {
        rel_term_tol: 1e-16,
        ..SeriesControl::default()
    };
    let full = cross_series(s, m, c, &tight).unwrap();
    assert!(full.converged);
    (1..=full.outer_terms).find(|&k| {
        let part = cross_series(
            s,
            m,
            c,
            &SeriesControl {
                max_outer_terms: k,
                ..tight
            },
        )
        .unwrap();
        rel_err(part.value, full.value) <= 1e-9
    })
}

#[test]
fn cross_series_converges_quickly_at_strong_correlation() {
    let s = sys(2, 0.5, 10.0);
    let c = CorrelationModel::new(0.7).unwrap();
    for m in [ModulationScheme::bpsk(), ModulationScheme::qam(4).unwrap()] {
        let k = outer_terms_for_nine_digits(&s, &m, &c).unwrap();
        assert!(k <= 10, "{m}: {k} terms");
    }
    // Larger constellations need a few more terms at this SNR.
    let k16 = outer_terms_for_nine_digits(&s, &ModulationScheme::qam(16).unwrap(), &c).unwrap();
    assert!(k16 <= 20, "{k16}");
    let s20 = sys(2, 0.5, 100.0);
    let k16 = outer_terms_for_nine_digits(&s20, &ModulationScheme::qam(16).unwrap(), &c).unwrap();
    assert!(k16 <= 10, "{k16}");
}

#[test]
fn cross_term_is_nonnegative_and_decreasing() {
    for rho in [0.3, 0.5, 0.7] {
        let c = CorrelationModel::new(rho).unwrap();
        let v: Vec<f64> = omega_grid()
            .iter()
            .map(|&om| {
                aser_cross(&sys(2, 0.5, om), &ModulationScheme::bpsk(), &c, &ctl())
                    .unwrap()
                    .value
            })
            .collect();
        assert!(v.iter().all(|x| *x >= 0.0));
        assert!(v.windows(2).all(|w| w[1] < w[0]), "rho {rho}: {v:?}");
    }
}

#[test]
fn total_decreases_in_antennas_and_fading_parameter() {
    let bpsk = ModulationScheme::bpsk();
    let total = |n, m_n, om| aser_total(&sys(n, m_n, om), &bpsk, None, &ctl()).unwrap();
    for om in omega_grid() {
        for m_n in [0.5, 1.0, 2.0] {
            assert!(total(3, m_n, om).total < total(2, m_n, om).total);
            assert!(total(4, m_n, om).total < total(3, m_n, om).total);
        }
        for n in [2, 3, 4] {
            assert!(total(n, 1.0, om).total < total(n, 0.5, om).total);
            assert!(total(n, 2.0, om).total < total(n, 1.0, om).total);
        }
        let b = total(2, 1.0, om);
        assert!(b.total <= b.stage1.value + b.stage2.value);
    }
}

#[test]
fn outage_improves_with_receive_antennas() {
    for x_th in [0.1, 1.0, 3.0] {
        let p2 = outage_stage1(x_th, &sys(2, 1.0, 10.0)).unwrap();
        let p4 = outage_stage1(x_th, &sys(4, 1.0, 10.0)).unwrap();
        assert!(p4 <= p2);
        let c2 = outage_stage2_conditional(x_th, &sys(2, 1.0, 10.0)).unwrap();
        let c4 = outage_stage2_conditional(x_th, &sys(4, 1.0, 10.0)).unwrap();
        assert!(c4 <= c2);
    }
}

#[test]
fn mary_approximation_leaves_probability_range_at_low_snr() {
    // The 16-QAM stage approximations exceed 1 near 0 dB; the total
    // P1 + P2 - P1 P2 then rises with SNR before it falls.
    let q16 = ModulationScheme::qam(16).unwrap();
    let at = |db: f64| aser_total(&sys(2, 0.5, db_to_linear(db)), &q16, None, &ctl()).unwrap();
    let low = at(0.0);
    assert!(low.stage1.value > 1.0 && low.stage2.value > 1.0);
    assert!(at(2.0).total > low.total);
    let valid = at(6.0);
    assert!(valid.stage1.value < 1.0 && at(8.0).total < valid.total);
}

#[test]
fn stage_asers_hold_at_large_shape_and_low_snr() {
    // m = 1600 at -40 dB: the SNR is tiny, so ASER ≈ α − 2α√(β/π) E[√x].
    let s = sys(8, 100.0, db_to_linear(-40.0));
    let q64 = ModulationScheme::qam(64).unwrap();
    let q = ctl().quadrature;
    for (closed, quad) in [
        (
            aser_stage1(&s, &q64, &ctl()).unwrap().value,
            aser_stage1_quadrature(&s, &q64, &q).unwrap().value,
        ),
        (
            aser_stage2(&s, &q64, &ctl()).unwrap().value,
            aser_stage2_quadrature(&s, &q64, &q).unwrap().value,
        ),
    ] {
        assert!(rel_err(closed, quad) < 1e-8, "{closed} vs {quad}");
        assert!(closed < q64.alpha() && closed > 0.99 * q64.alpha());
    }
}
