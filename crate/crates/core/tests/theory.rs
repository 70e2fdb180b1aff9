//! Reference values below were computed at 60 digits with mpmath by
//! `tests/oracle/theory_oracle.py` and frozen.

mod common;

use common::rel_close;
use distomp_core::theory::*;
use distomp_core::Error;

#[test]
fn phi_c_matches_multiprecision() {
    assert_eq!(phi_c(0.0), 0.5);
    assert!(rel_close(phi_c(1.0), 0.158_655_253_931_457_05, 1e-14));
    assert!(rel_close(phi_c(-3.0), 0.998_650_101_968_369_9, 1e-14));
    assert!(rel_close(phi_c(7.5), 3.190_891_672_910_896_2e-14, 1e-13));
}

#[test]
fn log_phi_c_in_the_far_tail() {
    for (t, v) in [
        (8.5, -39.197_396_428_217_67),
        (12.0, -75.410_673_001_568_8),
        (40.0, -804.608_442_013_753_8),
        (300.0, -45_006.622_732_118_66),
    ] {
        assert!(rel_close(log_phi_c(t), v, 1e-13), "t = {t}: {}", log_phi_c(t));
    }
    assert_eq!(phi_c(40.0), 0.0f64.max(phi_c(40.0)));
    assert!(log_phi_c(1e4).is_finite());
}

#[test]
fn gordon_sandwich_dense_grid() {
    for i in 1..=400 {
        let t = i as f64 * 0.05;
        let (lo, hi) = gordon_bounds(t);
        let p = phi_c(t);
        assert!(lo <= p && p <= hi, "t = {t}: {lo} {p} {hi}");
    }
}

#[test]
fn tail_lemma_grid_and_extremes() {
    assert!(tail_lemma_check(0.0, 0.0));
    for i in 0..=24 {
        for j in 0..=24 {
            let (a, b) = (i as f64 * 0.25, j as f64 * 0.25);
            assert!(tail_lemma_check(a, b), "a = {a}, b = {b}");
        }
    }
    assert!(tail_lemma_check(8.0, 8.0));
    assert!(tail_lemma_check(50.0, 30.0));
}

#[test]
fn theta_crit_values() {
    let e2 = std::f64::consts::E * std::f64::consts::E;
    assert!(rel_close(theta_crit(0.0, 10, e2, 1, 1.0).unwrap(), 2.0, 1e-15));
    assert!(rel_close(
        theta_crit(0.1, 10, 2000.0, 3, 1.0).unwrap(),
        7.797_898_414_081_621,
        1e-14
    ));
    assert!(matches!(theta_crit(0.2, 10, 2000.0, 3, 1.0), Err(Error::MipViolated(_))));
}

fn params(theta_min_scaled: f64) -> TheoryParams {
    TheoryParams {
        d: 2000,
        k: 3,
        n: 1800,
        sigma: 1.0,
        mu_max: 0.05,
        theta_min_scaled,
        epsilon: 0.4,
    }
}

#[test]
fn snr_square_law_and_round_trip() {
    let tc = theta_crit(0.05, 1800, 2000.0, 3, 1.0).unwrap();
    assert!(rel_close(snr_r(&params(tc)).unwrap(), 1.0, 1e-15));
    assert!(rel_close(snr_r(&params(0.5 * tc)).unwrap(), 0.25, 1e-15));
    let r = snr_r(&params(3.7)).unwrap();
    assert!(rel_close(r.sqrt() * tc, 3.7, 1e-14));
}

#[test]
fn f_and_machine_count_match_multiprecision() {
    let f = f_prob(2000.0, 3, 0.05, 0.5).unwrap();
    assert!(rel_close(f, 0.092_242_618_845_589_48, 1e-12), "{f}");
    assert_eq!(machines_needed(2000.0, 3, 0.05, 0.5).unwrap(), 660);
    assert_eq!(machines_needed(100.0, 2, 0.05, 0.6).unwrap(), 211);
}

#[test]
fn f_at_r_one_is_half_the_leading_factor() {
    let d: f64 = 2000.0;
    let nb = nu_b(3, 0.05);
    let lead = 1.0 - (nb / (std::f64::consts::PI * d.ln())).sqrt() * d.powf(1.0 - 1.0 / nb);
    assert!(rel_close(f_prob(d, 3, 0.05, 1.0).unwrap(), 0.5 * lead, 1e-14));
}

#[test]
fn injected_f_gives_ceiling_of_eight_ln_d() {
    for d in [10.0f64, 2000.0, 1e6] {
        assert_eq!(machines_from_f(d, 1.0).unwrap(), (8.0 * d.ln()).ceil() as u64);
    }
    assert!(machines_from_f(100.0, 0.0).is_err());
}

#[test]
fn tiny_dimension_is_degenerate() {
    assert!(matches!(
        f_prob(2.0, 3, 0.3, 0.5),
        Err(Error::DegenerateDimension(_)) | Err(Error::MipViolated(_))
    ));
    assert!(matches!(f_prob(1.2, 1, 0.0, 0.5), Err(Error::DegenerateDimension(_))));
}

#[test]
fn machine_count_is_infeasible_beyond_cap() {
    match machines_needed(1e12, 1, 0.02, 1e-6) {
        Err(Error::Infeasible { log_value }) => assert!(log_value > 1e12f64.ln()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn q_quantities_match_multiprecision() {
    let q = q_quantities(2000.0, 3, 0.05, 0.4).unwrap();
    assert!(rel_close(q.q0, 0.715_916_359_345_090_7, 1e-13), "{}", q.q0);
    assert!(rel_close(q.q1, 2.008_999_066_453_858_4, 1e-13), "{}", q.q1);
    assert!(rel_close(q.q2, 1.099_397_144_863_523_3, 1e-13), "{}", q.q2);
    assert!(rel_close(q.nu_a, 0.994_736_842_105_263_2, 1e-15));
    assert!(rel_close(q.nu_b, 0.991_697_368_421_052_6, 1e-15));
    assert!(rel_close(q.mu_d_max, 0.005_263_157_894_736_842, 1e-15));
}

/// `Q1 -> epsilon` and `Q2 -> sqrt(2) / (1 + sqrt(2))` only as `Q0 -> 0`, and
/// `Q0` decays like `1 / ln d`; at `d = 1e8` the gap is still about 0.3.
#[test]
fn q_limits_for_large_d_and_small_mu() {
    let (mu, eps) = (1e-3, 1e-2);
    let target = 2f64.sqrt() / (1.0 + 2f64.sqrt());
    let mut prev = (f64::INFINITY, f64::INFINITY);
    for e in [2, 4, 8, 16, 32, 64, 128, 256] {
        let d = 10f64.powi(e);
        let q = q_quantities(d, 3, mu, eps).unwrap();
        let gaps = (q.q1 - eps, q.q2 - target);
        assert!(gaps.0 > 0.0 && gaps.1 > 0.0, "d = 1e{e}: {gaps:?}");
        assert!(gaps.0 < prev.0 && gaps.1 < prev.1, "d = 1e{e}: {gaps:?}");
        prev = gaps;
    }
    assert!(prev.1 < 0.06, "{prev:?}");
    let q = q_quantities(1e8, 3, mu, eps).unwrap();
    let sa = nu_a(3, mu).sqrt();
    let s = (2.0 + 4.0 * mu).sqrt();
    let by_hand = s * (1.0 + sa * (1.0 - mu) * q.q0.sqrt()) / (sa * (1.0 - mu) + s);
    assert!(rel_close(q.q2, by_hand, 1e-15));
}

#[test]
fn q0_times_ln_d_is_bounded() {
    let vals: Vec<f64> = [1e2, 1e3, 1e4, 1e5, 1e6]
        .iter()
        .map(|&d: &f64| q0(d, 2, 0.02).unwrap() * d.ln())
        .collect();
    let max = vals.iter().cloned().fold(0.0, f64::max);
    let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max / min < 1.5, "{vals:?}");
}

#[test]
fn k1_paths_agree_with_general_formulas() {
    for &d in &[100.0, 2000.0, 1e6] {
        for &mu in &[0.0, 0.01, 0.1, 0.3] {
            for &r in &[0.2, 0.5, 0.9] {
                let g = f_prob(d, 1, mu, r).unwrap();
                let s = f_prob_k1(d, mu, r).unwrap();
                assert!(rel_close(g, s, 1e-15), "F d={d} mu={mu} r={r}: {g} vs {s}");
            }
            let (g0, s0) = (q0(d, 1, mu).unwrap(), q0_k1(d, mu).unwrap());
            assert!(rel_close(g0, s0, 1e-15), "Q0 d={d} mu={mu}");
            let (g1, s1) = (q1(d, 1, mu, 0.5).unwrap(), q1_k1(d, mu, 0.5).unwrap());
            assert!(rel_close(g1, s1, 1e-15), "Q1 d={d} mu={mu}");
            // the sparsity-one Q2 display is a tighter bound, equal only at mu = 0
            let (g2, s2) = (q2(d, 1, mu).unwrap(), q2_k1(d, mu).unwrap());
            if mu == 0.0 {
                assert!(rel_close(g2, s2, 1e-15));
            } else {
                assert!(g2 > s2);
            }
        }
    }
}

#[test]
fn monotonicity_in_r() {
    for &(d, k, mu) in &[(2000.0, 3, 0.05), (200.0, 1, 0.2), (1e5, 2, 0.01)] {
        let grid: Vec<f64> = (1..=40).map(|i| i as f64 * 0.025).collect();
        let fs: Vec<f64> = grid.iter().map(|&r| f_prob(d, k, mu, r).unwrap()).collect();
        assert!(fs.windows(2).all(|w| w[1] > w[0]), "F not increasing at {d} {k} {mu}");
        let ms: Vec<u64> = (3..=9)
            .map(|i| machines_needed(d, k, mu, i as f64 / 10.0).unwrap())
            .collect();
        assert!(ms.windows(2).all(|w| w[1] <= w[0]), "{ms:?}");
    }
}

#[test]
fn machine_count_nondecreasing_in_mu() {
    for &r in &[0.3, 0.6] {
        let ms: Vec<u64> = [0.0, 0.01, 0.02, 0.05, 0.08, 0.1]
            .iter()
            .map(|&mu| machines_needed(2000.0, 3, mu, r).unwrap())
            .collect();
        assert!(ms.windows(2).all(|w| w[1] >= w[0]), "{ms:?}");
    }
}

#[test]
fn nu_positive_under_max_mip() {
    for k in 1..=10usize {
        let bound = 1.0 / (2 * k - 1) as f64;
        for i in 0..100 {
            let mu = bound * i as f64 / 100.0;
            assert!(nu_a(k, mu) > 0.0 && nu_b(k, mu) > 0.0, "k={k} mu={mu}");
        }
    }
}

#[test]
fn epsilon_bounds_fractions() {
    assert_eq!(epsilon_bounds(0.0, 3).0, 0.0);
    assert!(rel_close(epsilon_bounds(0.25, 1).0, 1.0 / 3.0, 1e-15));
    assert!(rel_close(epsilon_bounds(0.08, 3).0, 2.0 / 7.0, 1e-15));
    assert_eq!(epsilon_bounds(0.08, 3).1, 1.0);
    assert!(epsilon_lower_bound_tight(0.08, 3) <= epsilon_bounds(0.08, 3).0);
}

#[test]
fn threshold_tc_cases() {
    let (d, k, mu, r) = (100.0, 2, 0.05, 0.6);
    let mc = machines_needed(d, k, mu, r).unwrap() as usize;
    let flat = vec![r; mc];
    assert!(rel_close(threshold_tc(&flat, d, k, mu, r).unwrap(), 4.0 * d.ln(), 1e-15));
    let above = vec![0.8; mc];
    assert!(threshold_tc(&above, d, k, mu, r).unwrap() > 4.0 * d.ln());
    let mixed: Vec<f64> = (0..mc).map(|i| r + (1.0 - r) * (i % 7) as f64 / 6.0).collect();
    let tc = threshold_tc(&mixed, d, k, mu, r).unwrap();
    assert!(rel_close(tc, 28.720_527_925_726_6, 1e-12), "{tc}");
    let mut low = flat.clone();
    low[5] = 0.5;
    assert!(matches!(threshold_tc(&low, d, k, mu, r), Err(Error::RhoBelowR(5))));
    assert!(threshold_tc(&flat[1..], d, k, mu, r).is_err());
}

#[test]
fn report_verdicts() {
    let loose = TheoryParams {
        d: 2000,
        k: 1,
        n: 1800,
        sigma: 1.0,
        mu_max: 0.4,
        theta_min_scaled: 100.0,
        epsilon: 0.5,
    };
    let rep = check_theorem(&loose, u64::MAX);
    assert!(rep.coherence_ok && rep.max_mip_ok && rep.eps_ok && rep.snr_ok && rep.machines_ok);
    assert!(rep.all_ok, "{:?}", rep.notes);

    let bad = TheoryParams { mu_max: 0.6, ..loose };
    let rep = check_theorem(&bad, u64::MAX);
    assert!(!rep.coherence_ok && !rep.all_ok);

    // hand evaluation at K = 3, mu = 0.05, eps = 0.4
    let p = params(12.0);
    let rep = check_theorem(&p, 70);
    let r = (12.0 / theta_crit(0.05, 1800, 2000.0, 3, 1.0).unwrap()).powi(2);
    assert!(rel_close(rep.r.unwrap(), r, 1e-15));
    assert!(rep.max_mip_ok);
    assert!(11.0 * 0.05 - 6.0 * 0.05 * 0.05 < 1.0 && rep.coherence_ok);
    let lo = (0.1f64).sqrt() / (1.0 + 0.1f64.sqrt());
    assert_eq!(rep.eps_ok, 0.4 > lo);
    let thr = 2.008_999_066_453_858_4f64.min(1.099_397_144_863_523_3).powi(2);
    assert_eq!(rep.snr_ok, r > thr);
    let mc = machines_needed(2000.0, 3, 0.05, r).unwrap();
    assert_eq!(rep.m_tilde, Some(mc));
    assert_eq!(rep.machines_needed, Some(9 * mc));
    assert!(!rep.machines_ok);
    assert_eq!(rep.comm_bits_predicted, Some(6 * 3 * mc * 11));
}
