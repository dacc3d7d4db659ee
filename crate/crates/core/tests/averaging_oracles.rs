//! Averaged rates against quadrature and Monte-Carlo oracles built directly
//! on the instantaneous rates.

use hsps_core::gaussian_model::{conditional_g2, g_si2_instant, triple_rate};
use hsps_core::time_averaging::Method;
use hsps_core::{Averager, Channel, Channels, DetectorParams, ResponseModel, SpdcParams, WindowParams};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dets(i: f64, s1: f64, s2: f64) -> Channels<DetectorParams> {
    let d = DetectorParams::default();
    Channels { i: d.with_jitter(i), s1: d.with_jitter(s1), s2: d.with_jitter(s2) }
}

fn overlap(a0: f64, a1: f64, b0: f64, b1: f64) -> f64 {
    (a1.min(b1) - a0.max(b0)).max(0.0)
}

#[test]
fn pair_rate_matches_quadrature() {
    // correlation width comparable to the kernels so the exact path matters
    let p = SpdcParams::new(1e6, 0.3e-9).unwrap();
    let (di, ds, w) = (0.35e-9, 0.2e-9, 0.39e-9);
    let a =
        Averager::new(p, ResponseModel::continuous(&dets(di, ds, ds), &WindowParams::new(w).unwrap()), Method::Exact)
            .unwrap();
    let n = 1200;
    for &tau in &[0.0, 0.25e-9, 0.6e-9, 1.1e-9] {
        // window integrated in closed form, jitters by midpoint rule
        let mut acc = 0.0;
        for a_ in 0..n {
            let ji = -di + (a_ as f64 + 0.5) * 2.0 * di / n as f64;
            for b in 0..n {
                let js = -ds + (b as f64 + 0.5) * 2.0 * ds / n as f64;
                let c = tau + js - ji;
                acc += overlap(-0.5 * p.corr_width - c, 0.5 * p.corr_width - c, -w, w) / (2.0 * w);
            }
        }
        let prob = acc / (n * n) as f64;
        let want = p.pair_rate.powi(2) + p.cross_density() * prob;
        let got = a.averaged_pair_rate(Channel::S1, tau);
        assert!((got / want - 1.0).abs() < 2e-5, "tau={tau}: {got} vs {want}");
    }
}

#[test]
fn triple_rate_matches_monte_carlo() {
    let p = SpdcParams::new(1e6, 0.5e-9).unwrap();
    let d = dets(0.35e-9, 0.3e-9, 0.25e-9);
    let w = 0.39e-9;
    let a = Averager::new(p, ResponseModel::continuous(&d, &WindowParams::new(w).unwrap()), Method::Exact).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut u = |h: f64| (2.0 * rng.random::<f64>() - 1.0) * h;
    let n = 1_000_000;
    for &tau in &[0.0, 0.3e-9, 0.9e-9] {
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let m = u(d.i.jitter_half_width);
            let x1 = u(w) + u(d.s1.jitter_half_width) - m;
            let x2 = tau + u(w) + u(d.s2.jitter_half_width) - m;
            let v = triple_rate(&p, x1, x2, 0.0);
            s += v;
            s2 += v * v;
        }
        let mean = s / n as f64;
        let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
        let got = a.averaged_triple_rate(tau);
        assert!((got - mean).abs() < 4.5 * se, "tau={tau}: {got} vs {mean} ± {se}");
    }
}

#[test]
fn smoothed_triple_rate_matches_monte_carlo() {
    let p = SpdcParams::new(1e6, 0.5e-9).unwrap();
    let d = dets(0.2e-9, 0.3e-9, 0.3e-9);
    let a = Averager::new(p, ResponseModel::continuous(&d, &WindowParams::new(1e-9).unwrap()), Method::Exact).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut u = |h: f64| (2.0 * rng.random::<f64>() - 1.0) * h;
    let n = 1_000_000;
    let (t1, t2) = (0.1e-9, -0.2e-9);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let v = triple_rate(&p, t1 + u(0.3e-9), t2 + u(0.3e-9), u(0.2e-9));
        s += v;
        s2 += v * v;
    }
    let mean = s / n as f64;
    let se = ((s2 / n as f64 - mean * mean) / n as f64).sqrt();
    let got = a.smoothed_triple_rate(t1, t2);
    assert!((got - mean).abs() < 4.5 * se, "{got} vs {mean} ± {se}");
}

#[test]
fn far_lags_factorize() {
    let p = SpdcParams::new(43e6, 1.0 / 3e12).unwrap();
    let w = WindowParams::from_full_width(0.78e-9).unwrap();
    let a = Averager::continuous(p, &Channels::splat(DetectorParams::default()), &w).unwrap();
    let far = 20e-9;
    let n0 = a.averaged_pair_rate(Channel::S1, 0.0);
    assert_eq!(a.averaged_pair_rate(Channel::S1, far), p.pair_rate.powi(2));
    assert!((a.averaged_triple_rate(far) / (p.pair_rate * n0) - 1.0).abs() < 1e-12);
    assert!((a.g_c2(far) - 1.0).abs() < 1e-12);
    assert!((a.g_si2(far) - 1.0).abs() < 1e-12);
}

#[test]
fn normalization_is_conserved() {
    let p = SpdcParams::new(43e6, 1.0 / 3e12).unwrap();
    for &(td, tc) in &[(0.35e-9, 0.39e-9), (0.0, 0.1e-9), (0.2e-9, 1.0e-9)] {
        let a = Averager::continuous(
            p,
            &Channels::splat(DetectorParams::default().with_jitter(td)),
            &WindowParams::new(tc).unwrap(),
        )
        .unwrap();
        let span = 2.0 * (td + tc) + 1e-12;
        let n = 400_000;
        let h = 2.0 * span / n as f64;
        let excess: f64 = (0..=n)
            .map(|k| {
                let wgt = if k == 0 || k == n { 0.5 } else { 1.0 };
                wgt * (a.averaged_pair_rate(Channel::S1, -span + k as f64 * h) - p.pair_rate.powi(2))
            })
            .sum::<f64>()
            * h;
        assert!((excess / p.pair_rate - 1.0).abs() < 1e-3, "(τ_d, τ_coin) = ({td}, {tc}): {excess}");
    }
}

#[test]
fn delta_kernels_recover_instantaneous_values() {
    let p = SpdcParams::new(43e6, 1.0 / 3e12).unwrap();
    let ideal = Channels::splat(DetectorParams::ideal());
    let at = |tc: f64| Averager::continuous(p, &ideal, &WindowParams::new(tc).unwrap()).unwrap();
    let a = at(p.corr_width / 10.0);
    assert!((a.g_si2(0.0) / g_si2_instant(&p, 0.0) - 1.0).abs() < 1e-3);
    // the conditional dip converges more slowly: the narrow triangle of the
    // joint term is averaged over the window as well
    let exact = conditional_g2(&p, 0.0, 0.0, 0.0);
    let coarse = (at(p.corr_width / 10.0).g_c2(0.0) / exact - 1.0).abs();
    let fine = (at(p.corr_width / 1000.0).g_c2(0.0) / exact - 1.0).abs();
    assert!(coarse < 0.05, "{coarse}");
    assert!(fine < 1e-3, "{fine}");
    assert!(fine < coarse / 50.0);
    assert!((5e-5..7e-5).contains(&at(p.corr_width / 1000.0).g_c2(0.0)));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn curves_are_even_and_bounded(
        rate in 1e5f64..5e7,
        inv_width in 0.2e12f64..5e12,
        tds in (0.0f64..1e-9, 0.0f64..1e-9, 0.0f64..1e-9),
        tc in 0.05e-9f64..2e-9,
        tau in 0.0f64..3e-9,
    ) {
        let p = SpdcParams::new(rate, 1.0 / inv_width).unwrap();
        let a = Averager::continuous(p, &dets(tds.0, tds.1, tds.2), &WindowParams::new(tc).unwrap()).unwrap();
        let (gs, gsm) = (a.g_si2(tau), a.g_si2(-tau));
        let (gc, gcm) = (a.g_c2(tau), a.g_c2(-tau));
        prop_assert!((gs / gsm - 1.0).abs() < 1e-9, "{} {}", gs, gsm);
        prop_assert!((gc - gcm).abs() <= 1e-9 * gc.max(gcm) + 1e-15, "{} {}", gc, gcm);
        prop_assert!(gs >= 1.0 && gc >= 0.0);
        // heralding never beats the ideal herald-time value by more than rounding
        prop_assert!(a.g_c2(0.0) <= 1.0 + 1e-9);
        let far = 2.0 * (tc + tds.0 + tds.1 + tds.2) + 1e-9;
        prop_assert!((a.g_c2(far) - 1.0).abs() < 1e-9);
        prop_assert!((a.g_si2(far) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exact_and_impulse_paths_agree(
        tds in (0.1e-9f64..1e-9, 0.1e-9f64..1e-9),
        tc in 0.1e-9f64..2e-9,
        tau in -2e-9f64..2e-9,
    ) {
        // Δt = 0.33 ps is below 1/100 of every kernel here
        let p = SpdcParams::new(43e6, 1.0 / 3e12).unwrap();
        let model = ResponseModel::continuous(&dets(tds.0, tds.1, tds.1), &WindowParams::new(tc).unwrap());
        let ex = Averager::new(p, model.clone(), Method::Exact).unwrap();
        let im = Averager::new(p, model, Method::Impulse).unwrap();
        prop_assert!((ex.g_si2(tau) / im.g_si2(tau) - 1.0).abs() < 0.01);
        prop_assert!((ex.g_c2(tau) / im.g_c2(tau) - 1.0).abs() < 0.01);
    }
}
