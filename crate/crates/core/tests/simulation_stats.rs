//! Statistical properties of simulated streams and of the estimators on them.

use hsps_core::coincidence_engine::{pair_coincidences, triple_coincidences};
use hsps_core::tag_stream_sim::expected_singles_rate;
use hsps_core::time_averaging::Method;
use hsps_core::{
    compare, simulate, Averager, Channel, Channels, CoincidenceAccumulator, Coincidences, DetectorParams,
    EstimatorConfig, LagGrid, ResponseModel, SimConfig, Simulator, SpdcParams, StreamHeader, TagStream, WindowParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

const Q: f64 = 156.25e-12;

fn desk(duration: f64, seed: u64) -> SimConfig {
    SimConfig::new(SpdcParams::new(1e6, 0.33e-12).unwrap(), Channels::splat(DetectorParams::default()), duration, seed)
}

fn window() -> WindowParams {
    WindowParams::from_full_width(0.78e-9).unwrap()
}

fn grid() -> LagGrid {
    LagGrid::new(-32, 1, 64).unwrap()
}

fn run(cfg: SimConfig, est: EstimatorConfig) -> Coincidences {
    let sim = Simulator::new(cfg).unwrap();
    let mut acc = CoincidenceAccumulator::new(est, sim.header()).unwrap();
    for chunk in sim {
        acc.push(&chunk.tags, chunk.horizon).unwrap();
    }
    acc.finish()
}

fn poisson_ticks(rate: f64, duration_ticks: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let gaps = Exp::new(rate * Q).unwrap();
    let mut t = 0.0;
    let mut out = Vec::new();
    loop {
        t += gaps.sample(rng);
        if t > duration_ticks as f64 {
            return out;
        }
        out.push(t as u64);
    }
}

fn independent(rates: [f64; 3], duration: f64, seed: u64) -> TagStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = (duration / Q) as u64;
    let header = StreamHeader { clock_quantum: Q, duration_ticks: n, config_hash: None };
    let tags = Channels {
        i: poisson_ticks(rates[0], n, &mut rng),
        s1: poisson_ticks(rates[1], n, &mut rng),
        s2: poisson_ticks(rates[2], n, &mut rng),
    };
    TagStream::new(header, tags).unwrap()
}

#[test]
fn idler_count_is_poisson() {
    let mut cfg = desk(10.0, 1);
    cfg.detectors = Channels::splat(DetectorParams::ideal());
    let s = simulate(&cfg).unwrap();
    let n = s.count(Channel::I) as f64;
    assert!((n - 1e7).abs() <= 4.0 * 1e7f64.sqrt(), "{n}");
    // even routing
    let (a, b) = (s.count(Channel::S1) as f64, s.count(Channel::S2) as f64);
    assert!((a - b).abs() <= 4.0 * (a + b).sqrt(), "{a} {b}");
    assert_eq!(a + b, n);
}

#[test]
fn dead_time_caps_the_rate() {
    let mut cfg = SimConfig::new(
        SpdcParams::new(5e7, 0.33e-12).unwrap(),
        Channels::splat(DetectorParams { dead_time: 45e-9, ..Default::default() }),
        0.2,
        3,
    );
    cfg.splitter_ratio = 0.5;
    let s = simulate(&cfg).unwrap();
    let want = expected_singles_rate(&cfg);
    for c in Channel::ALL {
        let r = s.count(c) as f64 / cfg.duration;
        assert!(r <= 1.0 / 45e-9);
        assert!((r / want[c] - 1.0).abs() < 0.03, "{c}: {r} vs {}", want[c]);
    }
}

#[test]
fn accidental_floor_of_independent_streams() {
    let rates = [4e5, 2e5, 3e5];
    let s = independent(rates, 20.0, 9);
    let est = EstimatorConfig::new(window(), grid());
    let k = 2.0;
    let w = (2.0 * k + 1.0) * Q;
    let t = s.header.duration();
    let r = s.counts().map(|&n| n as f64 / t);

    let h = pair_coincidences(&s, Channel::I, Channel::S1, &est).unwrap();
    let total = h.total() as f64;
    let want = r.i * r.s1 * w * t * h.counts.len() as f64;
    assert!((total - want).abs() < 3.0 * want.sqrt() * (2.0 * k + 1.0).sqrt(), "{total} vs {want}");

    let tr = triple_coincidences(&s, &est).unwrap();
    let total = tr.total() as f64;
    let want = r.i * r.s1 * r.s2 * w * w * t * tr.counts.len() as f64;
    assert!((total - want).abs() < 3.0 * (want * (2.0 * k + 1.0)).sqrt(), "{total} vs {want}");

    let co = Coincidences::from_stream(&s, &est).unwrap();
    let flat = |n: usize| {
        hsps_core::CoherenceCurve::new(
            grid().taus(Q),
            vec![1.0; n],
            None,
            hsps_core::CurveKind::Analytic,
            Default::default(),
        )
        .unwrap()
    };
    let g = co.g_si2().unwrap();
    let rep = compare(&flat(g.len()), &g, 3.0).unwrap();
    assert!(rep.pass, "{}", rep.to_text());
    let g = co.g_c2().unwrap();
    let rep = compare(&flat(g.len()), &g, 3.0).unwrap();
    assert!(rep.pass, "{}", rep.to_text());
}

#[test]
fn plateau_with_ideal_detectors() {
    let mut cfg = desk(5.0, 4);
    cfg.detectors = Channels::splat(DetectorParams::ideal());
    let co = run(cfg, EstimatorConfig::new(window(), grid()));
    let g = co.g_si2().unwrap();
    // with no jitter every partner falls in the window; the tick window spans 5 ticks
    let want = 1.0 + 1.0 / (5.0 * Q * 1e6);
    let i0 = 32;
    assert_eq!(g.taus[i0], 0.0);
    let z = (g.values[i0] - want) / g.sigmas.as_ref().unwrap()[i0];
    assert!(z.abs() < 3.0, "{} vs {want}: z = {z}", g.values[i0]);
}

#[test]
fn efficiency_does_not_change_coherence() {
    let est = EstimatorConfig::new(window(), grid());
    let full = run(desk(4.0, 21), est);
    let mut lossy = desk(8.0, 22);
    for d in [&mut lossy.detectors.i, &mut lossy.detectors.s1, &mut lossy.detectors.s2] {
        d.efficiency = 0.5;
    }
    let half = run(lossy, est);
    let a = full.g_c2().unwrap();
    let b = half.g_c2().unwrap();
    let rep = compare(&a, &b, 3.0).unwrap();
    assert!(rep.pass, "{}", rep.to_text());
    let rep = compare(&full.g_si2().unwrap(), &half.g_si2().unwrap(), 3.0).unwrap();
    assert!(rep.pass, "{}", rep.to_text());
}

#[test]
fn dip_z_scores_over_twenty_seeds() {
    let d = Channels::splat(DetectorParams::default());
    let model = ResponseModel::tagged(&d, &window()).unwrap();
    let theory = Averager::new(desk(1.0, 0).spdc, model, Method::Auto).unwrap().g_c2(0.0);
    let est = EstimatorConfig::new(window(), LagGrid::new(0, 1, 1).unwrap());
    let z: Vec<f64> = (0..20u64)
        .map(|seed| {
            let g = run(desk(2.0, 1000 + seed), est).g_c2().unwrap();
            (g.values[0] - theory) / g.sigmas.unwrap()[0]
        })
        .collect();
    let mean = z.iter().sum::<f64>() / z.len() as f64;
    let worst = z.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    eprintln!("z = {z:.2?}");
    assert!(mean.abs() < 0.75, "mean z {mean}");
    assert!(worst <= 4.0, "max |z| {worst}");
}
