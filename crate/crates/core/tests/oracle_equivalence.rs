//! Coincidence counting against brute-force enumeration.

use hsps_core::coincidence_engine::{pair_coincidences, triple_coincidences};
use hsps_core::{
    Channel, Channels, CoincidenceAccumulator, Coincidences, EstimatorConfig, LagGrid, StreamHeader, TagStream,
    WindowParams,
};
use proptest::prelude::*;

const Q: f64 = 1e-10;

fn brute_pairs(a: &[u64], b: &[u64], grid: &LagGrid, k: i64) -> Vec<u64> {
    grid.lags()
        .map(|lag| {
            let mut n = 0;
            for &x in a {
                for &y in b {
                    if (y as i64 - x as i64 - lag).abs() <= k {
                        n += 1;
                    }
                }
            }
            n
        })
        .collect()
}

fn brute_triples(h: &[u64], s1: &[u64], s2: &[u64], grid: &LagGrid, k: i64) -> Vec<u64> {
    let lags: Vec<i64> = grid.lags().collect();
    let mut out = vec![0; lags.len()];
    for &t in h {
        for &u in s1 {
            if (u as i64 - t as i64).abs() > k {
                continue;
            }
            for &v in s2 {
                let d = v as i64 - t as i64;
                for (o, &lag) in out.iter_mut().zip(&lags) {
                    if (d - lag).abs() <= k {
                        *o += 1;
                    }
                }
            }
        }
    }
    out
}

fn sorted(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable();
    v
}

prop_compose! {
    fn arb_case()(
        i in prop::collection::vec(0u64..3000, 1..333),
        s1 in prop::collection::vec(0u64..3000, 1..333),
        s2 in prop::collection::vec(0u64..3000, 1..333),
        k in 1i64..6,
        start in -40i64..10,
        step in 1i64..4,
        len in 1usize..30,
    ) -> (TagStream, EstimatorConfig) {
        let header = StreamHeader { clock_quantum: Q, duration_ticks: 3000, config_hash: None };
        let stream = TagStream::new(header, Channels { i: sorted(i), s1: sorted(s1), s2: sorted(s2) }).unwrap();
        let window = WindowParams::new(k as f64 * Q).unwrap();
        (stream, EstimatorConfig::new(window, LagGrid::new(start, step, len).unwrap()))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn two_pointer_equals_brute_force((stream, cfg) in arb_case()) {
        let k = (cfg.coincidence_half_width / Q).round() as i64;
        for (a, b) in [(Channel::I, Channel::S1), (Channel::I, Channel::S2), (Channel::S2, Channel::S1)] {
            let h = pair_coincidences(&stream, a, b, &cfg).unwrap();
            prop_assert_eq!(&h.counts, &brute_pairs(stream.channel(a), stream.channel(b), &cfg.lags, k));
        }
        let t = triple_coincidences(&stream, &cfg).unwrap();
        let want = brute_triples(
            stream.channel(Channel::I),
            stream.channel(Channel::S1),
            stream.channel(Channel::S2),
            &cfg.lags,
            k,
        );
        prop_assert_eq!(&t.counts, &want);

        // the streaming path agrees with the one-shot functions
        let co = Coincidences::from_stream(&stream, &cfg).unwrap();
        prop_assert_eq!(co.triple_histogram().counts, want);
        prop_assert_eq!(co.pair_histogram(Channel::S2).unwrap().counts, brute_pairs(stream.channel(Channel::I), stream.channel(Channel::S2), &cfg.lags, k));
    }

    #[test]
    fn chunking_does_not_change_counts((stream, cfg) in arb_case(), cuts in prop::collection::vec(0u64..3001, 0..8)) {
        let whole = Coincidences::from_stream(&stream, &cfg).unwrap();
        let mut cuts = cuts;
        cuts.sort_unstable();
        cuts.dedup();
        cuts.push(stream.header.duration_ticks + 1);
        let mut acc = CoincidenceAccumulator::new(cfg, stream.header).unwrap();
        let mut from = 0;
        for &to in &cuts {
            let part = Channels {
                i: stream.channel(Channel::I).iter().copied().filter(|&t| t >= from && t < to).collect(),
                s1: stream.channel(Channel::S1).iter().copied().filter(|&t| t >= from && t < to).collect(),
                s2: stream.channel(Channel::S2).iter().copied().filter(|&t| t >= from && t < to).collect(),
            };
            acc.push(&part, to).unwrap();
            from = to;
        }
        prop_assert_eq!(acc.finish(), whole);
    }

    #[test]
    fn pair_reflection_and_time_shift((stream, cfg) in arb_case(), shift in 0u64..10_000) {
        let ab = pair_coincidences(&stream, Channel::I, Channel::S1, &cfg).unwrap();
        let mirrored = LagGrid::new(-cfg.lags.last(), cfg.lags.step, cfg.lags.len).unwrap();
        let ba = pair_coincidences(&stream, Channel::S1, Channel::I, &EstimatorConfig { lags: mirrored, ..cfg }).unwrap();
        let rev: Vec<u64> = ba.counts.iter().rev().copied().collect();
        prop_assert_eq!(&ab.counts, &rev);

        let header = StreamHeader { duration_ticks: stream.header.duration_ticks + shift, ..stream.header };
        let moved = TagStream::new(header, stream.clone().into_channels().map(|v| v.iter().map(|t| t + shift).collect())).unwrap();
        prop_assert_eq!(pair_coincidences(&moved, Channel::I, Channel::S1, &cfg).unwrap().counts, ab.counts);
        prop_assert_eq!(
            triple_coincidences(&moved, &cfg).unwrap().counts,
            triple_coincidences(&stream, &cfg).unwrap().counts
        );
    }
}
