//! Monte-Carlo time-tag streams from Poissonian pair emission and imperfect
//! detectors.
//!
//! Pairs are emitted as a Poisson process of rate `R`. The idler arrives at
//! the emission time and the signal after a delay uniform on `(−Δt/2, Δt/2)`.
//! Each photon survives with its channel efficiency (the signal first picks
//! `s1` or `s2`), picks up uniform jitter on `[−τ_d, τ_d]`, is floored to the
//! tick grid, and is dropped if it lands within the dead time of the previous
//! recorded tag on its channel.
//!
//! Intra-beam thermal bunching is not generated: its support is the
//! correlation width, far below the jitter, and its averaged weight is below
//! statistical resolution.
//!
//! Time is cut into fixed slabs, each drawn from its own ChaCha stream keyed
//! by the seed and the slab index, and every pair consumes the same number of
//! draws whether or not its photons survive. Output therefore depends only on
//! the configuration, not on how the caller consumes chunks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Error, Result};
use crate::gaussian_model::SpdcParams;
use crate::tags::{Channel, Channels, StreamHeader, TagChunk, TagStream};
use crate::time_averaging::{common_clock_quantum, DetectorParams};

/// Slab length, seconds.
const SLAB: f64 = 1e-3;

/// Largest tick count accepted; leaves headroom for signed lag arithmetic.
pub const MAX_TICKS: u64 = 1 << 62;

fn default_splitter() -> f64 {
    0.5
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub spdc: SpdcParams,
    pub detectors: Channels<DetectorParams>,
    /// Probability that a signal photon goes to `s1`.
    #[serde(default = "default_splitter")]
    pub splitter_ratio: f64,
    /// Seconds.
    pub duration: f64,
    pub rng_seed: u64,
}

impl SimConfig {
    pub fn new(spdc: SpdcParams, detectors: Channels<DetectorParams>, duration: f64, rng_seed: u64) -> Self {
        SimConfig { spdc, detectors, splitter_ratio: 0.5, duration, rng_seed }
    }

    pub fn validate(&self) -> Result<()> {
        self.spdc.validate()?;
        if !self.spdc.is_low_gain() {
            return Err(invalid(format!(
                "pair-only simulation needs the low-gain regime, R·Δt = {}",
                self.spdc.gain_parameter()
            )));
        }
        for (c, d) in self.detectors.iter() {
            d.validate().map_err(|e| invalid(format!("detector {c}: {e}")))?;
        }
        common_clock_quantum(&self.detectors)?;
        // 1.0 routes everything to s1, which is handy for lossless checks
        if !(self.splitter_ratio > 0.0 && self.splitter_ratio <= 1.0) {
            return Err(invalid(format!("splitter_ratio must be in (0, 1], got {}", self.splitter_ratio)));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(invalid(format!("duration must be > 0, got {}", self.duration)));
        }
        self.duration_ticks()?;
        Ok(())
    }

    pub fn clock_quantum(&self) -> f64 {
        self.detectors.i.clock_quantum
    }

    pub fn duration_ticks(&self) -> Result<u64> {
        let q = self.clock_quantum();
        let n = (self.duration / q + 1e-9).floor();
        if !(n < MAX_TICKS as f64) {
            return Err(Error::DurationOverflow { duration: self.duration, clock_quantum: q });
        }
        Ok(n as u64)
    }

    /// First eight bytes of SHA-256 over the JSON form.
    pub fn config_hash(&self) -> u64 {
        let json = serde_json::to_vec(self).expect("config serializes");
        let digest = Sha256::digest(&json);
        u64::from_le_bytes(digest[..8].try_into().unwrap())
    }

    pub fn header(&self) -> Result<StreamHeader> {
        Ok(StreamHeader {
            clock_quantum: self.clock_quantum(),
            duration_ticks: self.duration_ticks()?,
            config_hash: Some(self.config_hash()),
        })
    }
}

/// Mean recorded rate per channel.
///
/// Dead time enters through the non-paralyzable correction `r/(1 + r·t_dead)`
/// applied to the detected rate `r`; this treats each channel as Poisson and
/// is an approximation once dead time is comparable to the pair spacing.
pub fn expected_singles_rate(cfg: &SimConfig) -> Channels<f64> {
    let r = cfg.spdc.pair_rate;
    let d = &cfg.detectors;
    let detected = Channels {
        i: r * d.i.efficiency,
        s1: r * d.s1.efficiency * cfg.splitter_ratio,
        s2: r * d.s2.efficiency * (1.0 - cfg.splitter_ratio),
    };
    Channels {
        i: detected.i / (1.0 + detected.i * d.i.dead_time),
        s1: detected.s1 / (1.0 + detected.s1 * d.s1.dead_time),
        s2: detected.s2 / (1.0 + detected.s2 * d.s2.dead_time),
    }
}

/// Slab-by-slab generator yielding [`TagChunk`]s in time order.
#[derive(Debug, Clone)]
pub struct Simulator {
    cfg: SimConfig,
    q: f64,
    duration_ticks: u64,
    slabs: u64,
    next_slab: u64,
    /// Widest shift of a detection time from its emission time.
    reach: f64,
    dead_ticks: Channels<u64>,
    last: Channels<Option<u64>>,
    pending: Channels<Vec<u64>>,
    gaps: Exp<f64>,
}

impl Simulator {
    pub fn new(cfg: SimConfig) -> Result<Self> {
        cfg.validate()?;
        let q = cfg.clock_quantum();
        let d = &cfg.detectors;
        let reach =
            d.i.jitter_half_width.max(d.s1.jitter_half_width).max(d.s2.jitter_half_width) + 0.5 * cfg.spdc.corr_width;
        Ok(Simulator {
            cfg,
            q,
            duration_ticks: cfg.duration_ticks()?,
            slabs: (cfg.duration / SLAB).ceil().max(1.0) as u64,
            next_slab: 0,
            reach,
            dead_ticks: d.map(|d| (d.dead_time / q - 1e-9).ceil().max(0.0) as u64),
            last: Channels::default(),
            pending: Channels::default(),
            gaps: Exp::new(cfg.spdc.pair_rate).map_err(|e| invalid(e.to_string()))?,
        })
    }

    pub fn header(&self) -> StreamHeader {
        StreamHeader {
            clock_quantum: self.q,
            duration_ticks: self.duration_ticks,
            config_hash: Some(self.cfg.config_hash()),
        }
    }

    fn tick(&self, t: f64) -> Option<u64> {
        if t < 0.0 {
            return None;
        }
        let k = (t / self.q).floor() as u64;
        (k <= self.duration_ticks).then_some(k)
    }

    fn generate_slab(&mut self, j: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.rng_seed);
        rng.set_stream(j);
        let start = j as f64 * SLAB;
        let end = ((j + 1) as f64 * SLAB).min(self.cfg.duration);
        let d = self.cfg.detectors;
        let dt = self.cfg.spdc.corr_width;
        let split = self.cfg.splitter_ratio;
        let mut t = start;
        loop {
            t += self.gaps.sample(&mut rng);
            if t >= end {
                break;
            }
            let delay = (rng.random::<f64>() - 0.5) * dt;
            let idler_ok = rng.random::<f64>() < d.i.efficiency;
            let route = rng.random::<f64>();
            let signal_keep = rng.random::<f64>();
            let ji = (2.0 * rng.random::<f64>() - 1.0) * d.i.jitter_half_width;
            let u = 2.0 * rng.random::<f64>() - 1.0;

            if idler_ok {
                if let Some(k) = self.tick(t + ji) {
                    self.pending.i.push(k);
                }
            }
            let s = if route < split { Channel::S1 } else { Channel::S2 };
            if signal_keep < d[s].efficiency {
                if let Some(k) = self.tick(t + delay + u * d[s].jitter_half_width) {
                    self.pending[s].push(k);
                }
            }
        }
    }

    /// Moves pending tags below `horizon` out, applying dead time.
    fn release(&mut self, horizon: u64) -> Channels<Vec<u64>> {
        let mut out: Channels<Vec<u64>> = Channels::default();
        for c in Channel::ALL {
            let pending = &mut self.pending[c];
            pending.sort_unstable();
            let cut = pending.partition_point(|&k| k < horizon);
            let dead = self.dead_ticks[c];
            let mut last = self.last[c];
            let kept = &mut out[c];
            for &k in &pending[..cut] {
                if last.is_none_or(|l| k - l >= dead) {
                    kept.push(k);
                    last = Some(k);
                }
            }
            self.last[c] = last;
            pending.drain(..cut);
        }
        out
    }
}

impl Iterator for Simulator {
    type Item = TagChunk;

    fn next(&mut self) -> Option<TagChunk> {
        if self.next_slab >= self.slabs {
            return None;
        }
        let j = self.next_slab;
        self.next_slab += 1;
        self.generate_slab(j);
        let horizon = if self.next_slab == self.slabs {
            self.duration_ticks + 1
        } else {
            // later slabs cannot produce ticks below this
            let end = self.next_slab as f64 * SLAB;
            (((end - self.reach) / self.q).floor() - 1.0).max(0.0) as u64
        };
        let tags = self.release(horizon);
        Some(TagChunk { tags, horizon })
    }
}

/// Generates the whole stream in memory.
pub fn simulate(cfg: &SimConfig) -> Result<TagStream> {
    let sim = Simulator::new(*cfg)?;
    let header = sim.header();
    let mut tags: Channels<Vec<u64>> = Channels::default();
    for chunk in sim {
        for c in Channel::ALL {
            tags[c].extend_from_slice(&chunk.tags[c]);
        }
    }
    TagStream::new(header, tags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(rate: f64, duration: f64) -> SimConfig {
        let spdc = SpdcParams::new(rate, 0.33e-12).unwrap();
        SimConfig::new(spdc, Channels::splat(DetectorParams::default()), duration, 7)
    }

    #[test]
    fn lossless_pairs_match_one_to_one() {
        let mut c = cfg(1e6, 0.01);
        c.detectors = Channels::splat(DetectorParams::ideal());
        c.splitter_ratio = 1.0;
        let s = simulate(&c).unwrap();
        assert_eq!(s.count(Channel::I), s.count(Channel::S1));
        assert_eq!(s.count(Channel::S2), 0);
        let max_diff = (c.spdc.corr_width / c.clock_quantum()).ceil() as u64;
        for (a, b) in s.channel(Channel::I).iter().zip(s.channel(Channel::S1)) {
            assert!(a.abs_diff(*b) <= max_diff);
        }
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let c = cfg(1e6, 0.005);
        assert_eq!(simulate(&c).unwrap(), simulate(&c).unwrap());
        let mut d = c;
        d.rng_seed = 8;
        assert_ne!(simulate(&c).unwrap(), simulate(&d).unwrap());
        assert_ne!(c.config_hash(), d.config_hash());
    }

    #[test]
    fn chunks_respect_their_horizons() {
        let sim = Simulator::new(cfg(2e6, 0.004)).unwrap();
        let mut prev = 0;
        for ch in sim {
            for c in Channel::ALL {
                assert!(ch.tags[c].iter().all(|&k| k >= prev && k < ch.horizon));
            }
            prev = ch.horizon;
        }
    }

    #[test]
    fn dead_time_spacing() {
        let mut c = cfg(5e6, 0.01);
        for d in [&mut c.detectors.i, &mut c.detectors.s1, &mut c.detectors.s2] {
            d.dead_time = 45e-9;
        }
        let s = simulate(&c).unwrap();
        let dead = (45e-9 / c.clock_quantum()).ceil() as u64;
        for ch in Channel::ALL {
            assert!(s.channel(ch).windows(2).all(|w| w[1] - w[0] >= dead));
            assert!(s.count(ch) as f64 / c.duration <= 1.0 / 45e-9);
        }
        let want = expected_singles_rate(&c);
        let got = s.count(Channel::I) as f64 / c.duration;
        assert!((got / want.i - 1.0).abs() < 0.02, "{got} vs {}", want.i);
    }

    #[test]
    fn expected_rates() {
        let mut c = cfg(1e6, 1.0);
        assert_eq!(expected_singles_rate(&c).i, 1e6);
        assert_eq!(expected_singles_rate(&c).s1, 0.5e6);
        c.detectors.i.efficiency = 0.5;
        assert_eq!(expected_singles_rate(&c).i, 0.5e6);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = cfg(1e6, 0.0);
        assert!(simulate(&c).is_err());
        c.duration = 1.0;
        c.splitter_ratio = 0.0;
        assert!(c.validate().is_err());
        c.splitter_ratio = 0.5;
        c.detectors.s2.clock_quantum = 1e-12;
        assert!(c.validate().is_err());
        let mut c = cfg(1e6, 1e9);
        c.detectors = Channels::splat(DetectorParams { clock_quantum: 1e-15, ..Default::default() });
        assert!(matches!(c.validate(), Err(Error::DurationOverflow { .. })));
        let bright = SimConfig::new(
            SpdcParams { pair_rate: 1e10, corr_width: 1e-12, pump_freq: None },
            Channels::splat(DetectorParams::default()),
            1.0,
            0,
        );
        assert!(bright.validate().is_err());
    }
}
