//! Coincidence counting on sorted time-tag streams and the ḡ_si², ḡ_c²
//! estimators built on it.
//!
//! All arithmetic is in integer ticks. A coincidence window of half-width
//! `τ_coin` becomes the closed tick interval `[−K, K]` with
//! `K = ⌊τ_coin/q⌋`, so a window spans `2K + 1` ticks. Every matching pair
//! (or triple) is counted, which gives rate semantics.
//!
//! Counting first builds a raw histogram of tick differences over the lag
//! range widened by `K` on each side, using a two-pointer sweep per herald;
//! window counts at each lag are then sums over `2K + 1` raw bins. Raw
//! histograms add bin-wise, so streams may be processed in contiguous
//! chunks ([`CoincidenceAccumulator`]) with identical results.

use serde::{Deserialize, Serialize};

use crate::curve::{CoherenceCurve, CurveKind, ParamsSnapshot};
use crate::error::{invalid, Error, Result};
use crate::tag_stream_sim::MAX_TICKS;
use crate::tags::{Channel, Channels, StreamHeader, TagStream};
use crate::time_averaging::WindowParams;

/// Slack for `τ_coin/q` landing a rounding error below an integer.
const TICK_EPS: f64 = 1e-9;

/// Half-width of the coincidence window in whole ticks; at least one.
pub fn window_ticks(half_width: f64, clock_quantum: f64) -> Result<i64> {
    if !(clock_quantum > 0.0) {
        return Err(invalid("clock_quantum must be > 0"));
    }
    let k = (half_width / clock_quantum + TICK_EPS).floor();
    if !(k >= 1.0) {
        return Err(invalid(format!(
            "coincidence half-width {half_width} s is below one clock quantum {clock_quantum} s"
        )));
    }
    if k > (1u64 << 40) as f64 {
        return Err(invalid("coincidence window too wide"));
    }
    Ok(k as i64)
}

/// Arithmetic progression of lags, in ticks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagGrid {
    pub start: i64,
    pub step: i64,
    pub len: usize,
}

impl LagGrid {
    pub fn new(start: i64, step: i64, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(invalid("empty lag grid"));
        }
        if step < 1 {
            return Err(invalid("lag step must be at least one tick"));
        }
        Ok(LagGrid { start, step, len })
    }

    /// Every tick in `[-span, span]`, span rounded to ticks.
    pub fn symmetric(span: f64, clock_quantum: f64) -> Result<Self> {
        let n = (span / clock_quantum).round() as i64;
        Self::new(-n, 1, (2 * n + 1) as usize)
    }

    /// Lags from `min` to `max` (inclusive, seconds) in steps of `step`,
    /// all rounded to whole ticks.
    pub fn from_seconds(min: f64, max: f64, step: f64, clock_quantum: f64) -> Result<Self> {
        if !(max >= min) {
            return Err(invalid("lag grid max below min"));
        }
        let start = (min / clock_quantum).round() as i64;
        let end = (max / clock_quantum).round() as i64;
        let step = ((step / clock_quantum).round() as i64).max(1);
        Self::new(start, step, ((end - start) / step + 1) as usize)
    }

    pub fn lag(&self, i: usize) -> i64 {
        self.start + self.step * i as i64
    }

    pub fn first(&self) -> i64 {
        self.start
    }

    pub fn last(&self) -> i64 {
        self.lag(self.len - 1)
    }

    pub fn lags(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len).map(|i| self.lag(i))
    }

    /// Lags in seconds; the τ grid analytic curves should be sampled on.
    pub fn taus(&self, clock_quantum: f64) -> Vec<f64> {
        self.lags().map(|k| k as f64 * clock_quantum).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// `τ_coin`, seconds.
    pub coincidence_half_width: f64,
    pub lags: LagGrid,
    pub herald: Channel,
}

impl EstimatorConfig {
    pub fn new(window: WindowParams, lags: LagGrid) -> Self {
        EstimatorConfig { coincidence_half_width: window.half_width, lags, herald: Channel::I }
    }

    /// The two non-herald channels: the one windowed at the herald and the
    /// one swept in lag.
    pub fn signal_roles(&self) -> (Channel, Channel) {
        match self.herald {
            Channel::I => (Channel::S1, Channel::S2),
            Channel::S1 => (Channel::I, Channel::S2),
            Channel::S2 => (Channel::I, Channel::S1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HistogramKind {
    /// `b` tags at lag τ from `a` tags.
    Pair { a: Channel, b: Channel },
    /// `near` within the window around the herald and `swept` at lag τ.
    Triple { herald: Channel, near: Channel, swept: Channel },
}

/// Window coincidence counts per lag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagHistogram {
    pub kind: HistogramKind,
    /// Lag spacing, seconds.
    pub bin_width: f64,
    /// First and last lag, seconds.
    pub lag_range: (f64, f64),
    pub lags: LagGrid,
    pub counts: Vec<u64>,
    /// Acquisition time, seconds.
    pub exposure: f64,
    pub clock_quantum: f64,
    /// Window half-width `K`, ticks.
    pub window_ticks: i64,
}

impl LagHistogram {
    /// Full window width `(2K + 1)q`, seconds.
    pub fn window_width(&self) -> f64 {
        (2 * self.window_ticks + 1) as f64 * self.clock_quantum
    }

    pub fn taus(&self) -> Vec<f64> {
        self.lags.taus(self.clock_quantum)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Bin-wise sum with a histogram of the same layout.
    pub fn merge(&mut self, other: &LagHistogram) -> Result<()> {
        if self.kind != other.kind || self.lags != other.lags || self.window_ticks != other.window_ticks {
            return Err(invalid("histogram layouts differ"));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.exposure += other.exposure;
        Ok(())
    }
}

/// Raw difference histogram over `[lo, hi]` ticks.
#[derive(Debug, Clone, PartialEq)]
struct RawHist {
    lo: i64,
    bins: Vec<u64>,
}

impl RawHist {
    fn new(lo: i64, hi: i64) -> Self {
        RawHist { lo, bins: vec![0; (hi - lo + 1) as usize] }
    }

    fn hi(&self) -> i64 {
        self.lo + self.bins.len() as i64 - 1
    }

    /// Counts in the closed window `[lag − k, lag + k]`.
    fn window(&self, lag: i64, k: i64) -> u64 {
        let a = (lag - k - self.lo) as usize;
        let b = (lag + k - self.lo) as usize;
        self.bins[a..=b].iter().sum()
    }

    fn windows(&self, grid: &LagGrid, k: i64) -> Vec<u64> {
        // prefix sums keep this linear in the raw range
        let mut prefix = Vec::with_capacity(self.bins.len() + 1);
        prefix.push(0u64);
        let mut acc = 0;
        for &c in &self.bins {
            acc += c;
            prefix.push(acc);
        }
        grid.lags()
            .map(|lag| {
                let a = (lag - k - self.lo) as usize;
                let b = (lag + k - self.lo) as usize;
                prefix[b + 1] - prefix[a]
            })
            .collect()
    }
}

/// Adds to `raw` every pair with `b − a ∈ [raw.lo, raw.hi]`.
fn accumulate_pairs(a: &[u64], b: &[u64], raw: &mut RawHist) {
    let (lo, hi) = (raw.lo, raw.hi());
    let bins = &mut raw.bins;
    let mut start = 0usize;
    for &ta in a {
        let ta = ta as i64;
        let from = ta + lo;
        let to = ta + hi;
        while start < b.len() && (b[start] as i64) < from {
            start += 1;
        }
        for &tb in &b[start..] {
            let tb = tb as i64;
            if tb > to {
                break;
            }
            bins[(tb - from) as usize] += 1;
        }
    }
}

/// Adds to `raw`, for each herald, the number of `near` tags within `±k`
/// times each `swept` tag at difference `d ∈ [raw.lo, raw.hi]`.
fn accumulate_triples(herald: &[u64], near: &[u64], swept: &[u64], k: i64, raw: &mut RawHist) {
    let (lo, hi) = (raw.lo, raw.hi());
    let bins = &mut raw.bins;
    let (mut n_start, mut n_end, mut s_start) = (0usize, 0usize, 0usize);
    for &th in herald {
        let th = th as i64;
        while n_start < near.len() && (near[n_start] as i64) < th - k {
            n_start += 1;
        }
        n_end = n_end.max(n_start);
        while n_end < near.len() && (near[n_end] as i64) <= th + k {
            n_end += 1;
        }
        let n1 = (n_end - n_start) as u64;
        if n1 == 0 {
            continue;
        }
        let from = th + lo;
        let to = th + hi;
        while s_start < swept.len() && (swept[s_start] as i64) < from {
            s_start += 1;
        }
        for &ts in &swept[s_start..] {
            let ts = ts as i64;
            if ts > to {
                break;
            }
            bins[(ts - from) as usize] += n1;
        }
    }
}

fn check_ticks(stream: &TagStream) -> Result<()> {
    if stream.header.duration_ticks >= MAX_TICKS {
        return Err(invalid("stream duration exceeds 2^62 ticks"));
    }
    Ok(())
}

fn histogram(kind: HistogramKind, raw: &RawHist, grid: &LagGrid, k: i64, q: f64, exposure: f64) -> LagHistogram {
    LagHistogram {
        kind,
        bin_width: grid.step as f64 * q,
        lag_range: (grid.first() as f64 * q, grid.last() as f64 * q),
        lags: *grid,
        counts: raw.windows(grid, k),
        exposure,
        clock_quantum: q,
        window_ticks: k,
    }
}

/// Window coincidences of channel `b` at each lag relative to channel `a`.
pub fn pair_coincidences(stream: &TagStream, a: Channel, b: Channel, cfg: &EstimatorConfig) -> Result<LagHistogram> {
    check_ticks(stream)?;
    let q = stream.header.clock_quantum;
    let k = window_ticks(cfg.coincidence_half_width, q)?;
    for c in [a, b] {
        if stream.count(c) == 0 {
            return Err(Error::EmptyChannel(c));
        }
    }
    let mut raw = RawHist::new(cfg.lags.first() - k, cfg.lags.last() + k);
    accumulate_pairs(stream.channel(a), stream.channel(b), &mut raw);
    Ok(histogram(HistogramKind::Pair { a, b }, &raw, &cfg.lags, k, q, stream.header.duration()))
}

/// Triple coincidences: for each herald, `near` tags within `±τ_coin` and
/// `swept` tags within `τ ± τ_coin`, binned by τ.
pub fn triple_coincidences(stream: &TagStream, cfg: &EstimatorConfig) -> Result<LagHistogram> {
    check_ticks(stream)?;
    let q = stream.header.clock_quantum;
    let k = window_ticks(cfg.coincidence_half_width, q)?;
    let (near, swept) = cfg.signal_roles();
    let mut raw = RawHist::new(cfg.lags.first() - k, cfg.lags.last() + k);
    accumulate_triples(stream.channel(cfg.herald), stream.channel(near), stream.channel(swept), k, &mut raw);
    Ok(histogram(
        HistogramKind::Triple { herald: cfg.herald, near, swept },
        &raw,
        &cfg.lags,
        k,
        q,
        stream.header.duration(),
    ))
}

/// Number of time blocks used for batch-means error estimates.
pub const ERROR_BLOCKS: u64 = 100;

/// Counts attributed to one time block, by herald tick for coincidences
/// and by own tick for singles.
#[derive(Debug, Clone, PartialEq)]
struct Block {
    singles: Channels<u64>,
    pair_near: RawHist,
    pair_swept: RawHist,
    triple: RawHist,
}

impl Block {
    fn new(lo: i64, hi: i64) -> Self {
        Block {
            singles: Channels::default(),
            pair_near: RawHist::new(lo, hi),
            pair_swept: RawHist::new(lo, hi),
            triple: RawHist::new(lo, hi),
        }
    }

    fn add(&mut self, other: &Block) {
        for c in Channel::ALL {
            self.singles[c] += other.singles[c];
        }
        for (a, b) in [
            (&mut self.pair_near, &other.pair_near),
            (&mut self.pair_swept, &other.pair_swept),
            (&mut self.triple, &other.triple),
        ] {
            for (x, y) in a.bins.iter_mut().zip(&b.bins) {
                *x += y;
            }
        }
    }
}

/// Incremental counter for streams delivered in time-ordered chunks.
///
/// Each [`push`](Self::push) hands over all tags below a horizon tick; later
/// pushes must only carry tags at or above it. Heralds are processed once
/// every tag they can pair with has arrived, and signal tags are dropped
/// once no pending herald can reach them, so memory stays bounded by the
/// lag range.
#[derive(Debug, Clone)]
pub struct CoincidenceAccumulator {
    cfg: EstimatorConfig,
    header: StreamHeader,
    k: i64,
    near: Channel,
    swept: Channel,
    lo: i64,
    hi: i64,
    block_ticks: u64,
    blocks: Vec<Block>,
    buf: Channels<Vec<u64>>,
    last: Channels<Option<u64>>,
    seen: Channels<u64>,
    horizon: u64,
}

impl CoincidenceAccumulator {
    pub fn new(cfg: EstimatorConfig, header: StreamHeader) -> Result<Self> {
        if header.duration_ticks >= MAX_TICKS {
            return Err(invalid("stream duration exceeds 2^62 ticks"));
        }
        let k = window_ticks(cfg.coincidence_half_width, header.clock_quantum)?;
        let (near, swept) = cfg.signal_roles();
        // the herald-window pair count at lag 0 is always needed
        let lo = cfg.lags.first().min(0) - k;
        let hi = cfg.lags.last().max(0) + k;
        let n_blocks = (header.duration_ticks + 1).min(ERROR_BLOCKS);
        Ok(CoincidenceAccumulator {
            cfg,
            header,
            k,
            near,
            swept,
            lo,
            hi,
            block_ticks: (header.duration_ticks + 1).div_ceil(n_blocks),
            blocks: (0..n_blocks).map(|_| Block::new(lo, hi)).collect(),
            buf: Channels::default(),
            last: Channels::default(),
            seen: Channels::default(),
            horizon: 0,
        })
    }

    fn block_of(&self, tick: u64) -> usize {
        ((tick / self.block_ticks) as usize).min(self.blocks.len() - 1)
    }

    /// Appends the next chunk. `tags[c]` must be sorted and at or above the
    /// previous horizon; all tags below `horizon` are final after this call.
    pub fn push(&mut self, tags: &Channels<Vec<u64>>, horizon: u64) -> Result<()> {
        for c in Channel::ALL {
            let v = &tags[c];
            for (n, &t) in v.iter().enumerate() {
                let prev = self.last[c];
                if prev.is_some_and(|p| t < p) || t < self.horizon {
                    return Err(Error::UnsortedInput { channel: c, index: (self.seen[c] + n as u64) as usize });
                }
                if t > self.header.duration_ticks {
                    return Err(invalid(format!("channel {c} tick {t} beyond stream duration")));
                }
                self.last[c] = Some(t);
                let b = self.block_of(t);
                self.blocks[b].singles[c] += 1;
            }
            if v.last().is_some_and(|&t| t >= horizon) {
                return Err(invalid(format!("chunk tag on {c} at or beyond its horizon {horizon}")));
            }
            self.seen[c] += v.len() as u64;
            self.buf[c].extend_from_slice(v);
        }
        self.horizon = self.horizon.max(horizon);
        self.drain(false);
        Ok(())
    }

    fn drain(&mut self, all: bool) {
        let heralds = &self.buf[self.cfg.herald];
        let ready = if all {
            heralds.len()
        } else {
            // t + hi < horizon
            let limit = self.horizon as i64 - self.hi;
            heralds.partition_point(|&t| (t as i64) < limit)
        };
        let near = &self.buf[self.near];
        let swept = &self.buf[self.swept];
        let mut from = 0;
        while from < ready {
            let b = self.block_of(heralds[from]);
            let end = (b as u64 + 1) * self.block_ticks;
            let to = from + heralds[from..ready].partition_point(|&t| t < end);
            let h = &heralds[from..to];
            let block = &mut self.blocks[b];
            accumulate_pairs(h, near, &mut block.pair_near);
            accumulate_pairs(h, swept, &mut block.pair_swept);
            accumulate_triples(h, near, swept, self.k, &mut block.triple);
            from = to;
        }
        self.buf[self.cfg.herald].drain(..ready);
        // earliest herald still to come
        let next = self.buf[self.cfg.herald].first().copied().unwrap_or(self.horizon).min(self.horizon) as i64;
        let keep_from = next + self.lo;
        for c in [self.near, self.swept] {
            let cut = self.buf[c].partition_point(|&t| (t as i64) < keep_from);
            self.buf[c].drain(..cut);
        }
    }

    /// Processes the remaining heralds.
    pub fn finish(mut self) -> Coincidences {
        self.drain(true);
        let mut total = Block::new(self.lo, self.hi);
        for b in &self.blocks {
            total.add(b);
        }
        Coincidences {
            cfg: self.cfg,
            clock_quantum: self.header.clock_quantum,
            k: self.k,
            near: self.near,
            swept: self.swept,
            exposure: self.header.duration(),
            total,
            blocks: self.blocks,
        }
    }
}

/// Accumulated singles, pair and triple counts for one acquisition.
///
/// Standard errors of the coherence estimates come from batch means over
/// [`ERROR_BLOCKS`] contiguous time blocks, propagated through the ratio to
/// first order. Plain Poisson errors understate the spread of triple counts
/// near zero lag, where two heralds close in time both count the same pair
/// of signal tags.
#[derive(Debug, Clone, PartialEq)]
pub struct Coincidences {
    cfg: EstimatorConfig,
    clock_quantum: f64,
    k: i64,
    near: Channel,
    swept: Channel,
    exposure: f64,
    total: Block,
    blocks: Vec<Block>,
}

/// Variance of a ratio estimate, relative, from per-block values of its
/// factors. `terms` pairs each factor's total with its exponent (±1).
fn batch_rel_var(blocks: usize, terms: &[(f64, f64)], per_block: impl Fn(usize) -> Vec<f64>) -> f64 {
    let n = blocks as f64;
    let r: Vec<f64> = (0..blocks)
        .map(|b| {
            terms.iter().zip(&per_block(b)).filter(|((tot, _), _)| *tot > 0.0).map(|((tot, p), x)| p * x / tot).sum()
        })
        .collect();
    let mean = r.iter().sum::<f64>() / n;
    let ss: f64 = r.iter().map(|x| (x - mean) * (x - mean)).sum();
    ss * n / (n - 1.0)
}

impl Coincidences {
    pub fn from_stream(stream: &TagStream, cfg: &EstimatorConfig) -> Result<Self> {
        let mut acc = CoincidenceAccumulator::new(*cfg, stream.header)?;
        let tags = Channels {
            i: stream.channel(Channel::I).to_vec(),
            s1: stream.channel(Channel::S1).to_vec(),
            s2: stream.channel(Channel::S2).to_vec(),
        };
        acc.push(&tags, stream.header.duration_ticks + 1)?;
        Ok(acc.finish())
    }

    pub fn singles(&self) -> Channels<u64> {
        self.total.singles
    }

    pub fn exposure(&self) -> f64 {
        self.exposure
    }

    pub fn rates(&self) -> Channels<f64> {
        self.total.singles.map(|&n| n as f64 / self.exposure)
    }

    pub fn window_width(&self) -> f64 {
        (2 * self.k + 1) as f64 * self.clock_quantum
    }

    fn hist(&self, kind: HistogramKind, raw: &RawHist) -> LagHistogram {
        histogram(kind, raw, &self.cfg.lags, self.k, self.clock_quantum, self.exposure)
    }

    /// Herald–`s` pair histogram, `s` one of the two signal roles.
    pub fn pair_histogram(&self, s: Channel) -> Result<LagHistogram> {
        let raw = if s == self.near {
            &self.total.pair_near
        } else if s == self.swept {
            &self.total.pair_swept
        } else {
            return Err(invalid(format!("channel {s} is the herald")));
        };
        Ok(self.hist(HistogramKind::Pair { a: self.cfg.herald, b: s }, raw))
    }

    pub fn triple_histogram(&self) -> LagHistogram {
        self.hist(
            HistogramKind::Triple { herald: self.cfg.herald, near: self.near, swept: self.swept },
            &self.total.triple,
        )
    }

    fn snapshot(&self) -> ParamsSnapshot {
        ParamsSnapshot {
            window: Some(WindowParams { half_width: self.cfg.coincidence_half_width }),
            clock_quantum: Some(self.clock_quantum),
            ..Default::default()
        }
    }

    /// `ḡ_si²(τ) = N_si(τ)/(r_i r_s)` with both signal detectors pooled.
    pub fn g_si2(&self) -> Result<CoherenceCurve> {
        let herald = self.cfg.herald;
        for c in Channel::ALL {
            if self.total.singles[c] == 0 {
                return Err(Error::ZeroRate(c));
            }
        }
        let signals = |b: &Block| (b.singles[self.near] + b.singles[self.swept]) as f64;
        let n_h = self.total.singles[herald] as f64;
        let n_s = signals(&self.total);
        let grid = &self.cfg.lags;
        let window_sum = |b: &Block| -> Vec<f64> {
            let a = b.pair_near.windows(grid, self.k);
            let s = b.pair_swept.windows(grid, self.k);
            a.iter().zip(&s).map(|(x, y)| (x + y) as f64).collect()
        };
        let counts = window_sum(&self.total);
        let per_block: Vec<Vec<f64>> = self.blocks.iter().map(window_sum).collect();
        let scale = self.exposure / (n_h * n_s * self.window_width());
        let mut values = Vec::with_capacity(grid.len);
        let mut sigmas = Vec::with_capacity(grid.len);
        for (i, &c) in counts.iter().enumerate() {
            let g = c * scale;
            let floor = scale * scale;
            let var = if self.blocks.len() < 2 {
                scale * scale * c + g * g * (1.0 / n_h + 1.0 / n_s)
            } else {
                let rel = batch_rel_var(self.blocks.len(), &[(c, 1.0), (n_h, -1.0), (n_s, -1.0)], |b| {
                    let blk = &self.blocks[b];
                    vec![per_block[b][i], blk.singles[herald] as f64, signals(blk)]
                });
                g * g * rel
            };
            values.push(g);
            sigmas.push(var.max(floor).sqrt());
        }
        CoherenceCurve::new(grid.taus(self.clock_quantum), values, Some(sigmas), CurveKind::Simulated, self.snapshot())
    }

    /// `ḡ_c²(τ) = N⁽²⁾(τ)·r_i / [N_si(0)·N_si(τ)]`, all from this stream.
    pub fn g_c2(&self) -> Result<CoherenceCurve> {
        let herald = self.cfg.herald;
        if self.total.singles[herald] == 0 {
            return Err(Error::ZeroRate(herald));
        }
        let n_h = self.total.singles[herald] as f64;
        let c0 = self.total.pair_near.window(0, self.k) as f64;
        if c0 == 0.0 {
            return Err(Error::ZeroCentralCount);
        }
        let grid = &self.cfg.lags;
        let swept = self.total.pair_swept.windows(grid, self.k);
        let triple = self.total.triple.windows(grid, self.k);
        let block_swept: Vec<Vec<u64>> = self.blocks.iter().map(|b| b.pair_swept.windows(grid, self.k)).collect();
        let block_triple: Vec<Vec<u64>> = self.blocks.iter().map(|b| b.triple.windows(grid, self.k)).collect();
        let block_c0: Vec<f64> = self.blocks.iter().map(|b| b.pair_near.window(0, self.k) as f64).collect();
        let mut values = Vec::with_capacity(grid.len);
        let mut sigmas = Vec::with_capacity(grid.len);
        for (i, (&c3, &c2)) in triple.iter().zip(&swept).enumerate() {
            if c2 == 0 {
                return Err(Error::ZeroCoincidences { lag: grid.lag(i) as f64 * self.clock_quantum });
            }
            let (c3, c2) = (c3 as f64, c2 as f64);
            let scale = n_h / (c0 * c2);
            let g = c3 * scale;
            let var = if self.blocks.len() < 2 {
                scale * scale * c3 + g * g * (1.0 / c0 + 1.0 / c2 + 1.0 / n_h)
            } else {
                let terms = [(c3, 1.0), (n_h, 1.0), (c0, -1.0), (c2, -1.0)];
                let rel = batch_rel_var(self.blocks.len(), &terms, |b| {
                    vec![
                        block_triple[b][i] as f64,
                        self.blocks[b].singles[herald] as f64,
                        block_c0[b],
                        block_swept[b][i] as f64,
                    ]
                });
                g * g * rel
            };
            values.push(g);
            sigmas.push(var.max(scale * scale).sqrt());
        }
        CoherenceCurve::new(grid.taus(self.clock_quantum), values, Some(sigmas), CurveKind::Simulated, self.snapshot())
    }
}

pub fn estimate_g_si2(stream: &TagStream, cfg: &EstimatorConfig) -> Result<CoherenceCurve> {
    Coincidences::from_stream(stream, cfg)?.g_si2()
}

pub fn estimate_g_c2(stream: &TagStream, cfg: &EstimatorConfig) -> Result<CoherenceCurve> {
    Coincidences::from_stream(stream, cfg)?.g_c2()
}
