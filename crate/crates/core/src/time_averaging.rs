//! Jitter-smoothed and window-averaged coincidence rates, and the analytic
//! time-averaged coherence curves built from them.
//!
//! Detection times are modelled as the photon arrival time plus independent
//! uniform offsets (detector jitter, and optionally tagger quantization), and
//! a coincidence window of half-width `τ_coin` averages the lag uniformly.
//! With signal lags `x₁ = t₁ + s₁ − m` and `x₂ = t₂ + s₂ − m` (`s₁`, `s₂` the
//! signal-side offsets including the window, `m` the idler offset) every
//! averaged rate is an expectation of the instantaneous rates over these
//! uniform sums:
//!
//! * pair: `R² + E|C(x)|²`
//! * triple: `R³ + R·E|C(x₁)|² + R·E|C(x₂)|² + R·E R²(x₁−x₂) + 2·E[C(x₁)C(x₂)R(x₁−x₂)]`
//!
//! The one-dimensional expectations are exact piecewise-polynomial
//! convolutions. The joint term is reduced to one dimension by writing the
//! triangle `R(x₁−x₂)` restricted to the support of `C(x₁)C(x₂)` as a
//! superposition of products of boxes, `R²∫dv w(v) q_v(x₁) q_v(x₂)`; the
//! remaining integral over `v` is piecewise polynomial between enumerable
//! breakpoints and is evaluated with Gauss–Legendre nodes, exactly up to
//! rounding.
//!
//! When the correlation width is much smaller than every kernel, the narrow
//! profiles can be replaced by impulses of equal weight; see [`Method`].

use serde::{Deserialize, Serialize};

use crate::coincidence_engine::window_ticks;
use crate::curve::{CoherenceCurve, CurveKind, ParamsSnapshot};
use crate::error::{invalid, Result};
use crate::gaussian_model::SpdcParams;
use crate::piecewise::PiecewisePoly;
use crate::tags::{Channel, Channels};

/// Detector timing and counting model for one channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorParams {
    /// Half-width `τ_d` of the uniform jitter kernel, seconds.
    pub jitter_half_width: f64,
    /// Non-paralyzable dead time, seconds.
    pub dead_time: f64,
    /// Detection efficiency in `(0, 1]`.
    pub efficiency: f64,
    /// Time-tagger tick, seconds.
    pub clock_quantum: f64,
}

/// 156.25 ps tagger resolution.
pub const DEFAULT_CLOCK_QUANTUM: f64 = 156.25e-12;

impl Default for DetectorParams {
    fn default() -> Self {
        DetectorParams {
            jitter_half_width: 350e-12,
            dead_time: 0.0,
            efficiency: 1.0,
            clock_quantum: DEFAULT_CLOCK_QUANTUM,
        }
    }
}

impl DetectorParams {
    pub fn ideal() -> Self {
        DetectorParams { jitter_half_width: 0.0, ..Default::default() }
    }

    pub fn with_jitter(mut self, tau_d: f64) -> Self {
        self.jitter_half_width = tau_d;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.jitter_half_width >= 0.0 && self.jitter_half_width.is_finite()) {
            return Err(invalid(format!("jitter_half_width must be >= 0, got {}", self.jitter_half_width)));
        }
        if !(self.dead_time >= 0.0 && self.dead_time.is_finite()) {
            return Err(invalid(format!("dead_time must be >= 0, got {}", self.dead_time)));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(invalid(format!("efficiency must be in (0, 1], got {}", self.efficiency)));
        }
        if !(self.clock_quantum > 0.0 && self.clock_quantum.is_finite()) {
            return Err(invalid(format!("clock_quantum must be > 0, got {}", self.clock_quantum)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowParams {
    /// `τ_coin`; the full window is `2τ_coin`.
    pub half_width: f64,
}

impl WindowParams {
    pub fn new(half_width: f64) -> Result<Self> {
        let w = WindowParams { half_width };
        w.validate()?;
        Ok(w)
    }

    pub fn from_full_width(full: f64) -> Result<Self> {
        Self::new(0.5 * full)
    }

    pub fn full_width(&self) -> f64 {
        2.0 * self.half_width
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return Err(invalid(format!("window half_width must be > 0, got {}", self.half_width)));
        }
        Ok(())
    }
}

/// Uniform jitter density `u(t)`. Zero everywhere when `τ_d = 0`; that case
/// is an exact delta kernel and is handled by [`Kernel`].
pub fn jitter_kernel(d: &DetectorParams, t: f64) -> f64 {
    let h = d.jitter_half_width;
    if h > 0.0 && t.abs() <= h {
        0.5 / h
    } else {
        0.0
    }
}

/// Timing response of a channel: convolution of centred uniform densities
/// with the listed half-widths. An empty list is a delta.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Kernel {
    half_widths: Vec<f64>,
}

impl Kernel {
    pub fn delta() -> Self {
        Kernel::default()
    }

    pub fn uniform(h: f64) -> Self {
        Kernel::delta().with(h)
    }

    /// Adds another uniform component; zero widths are dropped.
    pub fn with(mut self, h: f64) -> Self {
        assert!(h >= 0.0 && h.is_finite());
        if h > 0.0 {
            self.half_widths.push(h);
        }
        self
    }

    pub fn half_widths(&self) -> &[f64] {
        &self.half_widths
    }

    pub fn is_delta(&self) -> bool {
        self.half_widths.is_empty()
    }

    /// Largest possible displacement.
    pub fn reach(&self) -> f64 {
        self.half_widths.iter().sum()
    }
}

impl From<&DetectorParams> for Kernel {
    fn from(d: &DetectorParams) -> Self {
        Kernel::uniform(d.jitter_half_width)
    }
}

/// Per-channel kernels plus the effective coincidence window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseModel {
    pub kernels: Channels<Kernel>,
    pub window_half_width: f64,
}

impl ResponseModel {
    /// Continuous-time model: uniform jitter per detector, window `±τ_coin`.
    pub fn continuous(detectors: &Channels<DetectorParams>, window: &WindowParams) -> Self {
        ResponseModel { kernels: detectors.map(|d| Kernel::from(d)), window_half_width: window.half_width }
    }

    /// Model matching counts taken by the coincidence engine on tick data.
    ///
    /// Windows are closed intervals of `±K` ticks with `K = ⌊τ_coin/q⌋`.
    /// Flooring every tag to the tick grid makes the lag between an idler
    /// tag and a signal tag, as seen through the window, equal to the
    /// continuous lag shifted by `(φ − ½)q` with `φ` the fractional tick
    /// phase of the idler, and counted in a continuous window of half-width
    /// `(K + ½)q`. Both signal lags share the idler phase, so this is an
    /// extra uniform of half-width `q/2` on the idler kernel.
    pub fn tagged(detectors: &Channels<DetectorParams>, window: &WindowParams) -> Result<Self> {
        let q = common_clock_quantum(detectors)?;
        let k = window_ticks(window.half_width, q)?;
        let mut kernels = detectors.map(|d| Kernel::from(d));
        kernels.i = kernels.i.with(0.5 * q);
        Ok(ResponseModel { kernels, window_half_width: (k as f64 + 0.5) * q })
    }

    /// Smallest total kernel reach over the three channels.
    fn min_reach(&self) -> f64 {
        Channel::ALL.iter().map(|&c| self.kernels[c].reach()).fold(f64::INFINITY, f64::min)
    }

    fn max_reach(&self) -> f64 {
        Channel::ALL.iter().map(|&c| self.kernels[c].reach()).fold(0.0, f64::max)
    }
}

/// Tick shared by all channels; mixed tick sizes are rejected.
pub fn common_clock_quantum(detectors: &Channels<DetectorParams>) -> Result<f64> {
    let q = detectors.i.clock_quantum;
    if detectors.s1.clock_quantum != q || detectors.s2.clock_quantum != q {
        return Err(invalid("all channels must share one clock_quantum"));
    }
    Ok(q)
}

/// Integration path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Impulse path when `Δt` is below 1/100 of every kernel reach,
    /// otherwise exact.
    #[default]
    Auto,
    /// Exact piecewise integration.
    Exact,
    /// `|C|²` replaced by an impulse of weight `R`, `R²` by one of weight
    /// `2R²Δt/3` and the joint term by a 2-D impulse of weight `2R²Δt/3`.
    /// Terms whose kernels are all deltas fall back to the exact path.
    Impulse,
}

/// Ratio of kernel reach to `Δt` above which [`Method::Auto`] picks the
/// impulse path.
pub const IMPULSE_RATIO: f64 = 100.0;

/// Sum of uniforms; `None` when every width is zero.
fn stack_density(boxes: &[f64]) -> Option<PiecewisePoly> {
    let mut it = boxes.iter().copied().filter(|&h| h > 0.0);
    let first = it.next()?;
    Some(it.fold(PiecewisePoly::uniform(first), |p, h| p.convolve_uniform(h)))
}

fn convolve_all(mut p: PiecewisePoly, boxes: &[f64]) -> PiecewisePoly {
    for &h in boxes {
        p = p.convolve_uniform(h);
    }
    p
}

fn concat(parts: &[&[f64]]) -> Vec<f64> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// `E|C(x + Σ U)|²` as a function of `x`.
fn cross_profile(p: &SpdcParams, boxes: &[f64], impulse: bool) -> PiecewisePoly {
    if impulse {
        if let Some(d) = stack_density(boxes) {
            return d.scaled(p.pair_rate);
        }
    }
    convolve_all(PiecewisePoly::rect(0.5 * p.corr_width, p.cross_density()), boxes)
}

/// `E R²(x + Σ U)` as a function of `x`.
fn bunching_profile(p: &SpdcParams, boxes: &[f64], impulse: bool) -> PiecewisePoly {
    let r2 = p.pair_rate * p.pair_rate;
    if impulse {
        if let Some(d) = stack_density(boxes) {
            return d.scaled(r2 * 2.0 * p.corr_width / 3.0);
        }
    }
    convolve_all(PiecewisePoly::squared_triangle(p.corr_width, r2), boxes)
}

fn product_integral(factors: &[&PiecewisePoly]) -> f64 {
    let mut acc = factors[0].clone();
    for f in &factors[1..] {
        match acc.mul(f) {
            Some(p) => acc = p,
            None => return 0.0,
        }
    }
    acc.integral()
}

// 8-point Gauss–Legendre on [-1, 1]
const GL_NODES: [f64; 4] =
    [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL_WEIGHTS: [f64; 4] =
    [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

fn gauss_legendre(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
        s += w * (f(mid - half * x) + f(mid + half * x));
    }
    s * half
}

/// Signal-side offsets and the shared idler offset for a triple average.
struct TripleSetup<'a> {
    s1: &'a [f64],
    s2: &'a [f64],
    idler: &'a [f64],
}

/// `E[C(x₁)C(x₂)R(x₁−x₂)]`, exact.
fn joint_exact(p: &SpdcParams, k: &TripleSetup<'_>, t1: f64, t2: f64) -> f64 {
    let dt = p.corr_width;
    let p1 = stack_density(k.s1);
    let p2 = stack_density(k.s2);
    let u = stack_density(k.idler);
    let breaks = |d: &Option<PiecewisePoly>| d.as_ref().map_or(vec![0.0], |d| d.breaks().to_vec());
    let (b1, b2, bu) = (breaks(&p1), breaks(&p2), breaks(&u));

    let integrand = |v: f64| -> f64 {
        let h = 0.5 * (dt - v.abs());
        let c = 0.5 * v;
        let weight = (2.0 * h / dt).powi(2);
        let side = |d: &Option<PiecewisePoly>, t: f64| match d {
            Some(d) => d.convolve_uniform(h).shifted(t - c),
            None => PiecewisePoly::uniform(h).shifted(t - c),
        };
        let a = side(&p1, t1);
        let b = side(&p2, t2);
        let inner = match &u {
            Some(u) => product_integral(&[u, &a, &b]),
            None => a.eval(0.0) * b.eval(0.0),
        };
        weight * inner
    };

    let mut total = 0.0;
    for positive in [false, true] {
        let (lo, hi) = if positive { (0.0, dt) } else { (-dt, 0.0) };
        // integrand breaks in m: moving ones at α − v, fixed ones at f
        let (mov, fix) = if positive { (0.5 * dt, -0.5 * dt) } else { (-0.5 * dt, 0.5 * dt) };
        let moving: Vec<f64> = b1.iter().map(|b| b + t1 + mov).chain(b2.iter().map(|b| b + t2 + mov)).collect();
        let fixed: Vec<f64> =
            b1.iter().map(|b| b + t1 + fix).chain(b2.iter().map(|b| b + t2 + fix)).chain(bu.iter().copied()).collect();
        let mut cuts = vec![lo, hi];
        for a in &moving {
            for f in &fixed {
                let v = a - f;
                if v > lo && v < hi {
                    cuts.push(v);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        for w in cuts.windows(2) {
            if w[1] > w[0] {
                total += gauss_legendre(w[0], w[1], integrand);
            }
        }
    }
    p.pair_rate * p.pair_rate * total
}

/// Impulse approximation of the joint term.
fn joint_impulse(p: &SpdcParams, k: &TripleSetup<'_>, t1: f64, t2: f64) -> Option<f64> {
    let weight = 2.0 * p.pair_rate * p.pair_rate * p.corr_width / 3.0;
    let p1 = stack_density(k.s1)?.shifted(t1);
    let p2 = stack_density(k.s2)?.shifted(t2);
    // x₁ = 0 ⇔ s₁ = m − t₁
    let density = match stack_density(k.idler) {
        Some(u) => product_integral(&[&u, &p1, &p2]),
        None => p1.eval(0.0) * p2.eval(0.0),
    };
    Some(weight * density)
}

/// Per signal detector pair-rate profiles.
#[derive(Debug, Clone)]
struct Signals {
    s1: PiecewisePoly,
    s2: PiecewisePoly,
}

impl Signals {
    fn get(&self, s: Channel) -> &PiecewisePoly {
        match s {
            Channel::S1 => &self.s1,
            Channel::S2 => &self.s2,
            Channel::I => panic!("signal channel expected"),
        }
    }
}

/// Rate evaluator for one source and response model.
#[derive(Debug, Clone)]
pub struct Averager {
    spdc: SpdcParams,
    model: ResponseModel,
    impulse: bool,
    pair_win: Signals,
    pair_raw: Signals,
    bunch_win: PiecewisePoly,
    bunch_raw: PiecewisePoly,
    boxes_win: Channels<Vec<f64>>,
}

impl Averager {
    pub fn new(spdc: SpdcParams, model: ResponseModel, method: Method) -> Result<Self> {
        spdc.validate()?;
        if !(model.window_half_width > 0.0) {
            return Err(invalid("window half-width must be > 0"));
        }
        let impulse = match method {
            Method::Exact => false,
            Method::Impulse => true,
            Method::Auto => spdc.corr_width * IMPULSE_RATIO < model.min_reach(),
        };
        let w = model.window_half_width;
        let k = &model.kernels;
        let boxes_win = k.map(|kc| concat(&[kc.half_widths(), &[w]]));
        let ki = k.i.half_widths();
        let pair_win = Signals {
            s1: cross_profile(&spdc, &concat(&[ki, &boxes_win.s1]), impulse),
            s2: cross_profile(&spdc, &concat(&[ki, &boxes_win.s2]), impulse),
        };
        let pair_raw = Signals {
            s1: cross_profile(&spdc, &concat(&[ki, k.s1.half_widths()]), impulse),
            s2: cross_profile(&spdc, &concat(&[ki, k.s2.half_widths()]), impulse),
        };
        let bunch_win = bunching_profile(&spdc, &concat(&[&boxes_win.s1, &boxes_win.s2]), impulse);
        let bunch_raw = bunching_profile(&spdc, &concat(&[k.s1.half_widths(), k.s2.half_widths()]), impulse);
        Ok(Averager { spdc, model, impulse, pair_win, pair_raw, bunch_win, bunch_raw, boxes_win })
    }

    /// Paper-style model (continuous time) with automatic path selection.
    pub fn continuous(spdc: SpdcParams, detectors: &Channels<DetectorParams>, window: &WindowParams) -> Result<Self> {
        for (_, d) in detectors.iter() {
            d.validate()?;
        }
        window.validate()?;
        Self::new(spdc, ResponseModel::continuous(detectors, window), Method::Auto)
    }

    pub fn spdc(&self) -> &SpdcParams {
        &self.spdc
    }

    pub fn model(&self) -> &ResponseModel {
        &self.model
    }

    pub fn uses_impulse(&self) -> bool {
        self.impulse
    }

    fn r2(&self) -> f64 {
        self.spdc.pair_rate * self.spdc.pair_rate
    }

    /// `P̄_si(τ)` between the idler and signal detector `s`.
    pub fn smoothed_pair_rate(&self, s: Channel, tau: f64) -> f64 {
        self.r2() + self.pair_raw.get(s).eval(tau)
    }

    /// `N_si(τ)` between the idler and signal detector `s`.
    pub fn averaged_pair_rate(&self, s: Channel, tau: f64) -> f64 {
        self.r2() + self.pair_win.get(s).eval(tau)
    }

    /// `P̄⁽²⁾_si(t₁, t₂, 0)`: s1 at `t1`, s2 at `t2`, idler at 0.
    pub fn smoothed_triple_rate(&self, t1: f64, t2: f64) -> f64 {
        let k = &self.model.kernels;
        let setup = TripleSetup { s1: k.s1.half_widths(), s2: k.s2.half_widths(), idler: k.i.half_widths() };
        self.triple(&setup, &self.pair_raw, &self.bunch_raw, t1, t2)
    }

    /// `N⁽²⁾_si(τ)`: s1 in the window around the herald, s2 in the window
    /// at lag `τ`.
    pub fn averaged_triple_rate(&self, tau: f64) -> f64 {
        let setup =
            TripleSetup { s1: &self.boxes_win.s1, s2: &self.boxes_win.s2, idler: self.model.kernels.i.half_widths() };
        self.triple(&setup, &self.pair_win, &self.bunch_win, 0.0, tau)
    }

    fn triple(&self, setup: &TripleSetup<'_>, pair: &Signals, bunch: &PiecewisePoly, t1: f64, t2: f64) -> f64 {
        let r0 = self.spdc.pair_rate;
        let joint = if self.impulse { joint_impulse(&self.spdc, setup, t1, t2) } else { None }
            .unwrap_or_else(|| joint_exact(&self.spdc, setup, t1, t2));
        r0 * r0 * r0 + r0 * (pair.s1.eval(t1) + pair.s2.eval(t2)) + r0 * bunch.eval(t1 - t2) + 2.0 * joint
    }

    /// `ḡ_si²(τ) = N_si(τ)/R²(0)`, averaged over both signal detectors.
    pub fn g_si2(&self, tau: f64) -> f64 {
        let n = 0.5 * (self.averaged_pair_rate(Channel::S1, tau) + self.averaged_pair_rate(Channel::S2, tau));
        n / self.r2()
    }

    /// `ḡ_c²(τ) = N⁽²⁾(τ)·R(0) / [N_si(0)·N_si(τ)]`.
    pub fn g_c2(&self, tau: f64) -> f64 {
        self.averaged_triple_rate(tau) * self.spdc.pair_rate
            / (self.averaged_pair_rate(Channel::S1, 0.0) * self.averaged_pair_rate(Channel::S2, tau))
    }

    /// Default sampling: 256 points on `±4(τ_coin + τ_d)`.
    pub fn default_taus(&self) -> Vec<f64> {
        let span = 4.0 * (self.model.window_half_width + self.model.max_reach());
        crate::curve::symmetric_grid(span, 256)
    }

    fn snapshot(&self, detectors: Option<Channels<DetectorParams>>) -> ParamsSnapshot {
        ParamsSnapshot {
            spdc: Some(self.spdc),
            detectors,
            window: Some(WindowParams { half_width: self.model.window_half_width }),
            clock_quantum: detectors.map(|d| d.i.clock_quantum),
        }
    }

    pub fn g_si2_curve(&self, taus: &[f64], detectors: Option<Channels<DetectorParams>>) -> Result<CoherenceCurve> {
        check_taus(taus)?;
        let values = taus.iter().map(|&t| self.g_si2(t)).collect();
        CoherenceCurve::new(taus.to_vec(), values, None, CurveKind::Analytic, self.snapshot(detectors))
    }

    pub fn g_c2_curve(&self, taus: &[f64], detectors: Option<Channels<DetectorParams>>) -> Result<CoherenceCurve> {
        check_taus(taus)?;
        let values = taus.iter().map(|&t| self.g_c2(t)).collect();
        CoherenceCurve::new(taus.to_vec(), values, None, CurveKind::Analytic, self.snapshot(detectors))
    }
}

fn check_taus(taus: &[f64]) -> Result<()> {
    if taus.is_empty() {
        return Err(invalid("empty tau grid"));
    }
    if taus.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("tau grid must be strictly increasing"));
    }
    if taus.iter().any(|t| !t.is_finite()) {
        return Err(invalid("tau grid must be finite"));
    }
    Ok(())
}

fn shared(d: &DetectorParams) -> Channels<DetectorParams> {
    Channels::splat(*d)
}

/// `P̄_si(τ)` with the same detector model on both arms.
pub fn smoothed_pair_rate(p: &SpdcParams, d: &DetectorParams, tau: f64) -> Result<f64> {
    // the window does not enter the smoothed rate
    let a = Averager::continuous(*p, &shared(d), &WindowParams { half_width: 1.0 })?;
    Ok(a.smoothed_pair_rate(Channel::S1, tau))
}

/// `N_si(τ)` with the same detector model on both arms.
pub fn averaged_pair_rate(p: &SpdcParams, d: &DetectorParams, w: &WindowParams, tau: f64) -> Result<f64> {
    let a = Averager::continuous(*p, &shared(d), w)?;
    Ok(a.averaged_pair_rate(Channel::S1, tau))
}

pub fn g_si2_avg_curve(p: &SpdcParams, d: &DetectorParams, w: &WindowParams, taus: &[f64]) -> Result<CoherenceCurve> {
    let dets = shared(d);
    Averager::continuous(*p, &dets, w)?.g_si2_curve(taus, Some(dets))
}

pub fn smoothed_triple_rate(
    p: &SpdcParams,
    d_i: &DetectorParams,
    d_s1: &DetectorParams,
    d_s2: &DetectorParams,
    t1: f64,
    t2: f64,
) -> Result<f64> {
    let dets = Channels { i: *d_i, s1: *d_s1, s2: *d_s2 };
    let a = Averager::continuous(*p, &dets, &WindowParams { half_width: 1.0 })?;
    Ok(a.smoothed_triple_rate(t1, t2))
}

pub fn averaged_triple_rate(
    p: &SpdcParams,
    dets: &Channels<DetectorParams>,
    w: &WindowParams,
    tau: f64,
) -> Result<f64> {
    Ok(Averager::continuous(*p, dets, w)?.averaged_triple_rate(tau))
}

pub fn g_c2_avg_curve(
    p: &SpdcParams,
    dets: &Channels<DetectorParams>,
    w: &WindowParams,
    taus: &[f64],
) -> Result<CoherenceCurve> {
    Averager::continuous(*p, dets, w)?.g_c2_curve(taus, Some(*dets))
}

/// `ḡ_c²(0)` against the full window `2τ_coin`, for the given detectors and
/// for ideal (zero-jitter) detectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSweep {
    pub full_widths: Vec<f64>,
    pub values: Vec<f64>,
    pub ideal_values: Vec<f64>,
}

pub fn g_c2_zero_vs_window(
    p: &SpdcParams,
    dets: &Channels<DetectorParams>,
    full_widths: &[f64],
) -> Result<WindowSweep> {
    if full_widths.is_empty() {
        return Err(invalid("empty window list"));
    }
    let ideal = dets.map(|d| d.with_jitter(0.0));
    let mut values = Vec::with_capacity(full_widths.len());
    let mut ideal_values = Vec::with_capacity(full_widths.len());
    for &fw in full_widths {
        let w = WindowParams::from_full_width(fw)?;
        values.push(Averager::continuous(*p, dets, &w)?.g_c2(0.0));
        ideal_values.push(Averager::continuous(*p, &ideal, &w)?.g_c2(0.0));
    }
    Ok(WindowSweep { full_widths: full_widths.to_vec(), values, ideal_values })
}
