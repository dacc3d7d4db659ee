//! Run configuration: one TOML file plus command-line overrides.
//!
//! Every duration and rate may be written as a bare SI number or as a
//! string with a unit. Unknown keys are rejected.

use std::path::Path;

use hsps_core::coincidence_engine::LagGrid;
use hsps_core::tag_stream_sim::SimConfig;
use hsps_core::time_averaging::common_clock_quantum;
use hsps_core::{Channel, Channels, DetectorParams, SpdcParams, WindowParams};
use serde::{Deserialize, Serialize};

use crate::units::{Dim, Quantity};
use crate::CliError;

fn q(s: &str) -> Quantity {
    Quantity::Text(s.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceConfig {
    pub pair_rate: Quantity,
    /// `Δt`, or the bandwidth `1/Δt` when given in hertz.
    pub corr_width: Quantity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pump_freq: Option<Quantity>,
}

impl Default for SourceConfig {
    fn default() -> Self {
        SourceConfig { pair_rate: q("1 MHz"), corr_width: q("3 THz"), pump_freq: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorOverride {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jitter: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dead_time: Option<Quantity>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub efficiency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorsConfig {
    /// Half-width `τ_d` of the uniform jitter.
    pub jitter: Quantity,
    pub dead_time: Quantity,
    pub efficiency: f64,
    /// Shared by all channels.
    pub clock_quantum: Quantity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<DetectorOverride>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s1: Option<DetectorOverride>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s2: Option<DetectorOverride>,
}

impl Default for DetectorsConfig {
    fn default() -> Self {
        DetectorsConfig {
            jitter: q("0.35 ns"),
            dead_time: Quantity::Number(0.0),
            efficiency: 1.0,
            clock_quantum: q("156.25 ps"),
            i: None,
            s1: None,
            s2: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowConfig {
    /// Full coincidence window `2τ_coin`.
    pub full_width: Quantity,
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig { full_width: q("0.78 ns") }
    }
}

/// τ sampling. With `step` the grid is whole ticks on `[-span, span]`;
/// otherwise `points` evenly spaced values (theory only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub span: Option<Quantity>,
    pub points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<Quantity>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { span: None, points: 256, step: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Continuous-time window and jitter.
    Continuous,
    /// Matches estimates from tick data.
    Tagged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TheoryConfig {
    pub model: Model,
    pub window_min: Quantity,
    pub window_max: Quantity,
    pub window_points: usize,
}

impl Default for TheoryConfig {
    fn default() -> Self {
        TheoryConfig { model: Model::Continuous, window_min: q("0.1 ns"), window_max: q("5 ns"), window_points: 50 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TagFormat {
    Binary,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub duration: Quantity,
    pub seed: u64,
    pub splitter_ratio: f64,
    pub format: TagFormat,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig { duration: q("10 s"), seed: 1, splitter_ratio: 0.5, format: TagFormat::Binary }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalyzeConfig {
    pub herald: Channel,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        AnalyzeConfig { herald: Channel::I }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub source: SourceConfig,
    pub detectors: DetectorsConfig,
    pub window: WindowConfig,
    pub grid: GridConfig,
    pub theory: TheoryConfig,
    pub simulate: SimulateConfig,
    pub analyze: AnalyzeConfig,
}

/// Command-line overrides; flags win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub rate: Option<String>,
    pub corr_width: Option<String>,
    pub jitter: Option<String>,
    pub window: Option<String>,
    pub duration: Option<String>,
    pub seed: Option<u64>,
}

fn field<T>(path: &str, r: Result<T, String>) -> Result<T, CliError> {
    r.map_err(|e| CliError::Validation(format!("{path}: {e}")))
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        // flags are checked here so errors name the flag
        if let Some(s) = &o.rate {
            field("--rate", crate::units::parse_as(s, Dim::Rate))?;
            self.source.pair_rate = q(s);
        }
        if let Some(s) = &o.corr_width {
            field("--corr-width", crate::units::parse_width(s))?;
            self.source.corr_width = q(s);
        }
        if let Some(s) = &o.jitter {
            field("--jitter", crate::units::parse_as(s, Dim::Time))?;
            self.detectors.jitter = q(s);
            for d in [&mut self.detectors.i, &mut self.detectors.s1, &mut self.detectors.s2].into_iter().flatten() {
                d.jitter = None;
            }
        }
        if let Some(s) = &o.window {
            field("--window", crate::units::parse_as(s, Dim::Time))?;
            self.window.full_width = q(s);
        }
        if let Some(s) = &o.duration {
            field("--duration", crate::units::parse_as(s, Dim::Time))?;
            self.simulate.duration = q(s);
        }
        if let Some(seed) = o.seed {
            self.simulate.seed = seed;
        }
        Ok(())
    }

    pub fn spdc(&self) -> Result<SpdcParams, CliError> {
        let rate = field("source.pair_rate", self.source.pair_rate.get(Dim::Rate))?;
        let width = field("source.corr_width", self.source.corr_width.width())?;
        let mut p = field("source", SpdcParams::new(rate, width).map_err(|e| e.to_string()))?;
        if let Some(w) = &self.source.pump_freq {
            p = p.with_pump_freq(field("source.pump_freq", w.get(Dim::Rate))?);
        }
        Ok(p)
    }

    pub fn detectors(&self) -> Result<Channels<DetectorParams>, CliError> {
        let d = &self.detectors;
        let base = DetectorParams {
            jitter_half_width: field("detectors.jitter", d.jitter.get(Dim::Time))?,
            dead_time: field("detectors.dead_time", d.dead_time.get(Dim::Time))?,
            efficiency: d.efficiency,
            clock_quantum: field("detectors.clock_quantum", d.clock_quantum.get(Dim::Time))?,
        };
        let one = |c: Channel, o: &Option<DetectorOverride>| -> Result<DetectorParams, CliError> {
            let mut p = base;
            if let Some(o) = o {
                let path = |k: &str| format!("detectors.{c}.{k}");
                if let Some(j) = &o.jitter {
                    p.jitter_half_width = field(&path("jitter"), j.get(Dim::Time))?;
                }
                if let Some(t) = &o.dead_time {
                    p.dead_time = field(&path("dead_time"), t.get(Dim::Time))?;
                }
                if let Some(e) = o.efficiency {
                    p.efficiency = e;
                }
            }
            field(&format!("detectors.{c}"), p.validate().map_err(|e| e.to_string()))?;
            Ok(p)
        };
        let dets = Channels { i: one(Channel::I, &d.i)?, s1: one(Channel::S1, &d.s1)?, s2: one(Channel::S2, &d.s2)? };
        field("detectors", common_clock_quantum(&dets).map_err(|e| e.to_string()))?;
        Ok(dets)
    }

    pub fn clock_quantum(&self) -> Result<f64, CliError> {
        Ok(self.detectors()?.i.clock_quantum)
    }

    pub fn window(&self) -> Result<WindowParams, CliError> {
        let full = field("window.full_width", self.window.full_width.get(Dim::Time))?;
        field("window.full_width", WindowParams::from_full_width(full).map_err(|e| e.to_string()))
    }

    pub fn span(&self) -> Result<Option<f64>, CliError> {
        self.grid
            .span
            .as_ref()
            .map(|s| {
                let v = field("grid.span", s.get(Dim::Time))?;
                if !(v > 0.0) {
                    return Err(CliError::Validation("grid.span: must be > 0".into()));
                }
                Ok(v)
            })
            .transpose()
    }

    /// Tick grid on `[-span, span]`.
    pub fn lag_grid(&self, default_span: f64, q: f64) -> Result<LagGrid, CliError> {
        let span = self.span()?.unwrap_or(default_span);
        let step = match &self.grid.step {
            Some(s) => field("grid.step", s.get(Dim::Time))?,
            None => q,
        };
        field("grid", LagGrid::from_seconds(-span, span, step, q).map_err(|e| e.to_string()))
    }

    pub fn sim_config(&self) -> Result<SimConfig, CliError> {
        let s = &self.simulate;
        let cfg = SimConfig {
            spdc: self.spdc()?,
            detectors: self.detectors()?,
            splitter_ratio: s.splitter_ratio,
            duration: field("simulate.duration", s.duration.get(Dim::Time))?,
            rng_seed: s.seed,
        };
        field("simulate", cfg.validate().map_err(|e| e.to_string()))?;
        Ok(cfg)
    }

    pub fn theory_windows(&self) -> Result<Vec<f64>, CliError> {
        let t = &self.theory;
        let lo = field("theory.window_min", t.window_min.get(Dim::Time))?;
        let hi = field("theory.window_max", t.window_max.get(Dim::Time))?;
        let n = t.window_points;
        if n == 0 {
            return Err(CliError::Validation("theory.window_points: must be > 0".into()));
        }
        if !(lo > 0.0 && hi >= lo) {
            return Err(CliError::Validation("theory.window_min/max: need 0 < min <= max".into()));
        }
        Ok(match n {
            1 => vec![lo],
            _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
        })
    }
}
