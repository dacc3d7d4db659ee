//! Low-gain SPDC correlation functions and the instantaneous coherence
//! quantities obtained from them by Gaussian moment factoring.
//!
//! The source is described by its pair rate `R` and correlation width `Δt`.
//! The auto-correlation of either beam is a triangle of height `R` and
//! half-base `Δt`; the magnitude of the signal–idler cross-correlation is a
//! rectangle of height `√(R/Δt)` and full width `Δt`. The cross-correlation
//! is taken as real and non-negative, so the interference term of the triple
//! rate reduces to a product of magnitudes.
//!
//! All quantities are in SI units (seconds, events per second).

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Above this value of `R·Δt` the low-gain approximation is flagged.
pub const LOW_GAIN_LIMIT: f64 = 1e-3;

/// Continuous-wave SPDC source in the low-gain regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpdcParams {
    /// Pair generation rate `R`, events per second.
    pub pair_rate: f64,
    /// Correlation width `Δt` (inverse SPDC bandwidth), seconds.
    pub corr_width: f64,
    /// Pump angular frequency, rad/s. Metadata only: no magnitude-level
    /// observable depends on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pump_freq: Option<f64>,
}

impl SpdcParams {
    pub fn new(pair_rate: f64, corr_width: f64) -> Result<Self> {
        let p = SpdcParams { pair_rate, corr_width, pump_freq: None };
        p.validate()?;
        if !p.is_low_gain() {
            log::warn!(
                "R·Δt = {:.3e} exceeds {:e}; low-gain model may be inaccurate",
                p.gain_parameter(),
                LOW_GAIN_LIMIT
            );
        }
        Ok(p)
    }

    pub fn with_pump_freq(mut self, omega: f64) -> Self {
        self.pump_freq = Some(omega);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pair_rate.is_finite() && self.pair_rate > 0.0) {
            return Err(invalid(format!("pair_rate must be > 0, got {}", self.pair_rate)));
        }
        if !(self.corr_width.is_finite() && self.corr_width > 0.0) {
            return Err(invalid(format!("corr_width must be > 0, got {}", self.corr_width)));
        }
        if let Some(w) = self.pump_freq {
            if !w.is_finite() {
                return Err(invalid("pump_freq must be finite"));
            }
        }
        Ok(())
    }

    /// `R·Δt`, the mean number of pairs per correlation time.
    pub fn gain_parameter(&self) -> f64 {
        self.pair_rate * self.corr_width
    }

    pub fn is_low_gain(&self) -> bool {
        self.gain_parameter() <= LOW_GAIN_LIMIT
    }

    /// Height of `|C(τ)|²` on its support, `R/Δt`.
    pub fn cross_density(&self) -> f64 {
        self.pair_rate / self.corr_width
    }
}

/// Auto-correlation `R(τ)` of either beam.
pub fn autocorr(p: &SpdcParams, tau: f64) -> f64 {
    let x = tau.abs() / p.corr_width;
    if x <= 1.0 {
        p.pair_rate * (1.0 - x)
    } else {
        0.0
    }
}

/// Magnitude of the signal–idler cross-correlation `|C(τ)|`.
pub fn crosscorr_mag(p: &SpdcParams, tau: f64) -> f64 {
    crosscorr_sq(p, tau).sqrt()
}

/// `|C(τ)|²`; avoids the square root for rate sums.
pub fn crosscorr_sq(p: &SpdcParams, tau: f64) -> f64 {
    if tau.abs() < 0.5 * p.corr_width {
        p.cross_density()
    } else {
        0.0
    }
}

/// Signal–idler coincidence rate `R²(0) + |C(τ)|²` for a signal at `t+τ`
/// and an idler at `t`.
pub fn pair_rate(p: &SpdcParams, tau: f64) -> f64 {
    p.pair_rate * p.pair_rate + crosscorr_sq(p, tau)
}

/// Instantaneous signal–idler cross-coherence `1 + |C(τ)/R(0)|²`.
pub fn g_si2_instant(p: &SpdcParams, tau: f64) -> f64 {
    1.0 + crosscorr_sq(p, tau) / (p.pair_rate * p.pair_rate)
}

/// Triple-coincidence rate for signal photons at `t1`, `t2` and an idler
/// photon at `ti`.
pub fn triple_rate(p: &SpdcParams, t1: f64, t2: f64, ti: f64) -> f64 {
    let r0 = p.pair_rate;
    let r12 = autocorr(p, t1 - t2);
    let c1 = crosscorr_mag(p, t1 - ti);
    let c2 = crosscorr_mag(p, t2 - ti);
    r0 * (r0 * r0 + r12 * r12) + 2.0 * c1 * c2 * r12 + r0 * (c1 * c1 + c2 * c2)
}

/// Heralded conditional coherence of the signal at `t1`, `t2` given an idler
/// detection at `ti`.
pub fn conditional_g2(p: &SpdcParams, t1: f64, t2: f64, ti: f64) -> f64 {
    triple_rate(p, t1, t2, ti) * p.pair_rate / (pair_rate(p, t1 - ti) * pair_rate(p, t2 - ti))
}

/// Conditional coherence with both signal times at the trigger time.
pub fn herald_time_g2(p: &SpdcParams) -> f64 {
    let r2 = p.pair_rate * p.pair_rate;
    let c2 = p.cross_density();
    // 2 − 2c⁴/(r²+c²)² rewritten to avoid cancellation when c² ≫ r².
    2.0 * r2 * (r2 + 2.0 * c2) / ((r2 + c2) * (r2 + c2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lab() -> SpdcParams {
        SpdcParams::new(43e6, 1.0 / 3e12).unwrap()
    }

    #[test]
    fn autocorr_examples() {
        let p = lab();
        assert_eq!(autocorr(&p, 0.0), 43e6);
        assert_eq!(autocorr(&p, 2.0 * p.corr_width), 0.0);
        assert_relative_eq!(autocorr(&p, 0.5 * p.corr_width), 21.5e6, max_relative = 1e-15);
        assert_eq!(autocorr(&p, -0.3e-12), autocorr(&p, 0.3e-12));
    }

    #[test]
    fn crosscorr_examples() {
        let p = lab();
        assert_relative_eq!(crosscorr_mag(&p, 0.0), (43e6f64 * 3e12).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(crosscorr_mag(&p, 0.0), 1.136e10, max_relative = 1e-3);
        assert_eq!(crosscorr_mag(&p, p.corr_width), 0.0);
        assert_eq!(crosscorr_mag(&p, -0.25 * p.corr_width), crosscorr_mag(&p, 0.0));
        // the support edge is open
        assert_eq!(crosscorr_mag(&p, 0.5 * p.corr_width), 0.0);
    }

    #[test]
    fn pair_rate_examples() {
        let p = lab();
        assert_relative_eq!(pair_rate(&p, 1e-9), 1.849e15, max_relative = 1e-12);
        assert_relative_eq!(pair_rate(&p, 0.0), 1.849e15 + 43e6 * 3e12, max_relative = 1e-12);
        assert_relative_eq!(pair_rate(&p, 0.0), 1.290e20, max_relative = 1e-3);
    }

    #[test]
    fn g_si2_peak() {
        let p = lab();
        let peak = g_si2_instant(&p, 0.0);
        assert_relative_eq!(peak, 1.0 + 1.0 / (p.corr_width * p.pair_rate), max_relative = 1e-12);
        assert_relative_eq!(peak, 7e4, max_relative = 0.01);
        assert_eq!(g_si2_instant(&p, 1e-9), 1.0);
    }

    #[test]
    fn triple_rate_limits() {
        let p = lab();
        let r0 = p.pair_rate;
        let c2 = p.cross_density();
        assert_relative_eq!(
            triple_rate(&p, 0.0, 0.0, 0.0),
            r0 * 2.0 * r0 * r0 + 2.0 * c2 * r0 + 2.0 * r0 * c2,
            max_relative = 1e-12
        );
        assert_relative_eq!(triple_rate(&p, 0.0, 1e-9, 0.0), r0 * pair_rate(&p, 0.0), max_relative = 1e-12);
        assert_relative_eq!(triple_rate(&p, 1e-9, -1e-9, 0.0), r0.powi(3), max_relative = 1e-12);
    }

    #[test]
    fn conditional_limits() {
        let p = lab();
        let g0 = conditional_g2(&p, 0.0, 0.0, 0.0);
        assert!((5e-5..7e-5).contains(&g0), "{g0}");
        assert_relative_eq!(conditional_g2(&p, 0.0, 1e-9, 0.0), 1.0, max_relative = 1e-12);
        assert_relative_eq!(conditional_g2(&p, 1e-9, 1e-9, 0.0), 2.0, max_relative = 1e-12);
    }

    #[test]
    fn herald_time_examples() {
        let p = lab();
        let g = herald_time_g2(&p);
        // exact evaluation of 2 - 2c⁴/(r²+c²)² in extended form
        let r2 = 43e6f64 * 43e6;
        let c2 = 43e6 * 3e12;
        let direct = 2.0 - 2.0 * c2 * c2 / ((r2 + c2) * (r2 + c2));
        assert_relative_eq!(g, direct, max_relative = 1e-6);
        assert_relative_eq!(g, 5.733e-5, max_relative = 1e-3);
        assert_relative_eq!(g, conditional_g2(&p, 0.0, 0.0, 0.0), max_relative = 1e-12);

        let bright = SpdcParams { pair_rate: 1e3, corr_width: 1e-13, pump_freq: None };
        assert!(herald_time_g2(&bright) < 1e-9);
        let thermal = SpdcParams { pair_rate: 1e12, corr_width: 1e-6, pump_freq: None };
        assert_relative_eq!(herald_time_g2(&thermal), 2.0, max_relative = 1e-6);
    }

    #[test]
    fn rejects_invalid() {
        assert!(SpdcParams::new(0.0, 1e-12).is_err());
        assert!(SpdcParams::new(1e6, -1.0).is_err());
        assert!(SpdcParams::new(f64::NAN, 1e-12).is_err());
        assert!(!SpdcParams { pair_rate: 1e10, corr_width: 1e-12, pump_freq: None }.is_low_gain());
    }
}
