//! Sampled coherence curves and their CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gaussian_model::SpdcParams;
use crate::tags::Channels;
use crate::time_averaging::{DetectorParams, WindowParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Analytic,
    Simulated,
}

/// Parameters a curve was produced from.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParamsSnapshot {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spdc: Option<SpdcParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detectors: Option<Channels<DetectorParams>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<WindowParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clock_quantum: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceCurve {
    pub taus: Vec<f64>,
    pub values: Vec<f64>,
    pub sigmas: Option<Vec<f64>>,
    pub kind: CurveKind,
    pub params: ParamsSnapshot,
}

impl CoherenceCurve {
    pub fn new(
        taus: Vec<f64>,
        values: Vec<f64>,
        sigmas: Option<Vec<f64>>,
        kind: CurveKind,
        params: ParamsSnapshot,
    ) -> Result<Self> {
        let c = CoherenceCurve { taus, values, sigmas, kind, params };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.taus.len() != self.values.len() {
            return Err(invalid("taus and values differ in length"));
        }
        if let Some(s) = &self.sigmas {
            if s.len() != self.taus.len() {
                return Err(invalid("sigmas and taus differ in length"));
            }
            if s.iter().any(|&x| !(x >= 0.0)) {
                return Err(invalid("sigmas must be non-negative"));
            }
        }
        if self.taus.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid("taus must be strictly increasing"));
        }
        if self.values.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(invalid("values must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// Value at the sample nearest to `tau`.
    pub fn nearest(&self, tau: f64) -> Option<(f64, f64)> {
        let i = self.taus.iter().enumerate().min_by(|a, b| (a.1 - tau).abs().total_cmp(&(b.1 - tau).abs()))?.0;
        Some((self.taus[i], self.values[i]))
    }

    /// Writes `tau_s,value[,sigma]` rows. Floats use the shortest
    /// round-tripping representation.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let to_err = |e: csv::Error| Error::Io(e.into());
        match &self.sigmas {
            Some(s) => {
                wr.write_record(["tau_s", "value", "sigma"]).map_err(to_err)?;
                for ((t, v), s) in self.taus.iter().zip(&self.values).zip(s) {
                    wr.write_record([fmt_f64(*t), fmt_f64(*v), fmt_f64(*s)]).map_err(to_err)?;
                }
            }
            None => {
                wr.write_record(["tau_s", "value"]).map_err(to_err)?;
                for (t, v) in self.taus.iter().zip(&self.values) {
                    wr.write_record([fmt_f64(*t), fmt_f64(*v)]).map_err(to_err)?;
                }
            }
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads a curve written by [`write_csv`](Self::write_csv). The sigma
    /// column is optional.
    pub fn read_csv<R: Read>(r: R, kind: CurveKind) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let headers = rd.headers().map_err(csv_err)?.clone();
        let col = |name: &str| headers.iter().position(|h| h.trim() == name);
        let ti = col("tau_s").ok_or_else(|| invalid("missing tau_s column"))?;
        let vi = col("value").ok_or_else(|| invalid("missing value column"))?;
        let si = col("sigma");
        let (mut taus, mut values, mut sigmas) = (vec![], vec![], vec![]);
        for (n, rec) in rd.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let field = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| invalid(format!("row {}: bad number in column {}", n + 2, i + 1)))
            };
            taus.push(field(ti)?);
            values.push(field(vi)?);
            if let Some(si) = si {
                sigmas.push(field(si)?);
            }
        }
        let sigmas = si.map(|_| sigmas);
        CoherenceCurve::new(taus, values, sigmas, kind, ParamsSnapshot::default())
    }
}

fn csv_err(e: csv::Error) -> Error {
    let offset = e.position().map(|p| p.byte()).unwrap_or(0);
    Error::Format { offset, message: e.to_string() }
}

/// Locale-independent float formatting that round-trips exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

/// `n` evenly spaced points on `[-span, span]`.
pub fn symmetric_grid(span: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|k| -span + 2.0 * span * k as f64 / (n - 1) as f64).collect(),
    }
}
