//! Pointwise agreement between two coherence curves on a shared τ grid.

use std::fmt::Write as _;

use serde::Serialize;

use crate::curve::{fmt_f64, CoherenceCurve};
use crate::error::{Error, Result};

pub const DEFAULT_THRESHOLD: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZPoint {
    pub tau: f64,
    pub reference: f64,
    pub estimate: f64,
    pub sigma: f64,
    /// Infinite when the values differ and neither carries an error.
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub points: Vec<ZPoint>,
    pub max_abs_z: f64,
    pub mean_z: f64,
    pub worst_tau: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn same_grid(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("{} vs {} points", a.len(), b.len())));
    }
    let scale = a.iter().chain(b).fold(0.0f64, |m, t| m.max(t.abs()));
    let tol = 1e-9 * scale;
    if let Some((i, (x, y))) = a.iter().zip(b).enumerate().find(|(_, (x, y))| (*x - *y).abs() > tol) {
        return Err(Error::GridMismatch(format!("point {i}: tau {x:e} vs {y:e}")));
    }
    Ok(())
}

/// Standardized residuals `(estimate − reference)/σ` with the two curves'
/// errors added in quadrature. Passes when every `|z| ≤ threshold`.
pub fn compare(reference: &CoherenceCurve, estimate: &CoherenceCurve, threshold: f64) -> Result<CompareReport> {
    same_grid(&reference.taus, &estimate.taus)?;
    if reference.is_empty() {
        return Err(Error::GridMismatch("empty grid".into()));
    }
    let sig = |c: &CoherenceCurve, i: usize| c.sigmas.as_ref().map_or(0.0, |s| s[i]);
    let points: Vec<ZPoint> = (0..reference.len())
        .map(|i| {
            let sigma = sig(reference, i).hypot(sig(estimate, i));
            let d = estimate.values[i] - reference.values[i];
            let z = if d == 0.0 { 0.0 } else { d / sigma };
            ZPoint { tau: reference.taus[i], reference: reference.values[i], estimate: estimate.values[i], sigma, z }
        })
        .collect();
    let worst = points.iter().max_by(|a, b| a.z.abs().total_cmp(&b.z.abs())).expect("non-empty");
    let max_abs_z = worst.z.abs();
    let worst_tau = worst.tau;
    let mean_z = points.iter().map(|p| p.z).sum::<f64>() / points.len() as f64;
    Ok(CompareReport { max_abs_z, mean_z, worst_tau, threshold, pass: max_abs_z <= threshold, points })
}

impl CompareReport {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| !(p.z.abs() <= self.threshold)).count()
    }

    /// Fixed-format summary.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "points      {}", self.points.len());
        let _ = writeln!(s, "max |z|     {}", fmt_f64(self.max_abs_z));
        let _ = writeln!(s, "mean z      {}", fmt_f64(self.mean_z));
        let _ = writeln!(s, "worst tau_s {}", fmt_f64(self.worst_tau));
        let _ = writeln!(s, "threshold   {}", fmt_f64(self.threshold));
        let _ = writeln!(s, "failures    {}", self.failures());
        let _ = writeln!(s, "result      {}", if self.pass { "PASS" } else { "FAIL" });
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CurveKind, ParamsSnapshot};

    fn curve(values: Vec<f64>, sigma: f64) -> CoherenceCurve {
        let n = values.len();
        let taus = (0..n).map(|i| i as f64 * 1e-10).collect();
        CoherenceCurve::new(taus, values, Some(vec![sigma; n]), CurveKind::Simulated, ParamsSnapshot::default())
            .unwrap()
    }

    #[test]
    fn self_comparison_passes_with_zero_z() {
        let c = curve(vec![1.0, 2.0, 0.5], 0.1);
        let r = compare(&c, &c, 3.0).unwrap();
        assert_eq!(r.max_abs_z, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn offsets_fail() {
        let a = curve(vec![1.0, 1.0], 0.1);
        let b = curve(vec![1.0, 1.5], 0.1);
        let r = compare(&a, &b, 3.0).unwrap();
        assert!(!r.pass);
        assert_eq!(r.worst_tau, 1e-10);
        assert!((r.max_abs_z - 0.5 / 0.1f64.hypot(0.1)).abs() < 1e-12);
        assert!(r.to_text().ends_with("result      FAIL\n"));
    }

    #[test]
    fn grid_mismatch() {
        let a = curve(vec![1.0, 1.0], 0.1);
        let b = curve(vec![1.0, 1.0, 1.0], 0.1);
        assert!(matches!(compare(&a, &b, 3.0), Err(Error::GridMismatch(_))));
        let mut c = a.clone();
        c.taus[1] = 2e-10;
        assert!(matches!(compare(&a, &c, 3.0), Err(Error::GridMismatch(_))));
    }
}
