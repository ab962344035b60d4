use serde::{Deserialize, Serialize};

use super::design::{regress, Design};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Detrended {
    /// NaN where the input is missing.
    pub residuals: Vec<f64>,
    /// Intercept, then coefficients on `t`, `t²` (with `t = 1, 2, …`).
    pub coefficients: Vec<f64>,
}

/// Removes a polynomial trend of degree `order` (0: mean, 1: linear,
/// 2: quadratic) by least squares.
pub fn detrend(series: &[f64], order: usize) -> Result<Detrended> {
    if order > 2 {
        return Err(Error::InvalidInput(format!("detrend order must be 0, 1 or 2, got {order}")));
    }
    let n = series.len();
    let mut d = Design::new();
    d.intercept(n);
    for p in 1..=order {
        d.push(format!("t{p}"), (1..=n).map(|t| (t as f64).powi(p as i32)).collect());
    }
    let r = regress(series, &d, None, 0, "detrend")?;
    Ok(Detrended { residuals: r.residual_series(n), coefficients: r.fit.beta.iter().copied().collect() })
}

/// Deterministic terms of a regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Deterministic {
    pub intercept: bool,
    /// Highest power of the time trend, 0 for none.
    pub trend_order: usize,
}

impl Default for Deterministic {
    fn default() -> Self {
        Self { intercept: true, trend_order: 2 }
    }
}

impl Deterministic {
    pub const NONE: Self = Self { intercept: false, trend_order: 0 };

    /// Appends the terms, with time scaled to `(0, 1]` for conditioning.
    pub fn append(&self, design: &mut Design, n: usize) {
        if self.intercept {
            design.intercept(n);
        }
        for p in 1..=self.trend_order {
            design.push(format!("trend{p}"), (1..=n).map(|t| (t as f64 / n as f64).powi(p as i32)).collect());
        }
    }

    pub fn count(&self) -> usize {
        usize::from(self.intercept) + self.trend_order
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_trend_removed_exactly() {
        let y: Vec<f64> = (1..=30).map(|t| 3.0 + 2.0 * t as f64).collect();
        let d = detrend(&y, 1).unwrap();
        assert!(d.residuals.iter().all(|r| r.abs() < 1e-10));
        assert!((d.coefficients[0] - 3.0).abs() < 1e-9 && (d.coefficients[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn constant_demeaned() {
        let d = detrend(&[4.0; 10], 0).unwrap();
        assert!(d.residuals.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn residuals_orthogonal_to_trend() {
        let y: Vec<f64> = (0..50).map(|t| ((t * 17) % 13) as f64 + 0.01 * (t * t) as f64).collect();
        let d = detrend(&y, 2).unwrap();
        for p in 0..=2 {
            let dot: f64 = d.residuals.iter().enumerate().map(|(i, r)| r * ((i + 1) as f64).powi(p)).sum();
            assert!(dot.abs() < 1e-10 * 50f64.powi(p + 1), "power {p}: {dot}");
        }
        assert!(detrend(&y, 3).is_err());
    }

    #[test]
    fn missing_values_stay_missing() {
        let mut y: Vec<f64> = (0..10).map(|t| t as f64).collect();
        y[3] = f64::NAN;
        let d = detrend(&y, 1).unwrap();
        assert!(d.residuals[3].is_nan() && d.residuals[4].abs() < 1e-10);
    }
}
