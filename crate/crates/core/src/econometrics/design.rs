use nalgebra::{DMatrix, DVector};

use super::frame::shift;
use super::ols::{ols_named, OlsFit};
use crate::error::{Error, Result};

/// Named regressors over a common time index; NaN marks a missing value.
#[derive(Debug, Clone, Default)]
pub struct Design {
    pub names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Design {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) -> &mut Self {
        self.names.push(name.into());
        self.columns.push(values);
        self
    }

    pub fn intercept(&mut self, n: usize) -> &mut Self {
        self.push("const", vec![1.0; n])
    }

    /// Adds `x_{t−j}` for every `j` in `lags`.
    pub fn lags(&mut self, name: &str, x: &[f64], lags: impl IntoIterator<Item = usize>) -> &mut Self {
        for j in lags {
            self.push(format!("{name}_l{j}"), shift(x, j as isize));
        }
        self
    }

    pub fn extend(&mut self, other: &Design) -> &mut Self {
        self.names.extend(other.names.iter().cloned());
        self.columns.extend(other.columns.iter().cloned());
        self
    }

    /// Rows where `y` and every regressor are observed and `mask` (if any)
    /// is set.
    pub fn complete_rows(&self, y: &[f64], mask: Option<&[bool]>) -> Vec<usize> {
        (0..y.len())
            .filter(|&t| {
                y[t].is_finite()
                    && mask.is_none_or(|m| m[t])
                    && self.columns.iter().all(|c| c[t].is_finite())
            })
            .collect()
    }

    pub fn matrix(&self, rows: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), self.columns.len(), |i, j| self.columns[j][rows[i]])
    }

    /// Evaluates `Σ_j b_j x_j(t)` at every `t` where all regressors exist.
    pub fn predict(&self, beta: &[f64]) -> Vec<f64> {
        let n = self.columns.first().map_or(0, Vec::len);
        (0..n)
            .map(|t| {
                self.columns.iter().zip(beta).map(|(c, b)| c[t] * b).sum::<f64>()
            })
            .map(|v| if v.is_finite() { v } else { f64::NAN })
            .collect()
    }
}

/// Complete-case OLS of `y` on a design.
#[derive(Debug, Clone)]
pub struct Regression {
    pub fit: OlsFit,
    pub names: Vec<String>,
    /// Time indices of the estimation sample.
    pub rows: Vec<usize>,
}

impl Regression {
    pub fn coef(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.fit.beta[i])
    }

    /// Residuals placed back on the full time index, NaN off-sample.
    pub fn residual_series(&self, n: usize) -> Vec<f64> {
        let mut out = vec![f64::NAN; n];
        for (i, &t) in self.rows.iter().enumerate() {
            out[t] = self.fit.residuals[i];
        }
        out
    }
}

/// Fits `y` on `design` over the complete-case rows (restricted to `mask`).
/// `min_extra_rows` demands at least that many rows beyond the regressor
/// count.
pub fn regress(
    y: &[f64],
    design: &Design,
    mask: Option<&[bool]>,
    min_extra_rows: usize,
    context: &str,
) -> Result<Regression> {
    if design.columns.iter().any(|c| c.len() != y.len()) || mask.is_some_and(|m| m.len() != y.len()) {
        return Err(Error::InvalidInput(format!("{context}: series lengths differ")));
    }
    let rows = design.complete_rows(y, mask);
    let k = design.len();
    if rows.len() < k + min_extra_rows.max(1) {
        return Err(Error::InsufficientObservations { rows: rows.len(), regressors: k, context: context.to_string() });
    }
    let yv = DVector::from_iterator(rows.len(), rows.iter().map(|&t| y[t]));
    let fit = ols_named(&yv, &design.matrix(&rows), &design.names)?;
    Ok(Regression { fit, names: design.names.clone(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lags_drop_leading_rows() {
        let y: Vec<f64> = (0..6).map(|t| t as f64).collect();
        let mut d = Design::new();
        d.intercept(6).lags("y", &y, 1..=2);
        assert_eq!(d.names, vec!["const", "y_l1", "y_l2"]);
        assert_eq!(d.complete_rows(&y, None), vec![2, 3, 4, 5]);
        let mask = [true, true, true, false, true, true];
        assert_eq!(d.complete_rows(&y, Some(&mask)), vec![2, 4, 5]);
    }

    #[test]
    fn exact_autoregression() {
        let mut y = vec![1.0];
        for t in 1..20 {
            y.push(0.5 + 0.8 * y[t - 1]);
        }
        let mut d = Design::new();
        d.intercept(20).lags("y", &y, [1]);
        let r = regress(&y, &d, None, 0, "test").unwrap();
        assert!((r.coef("y_l1").unwrap() - 0.8).abs() < 1e-9);
        assert!((r.coef("const").unwrap() - 0.5).abs() < 1e-9);
        let res = r.residual_series(20);
        assert!(res[0].is_nan() && res[5].abs() < 1e-9);
    }

    #[test]
    fn too_few_rows_is_an_error() {
        let y = vec![1.0, 2.0, 3.0, 5.0];
        let mut d = Design::new();
        d.intercept(4);
        assert!(regress(&y, &d, None, 5, "ctx").is_err());
        assert!(regress(&y, &d, None, 3, "ctx").is_ok());
    }

    #[test]
    fn masked_fit_ignores_unmasked_rows() {
        let n = 30;
        let x: Vec<f64> = (0..n).map(|t| ((t * 13) % 7) as f64).collect();
        let mut y: Vec<f64> = (0..n).map(|t| 2.0 * x[t] + ((t * 5) % 3) as f64).collect();
        let mask: Vec<bool> = (0..n).map(|t| t % 3 != 0).collect();
        let mut d = Design::new();
        d.intercept(n).push("x", x.clone());
        let a = regress(&y, &d, Some(&mask), 0, "a").unwrap();
        for t in (0..n).filter(|t| !mask[*t]) {
            y[t] = 1e6 * (t as f64 + 1.0);
        }
        let b = regress(&y, &d, Some(&mask), 0, "b").unwrap();
        assert_eq!(a.fit.beta, b.fit.beta);
    }
}
