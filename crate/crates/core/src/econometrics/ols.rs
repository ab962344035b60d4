use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Ordinary least squares fit of `y` on the columns of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub beta: DVector<f64>,
    pub residuals: DVector<f64>,
    pub fitted: DVector<f64>,
    pub xtx_inv: DMatrix<f64>,
    /// Residual degrees of freedom, `n − k`.
    pub dof: usize,
    /// Design the fit was computed from; kept for sandwich covariances.
    pub x: DMatrix<f64>,
}

impl OlsFit {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn rss(&self) -> f64 {
        self.residuals.norm_squared()
    }

    pub fn sigma2(&self) -> f64 {
        self.rss() / self.dof as f64
    }
}

/// Relative threshold on the QR diagonal below which a column is treated as
/// a linear combination of the columns before it.
const RANK_TOL: f64 = 1e-9;

pub fn ols(y: &DVector<f64>, x: &DMatrix<f64>) -> Result<OlsFit> {
    let names: Vec<String> = (0..x.ncols()).map(|j| format!("x{j}")).collect();
    ols_named(y, x, &names)
}

/// Like [`ols`], but a rank failure names the offending columns.
pub fn ols_named(y: &DVector<f64>, x: &DMatrix<f64>, names: &[String]) -> Result<OlsFit> {
    let (n, k) = x.shape();
    if y.len() != n {
        return Err(Error::InvalidInput(format!("y has {} rows, X has {n}", y.len())));
    }
    if n <= k {
        return Err(Error::InsufficientObservations { rows: n, regressors: k, context: "ols".into() });
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("ols input contains missing or non-finite values".into()));
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let dependent: Vec<String> = (0..k)
        .filter(|&j| {
            let scale = x.column(j).norm();
            scale == 0.0 || r[(j, j)].abs() <= RANK_TOL * scale
        })
        .map(|j| names.get(j).cloned().unwrap_or_else(|| format!("x{j}")))
        .collect();
    if !dependent.is_empty() {
        return Err(Error::RankDeficient { columns: dependent });
    }
    let q = qr.q();
    let qty = q.transpose() * y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::Numerical("triangular solve failed".into()))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::Numerical("triangular inverse failed".into()))?;
    let xtx_inv = &r_inv * r_inv.transpose();
    let fitted = x * &beta;
    let residuals = y - &fitted;
    Ok(OlsFit { beta, residuals, fitted, xtx_inv, dof: n - k, x: x.clone() })
}
