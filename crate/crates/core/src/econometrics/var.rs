use nalgebra::{DMatrix, DVector};

use super::design::{regress, Design};
use super::detrend::Deterministic;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct VarFit {
    pub names: Vec<String>,
    pub p: usize,
    /// `A_1 … A_p`, each `m × m`; row = equation.
    pub a: Vec<DMatrix<f64>>,
    /// Innovation covariance with degrees-of-freedom correction.
    pub sigma: DMatrix<f64>,
    /// Moduli of the companion-matrix eigenvalues, largest first.
    pub eigen_moduli: Vec<f64>,
    pub n_obs: usize,
}

impl VarFit {
    pub fn is_stable(&self) -> bool {
        self.eigen_moduli.first().is_none_or(|&m| m < 1.0)
    }
}

/// Companion matrix of `y_t = Σ_j A_j y_{t−j}`.
pub fn companion(a: &[DMatrix<f64>]) -> DMatrix<f64> {
    let m = a[0].nrows();
    let p = a.len();
    let mut c = DMatrix::zeros(m * p, m * p);
    for (j, aj) in a.iter().enumerate() {
        c.view_mut((0, j * m), (m, m)).copy_from(aj);
    }
    for i in m..m * p {
        c[(i, i - m)] = 1.0;
    }
    c
}

/// Equation-by-equation least squares VAR(p) with common regressors.
pub fn fit_var(series: &[(&str, &[f64])], p: usize, det: Deterministic) -> Result<VarFit> {
    if p == 0 {
        return Err(Error::InvalidInput("VAR lag order must be at least 1".into()));
    }
    if series.is_empty() {
        return Err(Error::InvalidInput("VAR needs at least one series".into()));
    }
    let n = series[0].1.len();
    let m = series.len();
    let mut design = Design::new();
    det.append(&mut design, n);
    for lag in 1..=p {
        for (name, x) in series {
            design.lags(name, x, [lag]);
        }
    }
    let offset = det.count();
    let mut a = vec![DMatrix::zeros(m, m); p];
    let mut residuals = Vec::with_capacity(m);
    let mut rows = None;
    for (eq, (name, y)) in series.iter().enumerate() {
        let r = regress(y, &design, None, 1, &format!("VAR equation {name}"))?;
        if rows.as_ref().is_some_and(|prev: &Vec<usize>| *prev != r.rows) {
            return Err(Error::InvalidInput("VAR series have different missing-value patterns".into()));
        }
        for lag in 0..p {
            for j in 0..m {
                a[lag][(eq, j)] = r.fit.beta[offset + lag * m + j];
            }
        }
        residuals.push(r.fit.residuals.clone());
        rows = Some(r.rows);
    }
    let n_obs = rows.map_or(0, |r| r.len());
    let dof = n_obs - design.len();
    let u = DMatrix::from_fn(n_obs, m, |t, j| residuals[j][t]);
    let sigma = (u.transpose() * &u) / dof as f64;
    let mut eigen_moduli: Vec<f64> = companion(&a).complex_eigenvalues().iter().map(|z| z.norm()).collect();
    eigen_moduli.sort_by(|x, y| y.total_cmp(x));
    Ok(VarFit { names: series.iter().map(|(n, _)| n.to_string()).collect(), p, a, sigma, eigen_moduli, n_obs })
}

/// Reduced-form moving-average coefficients `Ψ_0 … Ψ_H` from powers of the
/// companion matrix.
pub fn ma_coefficients(a: &[DMatrix<f64>], h_max: usize) -> Vec<DMatrix<f64>> {
    let m = a[0].nrows();
    let c = companion(a);
    let mut power = DMatrix::identity(c.nrows(), c.ncols());
    let mut out = Vec::with_capacity(h_max + 1);
    for _ in 0..=h_max {
        out.push(power.view((0, 0), (m, m)).into_owned());
        power = &c * power;
    }
    out
}

/// Lower-triangular factor `P` with `P P' = Σ`.
pub fn choleski_factor(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    sigma
        .clone()
        .cholesky()
        .map(|c| c.l())
        .ok_or_else(|| Error::Numerical("innovation covariance is not positive definite".into()))
}

/// Orthogonalized responses of every variable to the shock in position
/// `shock`: `out[h][i]` is the response of variable `i` at horizon `h`.
pub fn var_choleski_irf(fit: &VarFit, shock: usize, h_max: usize) -> Result<Vec<Vec<f64>>> {
    let m = fit.names.len();
    if shock >= m {
        return Err(Error::InvalidInput(format!("shock position {shock} out of range for {m} variables")));
    }
    let impact: DVector<f64> = choleski_factor(&fit.sigma)?.column(shock).into_owned();
    Ok(ma_coefficients(&fit.a, h_max).iter().map(|psi| (psi * &impact).iter().copied().collect()).collect())
}
