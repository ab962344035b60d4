use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::corpus::Quarter;
use crate::econometrics::TsFrame;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct VarSimulation {
    /// `series[i][t]`
    pub series: Vec<Vec<f64>>,
    /// Reduced-form innovations `e_t = P ε_t`, same layout.
    pub innovations: Vec<Vec<f64>>,
    /// Orthogonal unit-variance shocks `ε_t` with `P` the lower Choleski
    /// factor of the innovation covariance.
    pub structural: Vec<Vec<f64>>,
}

impl VarSimulation {
    /// Columns `y0, y1, …` on quarters starting at 1900Q1.
    pub fn frame(&self) -> TsFrame {
        let n = self.series.first().map_or(0, Vec::len);
        let mut f = TsFrame::with_length(Quarter { year: 1900, q: 1 }, n);
        for (i, s) in self.series.iter().enumerate() {
            f.push(format!("y{i}"), s.clone(), false).expect("consistent lengths");
        }
        f
    }
}

/// Simulates `y_t = Σ_j A_j y_{t−j} + e_t` with Gaussian `e_t ~ N(0, Σ)`,
/// discarding `burn` initial draws.
pub fn simulate_var(a: &[DMatrix<f64>], sigma: &DMatrix<f64>, t: usize, burn: usize, seed: u64) -> Result<VarSimulation> {
    let m = sigma.nrows();
    if a.is_empty() || a.iter().any(|x| x.shape() != (m, m)) || sigma.ncols() != m {
        return Err(Error::InvalidInput("VAR coefficient and covariance shapes disagree".into()));
    }
    let factor = sigma
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidInput("innovation covariance must be positive definite".into()))?
        .l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = a.len();
    let total = t + burn;
    let mut hist: Vec<DVector<f64>> = vec![DVector::zeros(m); p];
    let mut series = vec![Vec::with_capacity(t); m];
    let mut innovations = vec![Vec::with_capacity(t); m];
    let mut structural = vec![Vec::with_capacity(t); m];
    for step in 0..total {
        let eps = DVector::from_fn(m, |_, _| StandardNormal.sample(&mut rng));
        let e = &factor * &eps;
        let mut y = e.clone();
        for (j, aj) in a.iter().enumerate() {
            y += aj * &hist[j];
        }
        hist.rotate_right(1);
        hist[0] = y.clone();
        if step >= burn {
            for i in 0..m {
                series[i].push(y[i]);
                innovations[i].push(e[i]);
                structural[i].push(eps[i]);
            }
        }
    }
    Ok(VarSimulation { series, innovations, structural })
}

/// Response path `Ψ_h · impact` for `h = 0..=h_max` by the direct recursion
/// `Ψ_0 = I`, `Ψ_h = Σ_{j=1}^{min(h,p)} A_j Ψ_{h−j}`.
pub fn var_irf_analytic(a: &[DMatrix<f64>], impact: &DVector<f64>, h_max: usize) -> Vec<DVector<f64>> {
    let mut responses: Vec<DVector<f64>> = Vec::with_capacity(h_max + 1);
    for h in 0..=h_max {
        let mut r = if h == 0 { impact.clone() } else { DVector::zeros(impact.len()) };
        for (j, aj) in a.iter().enumerate().take(h) {
            r += aj * &responses[h - j - 1];
        }
        responses.push(r);
    }
    responses
}
